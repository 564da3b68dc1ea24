//! Bending energy `∫∫ H² dA` of flat ribbons, its infinitesimal-width limit,
//! and the closed forms for the two special ruling-angle families.

use std::f64::consts::TAU;
use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::curve::{ArcLengthCurve, KAPPA_MIN};
use crate::darboux::{darboux_scalars, frame_derivative, AngleFunction, DarbouxScalars, NormalField};
use crate::error::{Result, RibbonError};
use crate::ivp::{closed_form_case_b, Psi};
use crate::quadrature::{simpson, simpson_any, simpson_with_estimate};
use crate::ribbon::{arccot, FlatRibbon, MuField};
use crate::table::fmt_f64;

/// `|wλ|` below which `log((1+x)/(1-x))/x` is replaced by its series.
pub const LAMBDA_SERIES_THRESHOLD: f64 = 1e-6;

/// `max|τ_g|` allowed for a field to count as a Case A field.
pub const CASE_A_TOL: f64 = 1e-8;

/// Tolerance on ruling-angle equality for the comparison bounds.
pub const RULING_ANGLE_TOL: f64 = 1e-6;

/// First and second fundamental forms of a ribbon at `(t, u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalForms {
    pub e_first: f64,
    pub f_first: f64,
    pub g_first: f64,
    pub e_second: f64,
    pub f_second: f64,
    pub g_second: f64,
}

impl FundamentalForms {
    pub fn metric_determinant(&self) -> f64 {
        self.e_first * self.g_first - self.f_first * self.f_first
    }

    /// `√(EG - F²)`.
    pub fn area_element(&self) -> f64 {
        self.metric_determinant().max(0.0).sqrt()
    }
}

/// Local data of a ribbon at one `t`: Darboux scalars and `(μ, μ')`.
#[derive(Debug, Clone, Copy)]
struct Local {
    s: DarbouxScalars,
    mu: f64,
    dmu: f64,
}

fn local(ribbon: &FlatRibbon, t: f64) -> Result<Local> {
    let s = darboux_scalars(ribbon.field(), t)?;
    let (mu, dmu) = ribbon.mu().at(t);
    Ok(Local { s, mu, dmu })
}

fn lambda_of(l: &Local) -> f64 {
    l.dmu - (1.0 + l.mu * l.mu) * l.s.kappa_g
}

/// The six coefficients from their closed expressions in `μ, μ', κ_g, κ_n`.
pub fn fundamental_forms(ribbon: &FlatRibbon, t: f64, u: f64) -> Result<FundamentalForms> {
    let l = local(ribbon, t)?;
    let area = 1.0 + u * lambda_of(&l);
    if area <= 0.0 {
        return Err(RibbonError::OutsideRegularDomain { t, u, area });
    }
    let Local { s, mu, dmu } = l;
    let a = 1.0 + u * (dmu - s.kappa_g);
    let b = u * mu * s.kappa_g;
    Ok(FundamentalForms {
        e_first: a * a + b * b,
        f_first: mu * (1.0 + u * dmu),
        g_first: 1.0 + mu * mu,
        e_second: s.kappa_n * area,
        f_second: 0.0,
        g_second: 0.0,
    })
}

/// The same coefficients from the surface vectors `σ_t = T + uX'`, `σ_u = X`
/// and the frame derivative `N'`, with the unit normal `±(σ_t × σ_u)/|…|`.
pub fn fundamental_forms_from_vectors(ribbon: &FlatRibbon, t: f64, u: f64) -> Result<FundamentalForms> {
    let Local { s, mu, dmu } = local(ribbon, t)?;
    let frame = ribbon.field().frame(t)?;
    let [dt, dh, dn] = frame_derivative(&frame, &s);
    let x = frame.t * mu + frame.h;
    let dx = frame.t * dmu + dt * mu + dh;
    let st = frame.t + dx * u;
    let cross = st.cross(&x);
    let norm = cross.norm();
    if !(norm > 0.0) {
        return Err(RibbonError::OutsideRegularDomain { t, u, area: norm });
    }
    let orient = if cross.dot(&frame.n) >= 0.0 { 1.0 } else { -1.0 };
    // The unit normal is N along each ruling, so ∂_t n = ±N'.
    Ok(FundamentalForms {
        e_first: st.dot(&st),
        f_first: st.dot(&x),
        g_first: x.dot(&x),
        e_second: -orient * st.dot(&dn),
        f_second: orient * dx.dot(&frame.n),
        g_second: 0.0,
    })
}

/// `H = (eG - 2fF + gE) / (2(EG - F²))`.
pub fn mean_curvature(forms: &FundamentalForms) -> Result<f64> {
    let det = forms.metric_determinant();
    if !(det > 0.0) {
        return Err(RibbonError::DegenerateMetric(det));
    }
    Ok(
        (forms.e_second * forms.g_first - 2.0 * forms.f_second * forms.f_first + forms.g_second * forms.e_first)
            / (2.0 * det),
    )
}

/// `H = (1 + μ²) κ_n / (2(1 + uλ))`, the simplification of `Ge/(2(EG-F²))`.
pub fn mean_curvature_closed(ribbon: &FlatRibbon, t: f64, u: f64) -> Result<f64> {
    let l = local(ribbon, t)?;
    let area = 1.0 + u * lambda_of(&l);
    if area <= 0.0 {
        return Err(RibbonError::OutsideRegularDomain { t, u, area });
    }
    Ok((1.0 + l.mu * l.mu) * l.s.kappa_n / (2.0 * area))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyMethod {
    ClosedForm,
    SpecialCaseLambdaZero,
    Quadrature,
    LimitFormula,
}

impl EnergyMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::ClosedForm => "closed_form",
            Self::SpecialCaseLambdaZero => "special_case_lambda_zero",
            Self::Quadrature => "quadrature",
            Self::LimitFormula => "limit_formula",
        }
    }
}

impl fmt::Display for EnergyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub value: f64,
    pub method: EnergyMethod,
    pub w: f64,
    /// Richardson estimate from the half-resolution grid (`NaN` when the
    /// grid does not allow one).
    pub err_estimate: f64,
}

/// Double composite Simpson of `H² √(EG - F²)` over `[0, L] × [-w, w]`
/// using `fundamental_forms_from_vectors`. Ruling perturbations are
/// ignored. Counts are rounded up to odd numbers.
pub fn bending_energy_quadrature(ribbon: &FlatRibbon, n_t: usize, n_u: usize) -> Result<EnergyReport> {
    let n_t = (n_t.max(3)) | 1;
    let n_u = (n_u.max(3)) | 1;
    let w = ribbon.half_width();
    let length = ribbon.length();
    let ht = length / (n_t - 1) as f64;
    let hu = 2.0 * w / (n_u - 1) as f64;
    let rows = (0..n_t)
        .into_par_iter()
        .map(|i| {
            let t = if i == n_t - 1 { length } else { ht * i as f64 };
            (0..n_u)
                .map(|j| {
                    let u = if j == n_u - 1 { w } else { -w + hu * j as f64 };
                    let forms = fundamental_forms_from_vectors(ribbon, t, u)?;
                    let area = forms.metric_determinant();
                    if !(area > 0.0) {
                        return Err(RibbonError::OutsideRegularDomain { t, u, area });
                    }
                    let h = mean_curvature(&forms)?;
                    Ok(h * h * area.sqrt())
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let integrate = |stride: usize| {
        let inner: Vec<f64> = rows
            .iter()
            .step_by(stride)
            .map(|row| {
                let v: Vec<f64> = row.iter().step_by(stride).copied().collect();
                simpson(&v, hu * stride as f64)
            })
            .collect();
        simpson(&inner, ht * stride as f64)
    };
    let value = integrate(1);
    let err_estimate = if (n_t - 1).is_multiple_of(4) && (n_u - 1).is_multiple_of(4) {
        (value - integrate(2)).abs() / 15.0
    } else {
        f64::NAN
    };
    Ok(EnergyReport {
        value,
        method: EnergyMethod::Quadrature,
        w,
        err_estimate,
    })
}

/// `log((1+x)/(1-x)) / x`, with the series `2 + 2x²/3 + 2x⁴/5` near 0.
pub fn log_ratio_over_x(x: f64) -> f64 {
    if x.abs() < LAMBDA_SERIES_THRESHOLD {
        let x2 = x * x;
        2.0 + x2 * (2.0 / 3.0 + x2 * 0.4)
    } else {
        2.0 * x.atanh() / x
    }
}

/// Closed inner integral: `(1/4) ∫ (1+μ²)² κ_n² / λ · log((1+wλ)/(1-wλ)) dt`
/// by Simpson over the slope grid.
pub fn bending_energy_closed(ribbon: &FlatRibbon) -> Result<EnergyReport> {
    bending_energy_closed_at(ribbon.mu(), ribbon.half_width())
}

/// `bending_energy_closed` for an explicit slope field and half-width.
pub fn bending_energy_closed_at(mu: &MuField, w: f64) -> Result<EnergyReport> {
    let max_lambda = mu.max_abs_lambda();
    if w * max_lambda >= 1.0 {
        return Err(RibbonError::WidthTooLarge {
            w,
            w_max: 1.0 / max_lambda,
        });
    }
    let mut all_series = true;
    let values: Vec<f64> = (0..mu.len())
        .map(|i| {
            let x = w * mu.lambda(i);
            all_series &= x.abs() < LAMBDA_SERIES_THRESHOLD;
            let m = mu.values()[i];
            let kn = mu.scalars()[i].kappa_n;
            let g = 1.0 + m * m;
            0.25 * g * g * kn * kn * w * log_ratio_over_x(x)
        })
        .collect();
    let (value, err_estimate) = t_integral(&values, mu.grid());
    Ok(EnergyReport {
        value,
        method: if all_series {
            EnergyMethod::SpecialCaseLambdaZero
        } else {
            EnergyMethod::ClosedForm
        },
        w,
        err_estimate,
    })
}

fn t_integral(values: &[f64], grid: &[f64]) -> (f64, f64) {
    let h = grid[1] - grid[0];
    if values.len() % 2 == 1 {
        simpson_with_estimate(values, h)
    } else {
        (simpson_any(values, h), f64::NAN)
    }
}

/// `(w/2) ∫ κ_n² (1 + μ²)² dt`, the leading term of the energy as `w → 0`.
pub fn limit_energy(mu: &MuField, w: f64) -> EnergyReport {
    let values: Vec<f64> = mu
        .values()
        .iter()
        .zip(mu.scalars())
        .map(|(m, s)| {
            let g = 1.0 + m * m;
            s.kappa_n * s.kappa_n * g * g
        })
        .collect();
    let (integral, err) = t_integral(&values, mu.grid());
    EnergyReport {
        value: 0.5 * w * integral,
        method: EnergyMethod::LimitFormula,
        w,
        err_estimate: 0.5 * w * err,
    }
}

/// Comparison bounds for two ribbons with the same ruling angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBound {
    pub energy_base: f64,
    pub energy_other: f64,
    /// `E(N) + (w/2) ∫ κ_g² (1 + μ²)² dt`.
    pub additive: f64,
    /// `1 + max (κ_g/κ_n)²` when `κ_n` never vanishes.
    pub ratio_bound: Option<f64>,
}

impl EnergyBound {
    pub fn holds(&self, slack: f64) -> bool {
        self.energy_other <= self.additive + slack
            && self
                .ratio_bound
                .is_none_or(|r| self.energy_other <= r * self.energy_base + slack)
    }
}

/// The additive and ratio bounds built from the base field alone.
pub fn comparison_bounds(base: &MuField, w: f64) -> (f64, f64, Option<f64>) {
    let energy = limit_energy(base, w).value;
    let values: Vec<f64> = base
        .values()
        .iter()
        .zip(base.scalars())
        .map(|(m, s)| {
            let g = 1.0 + m * m;
            s.kappa_g * s.kappa_g * g * g
        })
        .collect();
    let extra = 0.5 * w * t_integral(&values, base.grid()).0;
    let min_kn = base
        .scalars()
        .iter()
        .map(|s| s.kappa_n.abs())
        .fold(f64::INFINITY, f64::min);
    let ratio = (min_kn > KAPPA_MIN).then(|| {
        1.0 + base
            .scalars()
            .iter()
            .map(|s| (s.kappa_g / s.kappa_n).powi(2))
            .fold(0.0, f64::max)
    });
    (energy, energy + extra, ratio)
}

/// Limit energies of both ribbons plus the bounds. The ruling angles must
/// agree to `RULING_ANGLE_TOL` wherever both normal curvatures exceed 1e-6.
pub fn energy_bound(base: &MuField, other: &MuField, w: f64) -> Result<EnergyBound> {
    let mut worst: (f64, f64) = (0.0, 0.0);
    for (i, &t) in base.grid().iter().enumerate() {
        let (mu_o, _) = other.at(t);
        let kn_o = darboux_kn(other, t);
        if base.scalars()[i].kappa_n.abs() > 1e-6 && kn_o.abs() > 1e-6 {
            let diff = (arccot(base.values()[i]) - arccot(mu_o)).abs();
            if diff > worst.1 {
                worst = (t, diff);
            }
        }
    }
    if worst.1 > RULING_ANGLE_TOL {
        return Err(RibbonError::RulingAngleMismatch {
            t: worst.0,
            max_diff: worst.1,
        });
    }
    let (energy_base, additive, ratio_bound) = comparison_bounds(base, w);
    Ok(EnergyBound {
        energy_base,
        energy_other: limit_energy(other, w).value,
        additive,
        ratio_bound,
    })
}

fn darboux_kn(mu: &MuField, t: f64) -> f64 {
    let i = crate::quadrature::uniform_cell(mu.grid(), t);
    let (g0, g1) = (mu.grid()[i], mu.grid()[i + 1]);
    let s = (t - g0) / (g1 - g0);
    mu.scalars()[i].kappa_n * (1.0 - s) + mu.scalars()[i + 1].kappa_n * s
}

/// Integrals `∫κ_n²`, `∫κ_g²`, `∫κ_gκ_n` of a field with `τ_g ≡ 0`; all Case A
/// energies are quadratic forms in `(cos q, sin q)` with these coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseA {
    pub int_kn2: f64,
    pub int_kg2: f64,
    pub int_kgkn: f64,
}

/// Analytic extrema of the Case A energy over `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseAExtrema {
    /// `A = ∫(κ_g² - κ_n²)`.
    pub a: f64,
    /// `B = ∫κ_g κ_n`.
    pub b: f64,
    /// Critical points in `[0, π)` (the energy has period π).
    pub candidates: Vec<f64>,
    pub e_max: f64,
    pub e_min: f64,
    pub q_max: f64,
    pub q_min: f64,
}

impl CaseA {
    pub fn new(field: &NormalField, grid_size: usize) -> Result<Self> {
        let grid = field.curve().grid(grid_size.max(5));
        let scalars = grid
            .par_iter()
            .map(|&t| darboux_scalars(field, t))
            .collect::<Result<Vec<_>>>()?;
        let max_tau = scalars.iter().map(|s| s.tau_g.abs()).fold(0.0, f64::max);
        if max_tau > CASE_A_TOL {
            return Err(RibbonError::NotCaseA { max_tau_g: max_tau });
        }
        let h = grid[1] - grid[0];
        let int = |f: &dyn Fn(&DarbouxScalars) -> f64| {
            let v: Vec<f64> = scalars.iter().map(f).collect();
            simpson_any(&v, h)
        };
        Ok(Self {
            int_kn2: int(&|s| s.kappa_n * s.kappa_n),
            int_kg2: int(&|s| s.kappa_g * s.kappa_g),
            int_kgkn: int(&|s| s.kappa_g * s.kappa_n),
        })
    }

    pub fn a(&self) -> f64 {
        self.int_kg2 - self.int_kn2
    }

    pub fn b(&self) -> f64 {
        self.int_kgkn
    }

    /// `(w/2) ∫ (κ_n cos q - κ_g sin q)² dt`.
    pub fn energy(&self, q: f64, w: f64) -> f64 {
        let (s, c) = q.sin_cos();
        0.5 * w * (c * c * self.int_kn2 - 2.0 * s * c * self.int_kgkn + s * s * self.int_kg2)
    }

    pub fn extrema(&self, w: f64) -> CaseAExtrema {
        let (a, b) = (self.a(), self.b());
        let total = self.int_kn2 + self.int_kg2;
        let root = (a * a + 4.0 * b * b).sqrt();
        let e_max = 0.25 * w * (total + root);
        let e_min = 0.25 * w * (total - root);
        let candidates = if b != 0.0 {
            vec![arccot((a + root) / (2.0 * b)), arccot((a - root) / (2.0 * b))]
        } else if a != 0.0 {
            vec![0.0, std::f64::consts::FRAC_PI_2]
        } else {
            Vec::new()
        };
        let (mut q_max, mut q_min) = (0.0, 0.0);
        if let [q0, q1] = candidates[..] {
            if self.energy(q0, w) >= self.energy(q1, w) {
                (q_max, q_min) = (q0, q1);
            } else {
                (q_max, q_min) = (q1, q0);
            }
        }
        CaseAExtrema {
            a,
            b,
            candidates,
            e_max,
            e_min,
            q_max,
            q_min,
        }
    }
}

/// Case A energy of `N(q)` on a field with vanishing geodesic torsion.
pub fn case_a_energy(field: &NormalField, q: f64, w: f64, grid_size: usize) -> Result<f64> {
    Ok(CaseA::new(field, grid_size)?.energy(q, w))
}

pub fn case_a_extrema(field: &NormalField, w: f64, grid_size: usize) -> Result<CaseAExtrema> {
    Ok(CaseA::new(field, grid_size)?.extrema(w))
}

/// Frenet samples needed by the Case B energy: `κ`, `μ = -τ/κ` and `ψ`.
#[derive(Debug, Clone)]
pub struct CaseB {
    grid: Vec<f64>,
    /// `κ²(1 + μ²)²` at the nodes.
    weight: Vec<f64>,
    psi: Psi,
}

impl CaseB {
    pub fn new(curve: &ArcLengthCurve, grid_size: usize) -> Result<Self> {
        let grid = curve.grid(grid_size.max(5));
        let weight = grid
            .iter()
            .map(|&t| {
                let f = curve.frenet(t);
                match f.torsion {
                    Some(tau) if f.curvature > KAPPA_MIN => {
                        let mu = -tau / f.curvature;
                        let g = 1.0 + mu * mu;
                        Ok(f.curvature * f.curvature * g * g)
                    }
                    _ => Err(RibbonError::VanishingCurvature { t, kappa: f.curvature }),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let psi = match curve.helix_params() {
            Some(p) => Psi::Linear { torsion: p.torsion() },
            None => Psi::from_curve(curve, grid.len())?,
        };
        Ok(Self { grid, weight, psi })
    }

    /// Energy of the rectifying developable, `(w/2) ∫ κ²(1+μ²)² dt`.
    pub fn base_energy(&self, w: f64) -> f64 {
        0.5 * w * simpson_any(&self.weight, self.grid[1] - self.grid[0])
    }

    /// `(w/2) ∫ ((1-δ²)/(1+δ²))² κ²(1+μ²)² dt`, `δ = cot(q/2) + ψ`.
    pub fn energy(&self, q: f64, w: f64) -> f64 {
        let q = q.rem_euclid(TAU);
        if q == 0.0 {
            return self.base_energy(w);
        }
        let sol = closed_form_case_b(q, self.psi.clone());
        let values: Vec<f64> = self
            .grid
            .iter()
            .zip(&self.weight)
            .map(|(&t, wt)| {
                let d2 = sol.delta(t).map_or(f64::INFINITY, |d| d * d);
                let c = if d2.is_finite() { (1.0 - d2) / (1.0 + d2) } else { -1.0 };
                c * c * wt
            })
            .collect();
        0.5 * w * simpson_any(&values, self.grid[1] - self.grid[0])
    }

    /// `θ_q` as an angle function (for building the rotated field).
    pub fn solution(&self, q: f64) -> impl AngleFunction {
        closed_form_case_b(q, self.psi.clone())
    }
}

pub fn case_b_energy(curve: &ArcLengthCurve, q: f64, w: f64, grid_size: usize) -> Result<f64> {
    Ok(CaseB::new(curve, grid_size)?.energy(q, w))
}

/// `E(N(θ + q)) / E(N(θ))` on a helix for the π/2 ruling angle family.
pub fn helix_ratio_a(q: f64, r: f64) -> f64 {
    (2.0 * r + (2.0 * q).sin() - (2.0 * (q - r)).sin()) / (2.0 * r + (2.0 * r).sin())
}

/// `E(N(θ_q)) / E(N)` on a helix for the rectifying-developable family;
/// equal to 1 at `q ≡ 0`.
pub fn helix_ratio_b(q: f64, r: f64) -> f64 {
    let q = q.rem_euclid(TAU);
    if q == 0.0 {
        return 1.0;
    }
    let c = 1.0 / (0.5 * q).tan();
    let d = c + r;
    (2.0 * c.atan() - 2.0 * d.atan() + d * (3.0 + d * d) / (1.0 + d * d) + (q.cos() - 2.0) * c) / r
}

/// `(q_k, f(q_k, r))` for `q_k = 2πk/n`, evaluated in parallel and returned
/// in `k` order.
pub fn ratio_table(f: fn(f64, f64) -> f64, r: f64, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .into_par_iter()
        .map(|k| {
            let q = TAU * k as f64 / n as f64;
            (q, f(q, r))
        })
        .collect()
}

/// One CSV row of an energy table.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyRow {
    pub label: String,
    pub q: f64,
    pub report: EnergyReport,
}

/// Header `label,q,w,value,method,err_estimate`.
pub fn write_energy_csv<W: Write>(mut out: W, rows: &[EnergyRow]) -> io::Result<()> {
    writeln!(out, "label,q,w,value,method,err_estimate")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            row.label,
            fmt_f64(row.q),
            fmt_f64(row.report.w),
            fmt_f64(row.report.value),
            row.report.method,
            fmt_f64(row.report.err_estimate)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};
    use std::sync::Arc;

    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::curve::{
        arc_length_reparametrize, make_helix, make_torus_knot, FnCurve, HelixParams, TorusKnotParams, Vec3,
    };
    use crate::darboux::{ConstantAngle, LinearAngle};
    use crate::ivp::closed_form_helix_pi2;
    use crate::quadrature::{simpson_fn, uniform_grid};
    use crate::ribbon::{construct_ribbon, mu_field};

    fn helix(a: f64, b: f64) -> ArcLengthCurve {
        make_helix(HelixParams::one_turn(a, b)).unwrap()
    }

    fn torus_ribbon(frac: f64) -> FlatRibbon {
        let (c, torus) = make_torus_knot(TorusKnotParams::default(), 2000).unwrap();
        let field = NormalField::torus_normal(&c, torus);
        let mu = mu_field(&field, 2001).unwrap();
        let w_max = crate::ribbon::max_regular_width(&mu);
        FlatRibbon::from_mu(&field, frac * w_max, mu).unwrap()
    }

    /// Helix(1,1) field rotated by `-t/2 + q`: geodesic torsion vanishes.
    fn case_a_helix(length: f64, offset: f64) -> NormalField {
        let c = make_helix(HelixParams::new(1.0, 1.0, length)).unwrap();
        let base = closed_form_helix_pi2(1.0, 1.0).unwrap();
        NormalField::principal(&c).rotated(Arc::new(LinearAngle {
            offset,
            slope: base.slope,
        }))
    }

    #[test]
    fn forms_at_zero_offset() {
        let r = torus_ribbon(0.5);
        for t in [0.3, 4.0, 11.0] {
            let f = fundamental_forms(&r, t, 0.0).unwrap();
            let (mu, _) = r.mu().at(t);
            let s = darboux_scalars(r.field(), t).unwrap();
            assert!((f.e_first - 1.0).abs() < 1e-15);
            assert!((f.f_first - mu).abs() < 1e-15);
            assert!((f.g_first - 1.0 - mu * mu).abs() < 1e-15);
            assert!((f.e_second - s.kappa_n).abs() < 1e-15);
        }
    }

    #[test]
    fn forms_agree_between_paths() {
        let r = torus_ribbon(0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = r.half_width();
        for _ in 0..200 {
            let t = rng.gen_range(0.0..r.length());
            let u = rng.gen_range(-w..w);
            let a = fundamental_forms(&r, t, u).unwrap();
            let b = fundamental_forms_from_vectors(&r, t, u).unwrap();
            for (x, y) in [
                (a.e_first, b.e_first),
                (a.f_first, b.f_first),
                (a.g_first, b.g_first),
                (a.e_second, b.e_second),
                (a.f_second, b.f_second),
            ] {
                assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()), "{x} vs {y}");
            }
            let (mu, dmu) = r.mu().at(t);
            let s = darboux_scalars(r.field(), t).unwrap();
            let area = 1.0 + u * dmu - u * (1.0 + mu * mu) * s.kappa_g;
            assert!((a.area_element() - area).abs() < 1e-10);
            let h = mean_curvature(&a).unwrap();
            assert!((h - mean_curvature_closed(&r, t, u).unwrap()).abs() < 1e-10 * (1.0 + h.abs()));
        }
    }

    #[test]
    fn rectifying_helix_forms() {
        let c = helix(1.0, 1.0);
        let field = NormalField::principal(&c);
        let r = construct_ribbon(&field, 0.3, 201).unwrap();
        for u in [-0.3, 0.0, 0.2] {
            let f = fundamental_forms(&r, 1.0, u).unwrap();
            assert!((f.e_first - 1.0).abs() < 1e-14);
            assert!((f.f_first + 1.0).abs() < 1e-14);
            assert!((f.g_first - 2.0).abs() < 1e-14);
            assert!((f.e_second - 0.5).abs() < 1e-14);
            assert!((f.area_element() - 1.0).abs() < 1e-14);
            // (1 + μ²) κ / 2 with μ = -1, κ = 1/2.
            assert!((mean_curvature(&f).unwrap() - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn mean_curvature_degenerate_and_zero() {
        let f = FundamentalForms {
            e_first: 1.0,
            f_first: 1.0,
            g_first: 1.0,
            e_second: 1.0,
            f_second: 0.0,
            g_second: 0.0,
        };
        assert!(matches!(mean_curvature(&f), Err(RibbonError::DegenerateMetric(_))));
        let f = FundamentalForms {
            e_second: 0.0,
            f_first: 0.0,
            ..f
        };
        assert_eq!(mean_curvature(&f).unwrap(), 0.0);
    }

    #[test]
    fn outside_regular_domain() {
        let r = torus_ribbon(0.5);
        let i = (0..r.mu().len())
            .max_by(|&a, &b| r.mu().lambda(a).abs().total_cmp(&r.mu().lambda(b).abs()))
            .unwrap();
        let t = r.mu().grid()[i];
        let u = -2.0 / r.mu().lambda(i);
        assert!(matches!(
            fundamental_forms(&r, t, u),
            Err(RibbonError::OutsideRegularDomain { .. })
        ));
    }

    #[test]
    fn log_ratio_branch_is_continuous() {
        let below = log_ratio_over_x(LAMBDA_SERIES_THRESHOLD * (1.0 - 1e-9));
        let above = log_ratio_over_x(LAMBDA_SERIES_THRESHOLD * (1.0 + 1e-9));
        assert!((below - above).abs() < 1e-10 * 2.0);
        assert!((log_ratio_over_x(1e-9) - 2.0).abs() < 1e-12 * 2.0);
        assert_eq!(log_ratio_over_x(0.0), 2.0);
        assert!((log_ratio_over_x(0.5) - (3f64).ln() / 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_matches_quadrature_on_torus_knot() {
        let r = torus_ribbon(0.5);
        let closed = bending_energy_closed(&r).unwrap();
        let quad = bending_energy_quadrature(&r, 2001, 41).unwrap();
        assert_eq!(closed.method, EnergyMethod::ClosedForm);
        let rel = (closed.value - quad.value).abs() / closed.value;
        assert!(rel <= 1e-6, "{rel}");
        assert!(quad.err_estimate.is_finite());
    }

    #[test]
    fn helix_rectifying_energy_is_exact() {
        for (a, b, w) in [(1.0, 1.0, 0.1), (3.0, 4.0, 0.05)] {
            let c = helix(a, b);
            let r = construct_ribbon(&NormalField::principal(&c), w, 2001).unwrap();
            let e = bending_energy_closed(&r).unwrap();
            assert_eq!(e.method, EnergyMethod::SpecialCaseLambdaZero);
            let exact = w * c.length() / (2.0 * a * a);
            assert!((e.value - exact).abs() <= 1e-12 * exact, "{} {}", e.value, exact);
        }
    }

    #[test]
    fn small_width_quadrature_on_helix() {
        let c = helix(1.0, 1.0);
        let r = construct_ribbon(&NormalField::principal(&c), 1e-3, 2001).unwrap();
        let e = bending_energy_quadrature(&r, 2001, 5).unwrap();
        let exact = 1e-3 * c.length() / 2.0;
        assert!((e.value - exact).abs() <= 1e-8 * exact);
    }

    #[test]
    fn planar_strip_has_zero_energy() {
        let c = make_helix(HelixParams::new(1.0, 0.0, 2.0 * PI)).unwrap();
        // Binormal of a circle: κ_n ≡ 0, τ_g ≡ 0, the plane strip.
        let field = NormalField::principal(&c).rotated(Arc::new(ConstantAngle(FRAC_PI_2)));
        let mu = MuField::from_values(&field, vec![0.0; 401]).unwrap();
        let r = FlatRibbon::from_mu(&field, 0.5, mu).unwrap();
        assert!(bending_energy_closed(&r).unwrap().value.abs() < 1e-28);
        assert!(bending_energy_quadrature(&r, 401, 9).unwrap().value.abs() < 1e-28);
        assert!(limit_energy(r.mu(), 0.5).value.abs() < 1e-28);
    }

    #[test]
    fn limit_law_richardson_ratio() {
        let r = torus_ribbon(0.125);
        let w = r.half_width();
        let e0 = limit_energy(r.mu(), w).value / w;
        let e1 = bending_energy_closed_at(r.mu(), w).unwrap().value / w;
        let e2 = bending_energy_closed_at(r.mu(), 0.5 * w).unwrap().value / (0.5 * w);
        let ratio = (e1 - e0) / (e2 - e0);
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn width_too_large_for_closed_form() {
        let r = torus_ribbon(0.5);
        let big = 1.0 / r.mu().max_abs_lambda();
        assert!(matches!(
            bending_energy_closed_at(r.mu(), big),
            Err(RibbonError::WidthTooLarge { .. })
        ));
    }

    #[test]
    fn limit_energy_special_cases() {
        let c = helix(1.0, 1.0);
        // Rectifying developable: κ²(1+μ²)² = (1/4)·4 = 1.
        let mu = mu_field(&NormalField::principal(&c), 2001).unwrap();
        let e = limit_energy(&mu, 0.2);
        assert!((e.value - 0.1 * c.length()).abs() < 1e-12);
        // τ_g ≡ 0: integrand κ_n².
        let field = case_a_helix(2.0, 0.0);
        let mu = mu_field(&field, 2001).unwrap();
        let e = limit_energy(&mu, 0.2).value;
        let expect = 0.1 * simpson_fn(|t| (0.5 * (0.5 * t).cos()).powi(2), 0.0, 2.0, 2000);
        assert!((e - expect).abs() < 1e-12);
    }

    #[test]
    fn energy_bound_identity_and_mismatch() {
        let c = helix(1.0, 1.0);
        let n = NormalField::principal(&c);
        let mu = mu_field(&n, 401).unwrap();
        let b = energy_bound(&mu, &mu, 0.1).unwrap();
        assert!(b.holds(0.0));
        assert!((b.additive - b.energy_base).abs() < 1e-14);
        assert_eq!(b.ratio_bound, Some(1.0));
        let other = mu_field(&n.rotated(Arc::new(ConstantAngle(0.3))), 401).unwrap();
        assert!(matches!(
            energy_bound(&mu, &other, 0.1),
            Err(RibbonError::RulingAngleMismatch { .. })
        ));
    }

    #[test]
    fn energy_bound_on_case_b_family() {
        let c = helix(1.0, 1.0);
        let n = NormalField::principal(&c);
        let base = mu_field(&n, 801).unwrap();
        let cb = CaseB::new(&c, 801).unwrap();
        for q in [0.7, 2.0, 4.0] {
            let v = n.rotated(Arc::new(cb.solution(q)));
            let other = mu_field(&v, 801).unwrap();
            let b = energy_bound(&base, &other, 0.1).unwrap();
            assert!(b.holds(1e-12));
            assert!((b.energy_other - cb.energy(q, 0.1)).abs() < 1e-8);
        }
    }

    #[test]
    fn case_a_rejects_torsion() {
        let c = helix(1.0, 1.0);
        assert!(matches!(
            case_a_energy(&NormalField::principal(&c), 0.0, 0.1, 101),
            Err(RibbonError::NotCaseA { .. })
        ));
    }

    #[test]
    fn case_a_energy_values() {
        let field = case_a_helix(2.0, 0.0);
        let ca = CaseA::new(&field, 2001).unwrap();
        let w = 0.1;
        let kn2 = simpson_fn(|t| (0.5 * (0.5 * t).cos()).powi(2), 0.0, 2.0, 2000);
        let kg2 = simpson_fn(|t| (0.5 * (0.5 * t).sin()).powi(2), 0.0, 2.0, 2000);
        assert!((ca.energy(0.0, w) - 0.5 * w * kn2).abs() < 1e-14);
        assert!((ca.energy(FRAC_PI_2, w) - 0.5 * w * kg2).abs() < 1e-14);
        // Matches the helix formula E = a²w(2bL + c²(sin(2bL/c² - 2q) + sin 2q)) / (8b c⁴).
        for q in [0.0, 0.4, 2.0] {
            let exact = w * (4.0 + 2.0 * ((2.0f64 - 2.0 * q).sin() + (2.0 * q).sin())) / (8.0 * 4.0);
            assert!((ca.energy(q, w) - exact).abs() < 1e-12, "{q}");
            assert!((case_a_energy(&field, q, w, 2001).unwrap() - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn case_a_extrema_match_grid_scan() {
        let field = case_a_helix(2.0, 0.0);
        let ca = CaseA::new(&field, 2001).unwrap();
        let w = 0.1;
        let ex = ca.extrema(w);
        assert!(ex.b != 0.0);
        let qs = uniform_grid(0.0, TAU, 4097);
        let (mut best, mut worst) = ((0.0, f64::MIN), (0.0, f64::MAX));
        for &q in &qs[..4096] {
            let e = ca.energy(q, w);
            if e > best.1 {
                best = (q, e);
            }
            if e < worst.1 {
                worst = (q, e);
            }
        }
        assert!((best.1 - ex.e_max).abs() <= 1e-8 * ex.e_max);
        assert!((worst.1 - ex.e_min).abs() <= 1e-8 * ex.e_max);
        let cell = TAU / 4096.0;
        let mod_pi = |a: f64, b: f64| {
            let d = (a - b).rem_euclid(PI);
            d.min(PI - d)
        };
        assert!(mod_pi(best.0, ex.q_max) <= cell);
        assert!(mod_pi(worst.0, ex.q_min) <= cell);
        assert!((ca.energy(ex.q_max, w) - ex.e_max).abs() < 1e-14);
        assert!((ca.energy(ex.q_min, w) - ex.e_min).abs() < 1e-14);
    }

    #[test]
    fn case_a_degenerate_subcases() {
        // Circle with principal normal: κ_g = 0 so B = 0, A = -∫κ² < 0.
        let circle = make_helix(HelixParams::new(1.0, 0.0, TAU)).unwrap();
        let ex = case_a_extrema(&NormalField::principal(&circle), 0.1, 401).unwrap();
        assert_eq!(ex.b, 0.0);
        assert!(ex.a < 0.0);
        assert_eq!(ex.candidates, vec![0.0, FRAC_PI_2]);
        assert_eq!(ex.q_max, 0.0);
        assert!((ex.e_max - 0.05 * TAU).abs() < 1e-12);
        assert!(ex.e_min.abs() < 1e-12);
        // Helix field over r = π: A = B = 0.
        let field = case_a_helix(2.0 * PI, 0.0);
        let ca = CaseA::new(&field, 2001).unwrap();
        let ex = ca.extrema(0.1);
        assert!(ex.a.abs() < 1e-12 && ex.b.abs() < 1e-12);
        let quarter = 0.025 * (ca.int_kn2 + ca.int_kg2);
        assert!((quarter - 0.025 * PI / 2.0).abs() < 1e-12);
        for q in [0.0, 1.0, 2.5] {
            assert!((ca.energy(q, 0.1) - quarter).abs() < 1e-12);
        }
    }

    #[test]
    fn case_a_constants_stable_under_refinement() {
        let field = case_a_helix(2.0, 0.3);
        let a = CaseA::new(&field, 1001).unwrap();
        let b = CaseA::new(&field, 2001).unwrap();
        assert!((a.a() - b.a()).abs() < 1e-8 && (a.b() - b.b()).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn case_a_bound_holds(q in 0.0..TAU, offset in -3.0..3.0f64) {
            let field = case_a_helix(2.0, offset);
            let ca = CaseA::new(&field, 201).unwrap();
            let mu = MuField::from_values(&field, vec![0.0; 201]).unwrap();
            let (e_n, additive, ratio) = comparison_bounds(&mu, 0.1);
            prop_assert!((e_n - ca.energy(0.0, 0.1)).abs() < 1e-14);
            let e_v = ca.energy(q, 0.1);
            prop_assert!(e_v <= additive + 1e-12);
            if let Some(r) = ratio {
                prop_assert!(e_v <= r * e_n + 1e-12);
            }
        }

        #[test]
        fn case_a_identity(q in -7.0..7.0f64) {
            let ca = CaseA { int_kn2: 0.7, int_kg2: 0.2, int_kgkn: -0.3 };
            let total = ca.int_kn2 + ca.int_kg2;
            let alt = 0.025 * total - 0.025 * (ca.a() * (2.0 * q).cos() + 2.0 * ca.b() * (2.0 * q).sin());
            prop_assert!((ca.energy(q, 0.1) - alt).abs() < 1e-15);
        }
    }

    #[test]
    fn case_b_energy_against_ratio() {
        for r in [1.0, 2.0, 3.0, 4.0] {
            let c = make_helix(HelixParams::new(1.0, 1.0, 2.0 * r)).unwrap();
            let cb = CaseB::new(&c, 2001).unwrap();
            let w = 0.1;
            let e_n = cb.base_energy(w);
            assert!((e_n - w * c.length() / 2.0).abs() < 1e-13);
            for k in 0..64 {
                let q = TAU * k as f64 / 64.0;
                let ratio = cb.energy(q, w) / e_n;
                let exact = helix_ratio_b(q, r);
                assert!((ratio - exact).abs() <= 1e-6 * exact, "r={r} q={q}: {ratio} {exact}");
                assert!(ratio <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn case_b_special_values() {
        assert!((helix_ratio_b(PI, 1.0) - (2.0 - FRAC_PI_2)).abs() < 1e-10);
        assert_eq!(helix_ratio_b(0.0, 3.0), 1.0);
        let c = make_helix(HelixParams::new(1.0, 1.0, 2.0)).unwrap();
        let cb = CaseB::new(&c, 2001).unwrap();
        let near = cb.energy(1e-9, 0.1);
        assert!((near - cb.base_energy(0.1)).abs() < 1e-7 * near);
        assert_eq!(cb.energy(TAU, 0.1), cb.base_energy(0.1));
        let line = FnCurve::new(|s| Vec3::new(s, 0.0, 0.0), 0.0, 1.0);
        let line = arc_length_reparametrize(Arc::new(line), 100, 1e-9).unwrap();
        assert!(matches!(
            case_b_energy(&line, 1.0, 0.1, 11),
            Err(RibbonError::VanishingCurvature { .. })
        ));
    }

    #[test]
    fn ratio_limits() {
        assert_eq!(helix_ratio_a(0.0, 2.5), 1.0);
        for k in 1..64 {
            let q = TAU * k as f64 / 64.0;
            assert!((helix_ratio_a(q, 1e4) - 1.0).abs() < 1e-3);
            assert!((helix_ratio_b(q, 1e4) - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn ratio_table_is_ordered() {
        let t = ratio_table(helix_ratio_a, 1.0, 512);
        assert_eq!(t.len(), 512);
        assert_eq!(t[0], (0.0, 1.0));
        assert!(t.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn energy_csv_row() {
        let rows = vec![EnergyRow {
            label: "x".into(),
            q: 0.0,
            report: EnergyReport {
                value: 1.0,
                method: EnergyMethod::LimitFormula,
                w: 0.5,
                err_estimate: 0.0,
            },
        }];
        let mut buf = Vec::new();
        write_energy_csv(&mut buf, &rows).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(
            s,
            "label,q,w,value,method,err_estimate\nx,0.0000000000000000e0,5.0000000000000000e-1,1.0000000000000000e0,limit_formula,0.0000000000000000e0\n"
        );
    }
}
