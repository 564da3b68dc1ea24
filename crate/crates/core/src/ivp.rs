//! Rotation-angle initial value problems: given a base field `N`, find
//! `θ(t)` such that the ribbon on `N(θ)` has a prescribed ruling angle
//! (or the same ruling angle as the ribbon on `N`).

use std::f64::consts::TAU;
use std::io::{self, Write};
use std::sync::Arc;

use crate::curve::{ArcLengthCurve, KAPPA_MIN};
use crate::darboux::{darboux_scalars, AngleFunction, DarbouxScalars, LinearAngle, NormalField};
use crate::error::{Result, RibbonError};
use crate::quadrature::{cumulative_simpson, hermite, uniform_cell, uniform_grid};
use crate::ribbon::{arccot, MuField};
use crate::table::fmt_f64;

/// `|κ_n|` below which the same-angle equation is not used.
pub const KAPPA_N_MIN: f64 = 1e-9;

/// Number of times `solve_theta` may double the grid before giving up.
const MAX_REFINEMENTS: usize = 6;

/// A prescribed ruling angle `φ: [0, L] → (0, π)`, stored through `cot φ`.
#[derive(Clone)]
pub enum AnglePrescription {
    Constant(f64),
    /// `cot φ = μ`, the slope of an existing ribbon (its ruling angle).
    Slope(MuField),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for AnglePrescription {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Constant(phi) => write!(f, "Constant({phi})"),
            Self::Slope(mu) => write!(f, "Slope({} nodes)", mu.len()),
            Self::Function(_) => write!(f, "Function"),
        }
    }
}

impl AnglePrescription {
    pub fn constant(phi: f64) -> Result<Self> {
        if !(phi > 0.0 && phi < std::f64::consts::PI) {
            return Err(RibbonError::InvalidParams(format!(
                "prescribed angle must lie in (0, pi), got {phi}"
            )));
        }
        Ok(Self::Constant(phi))
    }

    pub fn cot(&self, t: f64) -> f64 {
        match self {
            Self::Constant(phi) => 1.0 / phi.tan(),
            Self::Slope(mu) => mu.at(t).0,
            Self::Function(f) => 1.0 / f(t).tan(),
        }
    }

    pub fn angle(&self, t: f64) -> f64 {
        match self {
            Self::Function(f) => f(t),
            Self::Constant(phi) => *phi,
            Self::Slope(_) => arccot(self.cot(t)),
        }
    }
}

/// `θ(t0) = q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCondition {
    pub t0: f64,
    pub q: f64,
}

impl InitialCondition {
    pub fn at_start(q: f64) -> Self {
        Self { t0: 0.0, q }
    }
}

/// `F(t, θ) = cot φ (κ_g sin θ - κ_n cos θ) - τ_g`, the right-hand side of
/// `θ' + cot φ (κ_n cos θ - κ_g sin θ) + τ_g = 0`.
pub fn rhs_prescribed(theta: f64, s: &DarbouxScalars, cot_phi: f64) -> f64 {
    let (sn, cs) = theta.sin_cos();
    cot_phi * (s.kappa_g * sn - s.kappa_n * cs) - s.tau_g
}

/// `θ' = τ_g cos θ - τ_g - (κ_g τ_g / κ_n) sin θ`, the equation that keeps
/// the ruling angle of the base field.
pub fn rhs_same_angle(t: f64, theta: f64, s: &DarbouxScalars) -> Result<f64> {
    if s.kappa_n.abs() < KAPPA_N_MIN {
        return Err(RibbonError::NormalCurvatureZero { t });
    }
    let (sn, cs) = theta.sin_cos();
    Ok(s.tau_g * cs - s.tau_g - s.kappa_g * s.tau_g / s.kappa_n * sn)
}

/// Dense RK4 solution of a rotation-angle IVP on a uniform grid.
#[derive(Debug, Clone)]
pub struct ThetaSolution {
    grid: Vec<f64>,
    theta: Vec<f64>,
    dtheta: Vec<f64>,
    pub method: &'static str,
    pub step: f64,
    /// Richardson estimate `max |θ_h - θ_2h| / 15` over shared nodes.
    pub error_estimate: f64,
}

impl ThetaSolution {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.theta
    }

    pub fn derivatives(&self) -> &[f64] {
        &self.dtheta
    }

    /// Largest `|θ_interp'(t) - F(t, θ_interp(t))|` at cell midpoints.
    pub fn midpoint_residual(&self, rhs: &RhsFn<'_>) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for w in self.grid.windows(2) {
            let t = 0.5 * (w[0] + w[1]);
            worst = worst.max((self.derivative(t) - rhs(t, self.value(t))?).abs());
        }
        Ok(worst)
    }

    /// CSV with header `t,theta,dtheta`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,theta,dtheta")?;
        for i in 0..self.grid.len() {
            writeln!(
                out,
                "{},{},{}",
                fmt_f64(self.grid[i]),
                fmt_f64(self.theta[i]),
                fmt_f64(self.dtheta[i])
            )?;
        }
        Ok(())
    }

    fn interp(&self, t: f64) -> (f64, f64) {
        let i = uniform_cell(&self.grid, t);
        hermite(
            self.grid[i],
            self.grid[i + 1],
            self.theta[i],
            self.theta[i + 1],
            self.dtheta[i],
            self.dtheta[i + 1],
            t,
        )
    }
}

impl AngleFunction for ThetaSolution {
    fn value(&self, t: f64) -> f64 {
        self.interp(t).0
    }

    fn derivative(&self, t: f64) -> f64 {
        self.interp(t).1
    }
}

/// Right-hand side `F(t, θ)`.
pub type RhsFn<'a> = dyn Fn(f64, f64) -> Result<f64> + Sync + 'a;

fn rk4_step(rhs: &RhsFn<'_>, t: f64, y: f64, h: f64) -> Result<f64> {
    let k1 = rhs(t, y)?;
    let k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)?;
    let k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)?;
    let k4 = rhs(t + h, y + h * k3)?;
    Ok(y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

/// Values at the `cells + 1` uniform nodes of `[0, length]`, integrating
/// forward and backward from `t0`.
fn integrate(rhs: &RhsFn<'_>, length: f64, ic: InitialCondition, cells: usize) -> Result<Vec<f64>> {
    let grid = uniform_grid(0.0, length, cells + 1);
    let h = length / cells as f64;
    let k = ((ic.t0 / h).round() as usize).min(cells);
    let mut y = vec![0.0; cells + 1];
    y[k] = if (grid[k] - ic.t0).abs() > 0.0 {
        rk4_step(rhs, ic.t0, ic.q, grid[k] - ic.t0)?
    } else {
        ic.q
    };
    for i in k..cells {
        y[i + 1] = rk4_step(rhs, grid[i], y[i], grid[i + 1] - grid[i])?;
    }
    for i in (1..=k).rev() {
        y[i - 1] = rk4_step(rhs, grid[i], y[i], grid[i - 1] - grid[i])?;
    }
    Ok(y)
}

/// Classical RK4 with fixed step `L / grid_size` from `ic.t0` towards both
/// ends of `[0, L]`. The Richardson estimate against the half-resolution
/// run must stay below `tol`; otherwise the grid is doubled (up to six
/// times) before failing with `StepSizeUnderflow`.
pub fn solve_theta(
    rhs: &RhsFn<'_>,
    length: f64,
    ic: InitialCondition,
    grid_size: usize,
    tol: f64,
) -> Result<ThetaSolution> {
    if !(ic.t0 >= 0.0 && ic.t0 <= length) {
        return Err(RibbonError::InvalidParams(format!(
            "initial time {} outside [0, {length}]",
            ic.t0
        )));
    }
    let mut cells = grid_size.max(2);
    cells += cells % 2;
    let mut last = (0.0, f64::INFINITY);
    for _ in 0..=MAX_REFINEMENTS {
        let fine = integrate(rhs, length, ic, cells)?;
        let coarse = integrate(rhs, length, ic, cells / 2)?;
        let estimate = coarse
            .iter()
            .enumerate()
            .map(|(i, c)| (fine[2 * i] - c).abs() / 15.0)
            .fold(0.0, f64::max);
        let step = length / cells as f64;
        if estimate <= tol {
            let grid = uniform_grid(0.0, length, cells + 1);
            let dtheta = grid
                .iter()
                .zip(&fine)
                .map(|(&t, &y)| rhs(t, y))
                .collect::<Result<Vec<_>>>()?;
            return Ok(ThetaSolution {
                grid,
                theta: fine,
                dtheta,
                method: "rk4",
                step,
                error_estimate: estimate,
            });
        }
        last = (step, estimate);
        cells *= 2;
    }
    Err(RibbonError::StepSizeUnderflow {
        step: last.0,
        estimate: last.1,
        tol,
    })
}

/// Solves the prescribed-angle equation along `base`.
pub fn solve_prescribed(
    base: &NormalField,
    phi: &AnglePrescription,
    ic: InitialCondition,
    grid_size: usize,
    tol: f64,
) -> Result<ThetaSolution> {
    let rhs = |t: f64, theta: f64| -> Result<f64> {
        let s = darboux_scalars(base, t)?;
        Ok(rhs_prescribed(theta, &s, phi.cot(t)))
    };
    solve_theta(&rhs, base.curve().length(), ic, grid_size, tol)
}

/// Solves the same-angle equation along `base` (needs `κ_n ≠ 0`).
pub fn solve_same_angle(base: &NormalField, ic: InitialCondition, grid_size: usize, tol: f64) -> Result<ThetaSolution> {
    let rhs = |t: f64, theta: f64| -> Result<f64> {
        let s = darboux_scalars(base, t)?;
        rhs_same_angle(t, theta, &s)
    };
    solve_theta(&rhs, base.curve().length(), ic, grid_size, tol)
}

/// `c = max|κ_g cot φ| + max|κ_n cot φ|`, a Lipschitz constant of `F` in θ.
pub fn lipschitz_bound(scalars: &[DarbouxScalars], cot_phi: &[f64]) -> f64 {
    let (l, m) = scalars.iter().zip(cot_phi).fold((0.0f64, 0.0f64), |(l, m), (s, c)| {
        (l.max((s.kappa_g * c).abs()), m.max((s.kappa_n * c).abs()))
    });
    l + m
}

/// `ψ(t) = ∫₀ᵗ τ`.
#[derive(Debug, Clone)]
pub enum Psi {
    /// Constant torsion.
    Linear { torsion: f64 },
    Table {
        grid: Vec<f64>,
        values: Vec<f64>,
        torsion: Vec<f64>,
    },
}

impl Psi {
    /// Cumulative Simpson table of the Frenet torsion on `grid_size` nodes.
    pub fn from_curve(curve: &ArcLengthCurve, grid_size: usize) -> Result<Self> {
        let grid = curve.grid(grid_size.max(2));
        let tau = |t: f64| -> Result<f64> {
            let f = curve.frenet(t);
            f.torsion
                .ok_or(RibbonError::VanishingCurvature { t, kappa: f.curvature })
        };
        let torsion = grid.iter().map(|&t| tau(t)).collect::<Result<Vec<_>>>()?;
        let values = cumulative_simpson(|t| tau(t).unwrap_or(f64::NAN), &grid);
        if values.iter().any(|v| !v.is_finite()) {
            return Err(RibbonError::VanishingCurvature {
                t: f64::NAN,
                kappa: KAPPA_MIN,
            });
        }
        Ok(Self::Table { grid, values, torsion })
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Self::Linear { torsion } => torsion * t,
            Self::Table { grid, values, torsion } => {
                let i = uniform_cell(grid, t);
                hermite(
                    grid[i],
                    grid[i + 1],
                    values[i],
                    values[i + 1],
                    torsion[i],
                    torsion[i + 1],
                    t,
                )
                .0
            }
        }
    }

    pub fn torsion(&self, t: f64) -> f64 {
        match self {
            Self::Linear { torsion } => *torsion,
            Self::Table { grid, torsion, .. } => {
                let i = uniform_cell(grid, t);
                let s = (t - grid[i]) / (grid[i + 1] - grid[i]);
                torsion[i] * (1.0 - s) + torsion[i + 1] * s
            }
        }
    }
}

/// Closed-form solution `θ_q = 2 ArcCot(cot(q/2) + ψ)` of `θ' = τ(cos θ - 1)`
/// (`θ ≡ 0` for `q = 0`). `q` is reduced mod 2π and the multiple of 2π is
/// added back, so the function starts at `q` exactly.
#[derive(Debug, Clone)]
pub struct CaseBSolution {
    q: f64,
    wraps: f64,
    psi: Psi,
}

impl CaseBSolution {
    pub fn q(&self) -> f64 {
        self.q
    }

    /// `δ_q = cot(q/2) + ψ(t)`, `None` on the `q = 0` branch.
    pub fn delta(&self, t: f64) -> Option<f64> {
        let reduced = self.q - self.wraps;
        (reduced != 0.0).then(|| 1.0 / (0.5 * reduced).tan() + self.psi.value(t))
    }
}

impl AngleFunction for CaseBSolution {
    fn value(&self, t: f64) -> f64 {
        match self.delta(t) {
            None => self.wraps,
            Some(d) => self.wraps + 2.0 * arccot(d),
        }
    }

    fn derivative(&self, t: f64) -> f64 {
        match self.delta(t) {
            None => 0.0,
            Some(d) => -2.0 * self.psi.torsion(t) / (1.0 + d * d),
        }
    }
}

pub fn closed_form_case_b(q: f64, psi: Psi) -> CaseBSolution {
    let wraps = q.div_euclid(TAU) * TAU;
    CaseBSolution { q, wraps, psi }
}

/// `θ(t) = -bt/(a² + b²)`: on the helix principal normal this rotation makes
/// the geodesic torsion vanish (ruling angle π/2).
pub fn closed_form_helix_pi2(a: f64, b: f64) -> Result<LinearAngle> {
    if !(a > 0.0) {
        return Err(RibbonError::InvalidParams(format!(
            "helix radius must be positive, got {a}"
        )));
    }
    Ok(LinearAngle {
        offset: 0.0,
        slope: -b / (a * a + b * b),
    })
}
