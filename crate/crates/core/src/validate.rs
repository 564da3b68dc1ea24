//! Named numerical checks with measured value, bound and verdict. Used by
//! `ribbon validate` and by the acceptance test target.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI, TAU};
use std::io::{self, Write};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{PhiSpec, RunConfig, WidthSpec};
use crate::curve::{make_helix, make_torus_knot, HelixParams, TorusKnotParams};
use crate::darboux::{
    darboux_scalars, frenet_rotation_field, isometric_partner_angle, rotate, DarbouxScalars, FnAngle, LinearAngle,
    NormalField,
};
use crate::energy::{
    bending_energy_closed, bending_energy_closed_at, bending_energy_quadrature, comparison_bounds, helix_ratio_a,
    helix_ratio_b, limit_energy, CaseA, CaseB,
};
use crate::error::Result;
use crate::ivp::{
    closed_form_case_b, closed_form_helix_pi2, lipschitz_bound, rhs_same_angle, solve_prescribed, solve_same_angle,
    AnglePrescription, InitialCondition, Psi,
};
use crate::pipeline::{base_ribbon, family_member, setup, solve_member_theta, Setup};
use crate::ribbon::{arccot, flatness_residuals, max_regular_width, mu_field, FlatRibbon, MuField};
use crate::table::fmt_f64;

/// One check: passes when `measured <= bound` (and `measured` is a number).
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            bound,
            pass: measured <= bound,
        }
    }

    /// A check that could not be evaluated (error in the computation).
    pub fn failed(name: impl Into<String>, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured: f64::NAN,
            bound,
            pass: false,
        }
    }

    /// `name measured bound PASS|FAIL`.
    pub fn line(&self) -> String {
        format!(
            "{} {} {} {}",
            self.name,
            fmt_f64(self.measured),
            fmt_f64(self.bound),
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

pub fn write_report<W: Write>(mut out: W, checks: &[Check]) -> io::Result<()> {
    writeln!(out, "name,measured,bound,pass")?;
    for c in checks {
        writeln!(
            out,
            "{},{},{},{}",
            c.name,
            fmt_f64(c.measured),
            fmt_f64(c.bound),
            c.pass
        )?;
    }
    Ok(())
}

fn or_fail(name: &str, bound: f64, r: Result<Check>) -> Check {
    r.unwrap_or_else(|_| Check::failed(name, bound))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

const ACCEPT_GRID: usize = 2001;

fn helix11() -> Result<crate::curve::ArcLengthCurve> {
    make_helix(HelixParams::one_turn(1.0, 1.0))
}

/// Principal normal of helix(1,1) rotated by `-t/2 + offset`, over length `l`.
fn case_a_field(length: f64, offset: f64) -> Result<NormalField> {
    let c = make_helix(HelixParams::new(1.0, 1.0, length))?;
    let slope = closed_form_helix_pi2(1.0, 1.0)?.slope;
    Ok(NormalField::principal(&c).rotated(Arc::new(LinearAngle { offset, slope })))
}

fn torus_setup() -> Result<Setup> {
    let (curve, torus) = make_torus_knot(TorusKnotParams::default(), ACCEPT_GRID - 1)?;
    let base = NormalField::torus_normal(&curve, torus);
    Ok(Setup { curve, base })
}

fn torus_ribbon(frac: f64) -> Result<FlatRibbon> {
    let s = torus_setup()?;
    let mu = mu_field(&s.base, ACCEPT_GRID)?;
    let w = frac * max_regular_width(&mu);
    FlatRibbon::from_mu(&s.base, w, mu)
}

/// Prescribed angle π/2 on the helix principal normal: `θ = -t/2`.
pub fn criterion_helix_ivp() -> Vec<Check> {
    let name = "c1_helix_pi2_sup_error";
    vec![or_fail(
        name,
        1e-6,
        (|| {
            let c = helix11()?;
            let base = NormalField::principal(&c);
            let phi = AnglePrescription::constant(FRAC_PI_2)?;
            let sol = solve_prescribed(&base, &phi, InitialCondition::at_start(0.0), 2000, 1e-6)?;
            let err = sol
                .grid()
                .iter()
                .zip(sol.values())
                .map(|(&t, &v)| (v + 0.5 * t).abs())
                .fold(0.0, f64::max);
            Ok(Check::at_most(name, err, 1e-6))
        })(),
    )]
}

/// Same-angle equation on the helix principal normal against the closed form.
pub fn criterion_case_b_solution() -> Vec<Check> {
    [FRAC_PI_4, FRAC_PI_2, PI, 1.5 * PI]
        .iter()
        .enumerate()
        .map(|(k, &q)| {
            let name = format!("c2_case_b_q{k}_sup_error");
            or_fail(
                &name.clone(),
                1e-6,
                (|| {
                    let c = helix11()?;
                    let base = NormalField::principal(&c);
                    let sol = solve_same_angle(&base, InitialCondition::at_start(q), 2000, 1e-8)?;
                    let exact = closed_form_case_b(q, Psi::Linear { torsion: 0.5 });
                    let err = sol
                        .grid()
                        .iter()
                        .zip(sol.values())
                        .map(|(&t, &v)| (v - crate::darboux::AngleFunction::value(&exact, t)).abs())
                        .fold(0.0, f64::max);
                    Ok(Check::at_most(name, err, 1e-6))
                })(),
            )
        })
        .collect()
}

/// Rotated torus-knot ribbons with the ruling angle of the torus-tangent
/// ribbon: flatness and angle agreement.
pub fn criterion_torus_family() -> Vec<Check> {
    let mut out = Vec::new();
    let cfg = RunConfig {
        grid: ACCEPT_GRID,
        phi: PhiSpec::Base,
        width: WidthSpec::OfMax(0.5),
        ..RunConfig::default()
    };
    let s = match torus_setup() {
        Ok(s) => s,
        Err(_) => return vec![Check::failed("c3_setup", 0.0)],
    };
    let base_mu = match mu_field(&s.base, ACCEPT_GRID) {
        Ok(m) => m,
        Err(_) => return vec![Check::failed("c3_base_ribbon", 0.0)],
    };
    for (k, q) in [-FRAC_PI_2, -FRAC_PI_3, -FRAC_PI_6].into_iter().enumerate() {
        let flat = format!("c3_q{k}_flatness_residual");
        let angle = format!("c3_q{k}_ruling_angle_error");
        match family_member(&s, &cfg, q).and_then(|m| {
            let rep = flatness_residuals(&m.ribbon, 400, 10)?;
            let residual = rep.max_ruling_normal.max(rep.max_ruling_twist).max(rep.max_f);
            let mu = m.ribbon.mu();
            let mut worst: f64 = 0.0;
            for i in 0..mu.len() {
                if mu.scalars()[i].kappa_n.abs() > 1e-4 {
                    worst = worst.max((arccot(mu.values()[i]) - arccot(base_mu.values()[i])).abs());
                }
            }
            Ok((residual, worst))
        }) {
            Ok((residual, worst)) => {
                out.push(Check::at_most(flat, residual, 1e-7));
                out.push(Check::at_most(angle, worst, 1e-5));
            }
            Err(_) => {
                out.push(Check::failed(flat, 1e-7));
                out.push(Check::failed(angle, 1e-5));
            }
        }
    }
    out
}

/// Closed finite-width energy against double Simpson quadrature.
pub fn criterion_energy_oracle() -> Vec<Check> {
    let name = "c4_closed_vs_quadrature_rel";
    vec![or_fail(
        name,
        1e-6,
        (|| {
            let r = torus_ribbon(0.5)?;
            let closed = bending_energy_closed(&r)?.value;
            let quad = bending_energy_quadrature(&r, 2001, 41)?.value;
            Ok(Check::at_most(name, rel(quad, closed), 1e-6))
        })(),
    )]
}

/// `e(w) = E(w)/w` approaches the limit at second order.
pub fn criterion_limit_law() -> Vec<Check> {
    let name = "c5_richardson_ratio_minus_4";
    vec![or_fail(
        name,
        0.5,
        (|| {
            let r = torus_ribbon(0.125)?;
            let w = r.half_width();
            let e0 = limit_energy(r.mu(), w).value / w;
            let e1 = bending_energy_closed_at(r.mu(), w)?.value / w;
            let e2 = bending_energy_closed_at(r.mu(), 0.5 * w)?.value / (0.5 * w);
            let ratio = (e1 - e0) / (e2 - e0);
            Ok(Check::at_most(name, (ratio - 4.0).abs(), 0.5))
        })(),
    )]
}

/// Rectifying developable of a helix: `E = wL/(2a²)`.
pub fn criterion_helix_energy() -> Vec<Check> {
    [(1.0, 1.0, 0.1), (3.0, 4.0, 0.05)]
        .into_iter()
        .enumerate()
        .map(|(k, (a, b, w))| {
            let name = format!("c6_helix{k}_rectifying_energy_rel");
            or_fail(
                &name.clone(),
                1e-12,
                (|| {
                    let c = make_helix(HelixParams::one_turn(a, b))?;
                    let mu = mu_field(&NormalField::principal(&c), ACCEPT_GRID)?;
                    let r = FlatRibbon::from_mu(&NormalField::principal(&c), w, mu)?;
                    let e = bending_energy_closed(&r)?.value;
                    Ok(Check::at_most(name, rel(e, w * c.length() / (2.0 * a * a)), 1e-12))
                })(),
            )
        })
        .collect()
}

/// `(argmax, max, argmin, min)` of `f` over `n` equally spaced `q ∈ [0, 2π)`.
fn scan(f: impl Fn(f64) -> f64, n: usize) -> (f64, f64, f64, f64) {
    let mut r = (0.0, f64::MIN, 0.0, f64::MAX);
    for k in 0..n {
        let q = TAU * k as f64 / n as f64;
        let e = f(q);
        if e > r.1 {
            r.0 = q;
            r.1 = e;
        }
        if e < r.3 {
            r.2 = q;
            r.3 = e;
        }
    }
    r
}

/// Vertex value of the parabola through `f(q - h), f(q), f(q + h)`.
fn parabolic_peak(f: impl Fn(f64) -> f64, q: f64, h: f64) -> f64 {
    let (a, b, c) = (f(q - h), f(q), f(q + h));
    let curv = a - 2.0 * b + c;
    if curv == 0.0 {
        b
    } else {
        b - (a - c) * (a - c) / (8.0 * curv)
    }
}

fn dist_mod_pi(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Analytic Case A extrema against a dense scan, plus the two degenerate cases.
pub fn criterion_case_a() -> Vec<Check> {
    const N: usize = 4096;
    let w = 0.1;
    let cell = TAU / N as f64;
    let mut out = Vec::new();
    match case_a_field(2.0, 0.0).and_then(|f| CaseA::new(&f, ACCEPT_GRID)) {
        Ok(ca) => {
            let ex = ca.extrema(w);
            let f = |q: f64| ca.energy(q, w);
            let (qmax, emax, qmin, emin) = scan(f, N);
            out.push(Check::at_most(
                "c7_argmax_cells",
                dist_mod_pi(qmax, ex.q_max) / cell,
                1.0,
            ));
            out.push(Check::at_most(
                "c7_argmin_cells",
                dist_mod_pi(qmin, ex.q_min) / cell,
                1.0,
            ));
            // Raw scan: off the extremum by at most R(1 - cos(cell)), never beyond it.
            let amp = 0.5 * (ex.e_max - ex.e_min);
            let slack = amp * (1.0 - cell.cos()) * (1.0 + 1e-9);
            let gap = (ex.e_max - emax).max(emin - ex.e_min);
            out.push(Check::at_most("c7_raw_scan_gap_minus_bound", gap - slack, 0.0));
            let beyond = (emax - ex.e_max).max(ex.e_min - emin);
            out.push(Check::at_most("c7_raw_scan_beyond_extrema", beyond, 1e-15 * ex.e_max));
            let peak_max = parabolic_peak(f, qmax, cell);
            let peak_min = parabolic_peak(f, qmin, cell);
            out.push(Check::at_most("c7_max_rel", rel(peak_max, ex.e_max), 1e-8));
            out.push(Check::at_most("c7_min_rel", rel(peak_min, ex.e_min), 1e-8));
        }
        Err(_) => out.push(Check::failed("c7_helix_case_a", 0.0)),
    }
    // B = 0, A ≠ 0: circle with its principal normal.
    let circle =
        make_helix(HelixParams::new(1.0, 0.0, TAU)).and_then(|c| CaseA::new(&NormalField::principal(&c), ACCEPT_GRID));
    match circle {
        Ok(ca) => {
            let ex = ca.extrema(w);
            let (_, emax, _, emin) = scan(|q| ca.energy(q, w), N);
            let expected_max = 0.5 * w * ca.int_kn2;
            let expected_min = 0.5 * w * ca.int_kg2;
            out.push(Check::at_most("c7_b0_b_abs", ex.b.abs(), 1e-12));
            out.push(Check::at_most(
                "c7_b0_max_rel",
                rel(emax, expected_max).max(rel(ex.e_max, expected_max)),
                1e-8,
            ));
            out.push(Check::at_most(
                "c7_b0_min_abs",
                (emin - expected_min).abs().max((ex.e_min - expected_min).abs()),
                1e-12,
            ));
        }
        Err(_) => out.push(Check::failed("c7_b0", 0.0)),
    }
    // A = B = 0: the helix Case A field over r = π.
    match case_a_field(2.0 * PI, 0.0).and_then(|f| CaseA::new(&f, ACCEPT_GRID)) {
        Ok(ca) => {
            let quarter = 0.25 * w * (ca.int_kn2 + ca.int_kg2);
            let (_, emax, _, emin) = scan(|q| ca.energy(q, w), N);
            out.push(Check::at_most("c7_ab0_ab_abs", ca.a().abs().max(ca.b().abs()), 1e-10));
            out.push(Check::at_most(
                "c7_ab0_flat_rel",
                rel(emax, quarter).max(rel(emin, quarter)),
                1e-8,
            ));
        }
        Err(_) => out.push(Check::failed("c7_ab0", 0.0)),
    }
    out
}

/// Closed-form helix ratios and their quadrature oracle.
pub fn criterion_ratios() -> Vec<Check> {
    let mut out = vec![
        Check::at_most(
            "c8_ratio_b_pi_r1",
            (helix_ratio_b(PI, 1.0) - (2.0 - FRAC_PI_2)).abs(),
            1e-10,
        ),
        Check::at_most(
            "c8_ratio_a_q0",
            [0.5, 1.0, 2.0, 3.0, 4.0, 1e4]
                .iter()
                .map(|&r| (helix_ratio_a(0.0, r) - 1.0).abs())
                .fold(0.0, f64::max),
            0.0,
        ),
    ];
    for r in [1.0, 2.0, 3.0, 4.0] {
        let name = format!("c8_ratio_b_quadrature_r{r}");
        out.push(or_fail(
            &name.clone(),
            1e-6,
            (|| {
                let c = make_helix(HelixParams::new(1.0, 1.0, 2.0 * r))?;
                let cb = CaseB::new(&c, ACCEPT_GRID)?;
                let w = 0.1;
                let e_n = w * c.length() / 2.0;
                let worst = (0..64)
                    .map(|k| {
                        let q = TAU * k as f64 / 64.0;
                        rel(cb.energy(q, w) / e_n, helix_ratio_b(q, r))
                    })
                    .fold(0.0, f64::max);
                Ok(Check::at_most(name, worst, 1e-6))
            })(),
        ));
    }
    let far = (1..64)
        .map(|k| {
            let q = TAU * k as f64 / 64.0;
            (helix_ratio_a(q, 1e4) - 1.0)
                .abs()
                .max((helix_ratio_b(q, 1e4) - 1.0).abs())
        })
        .fold(0.0, f64::max);
    out.push(Check::at_most("c8_ratios_large_r", far, 1e-3));
    out
}

/// Comparison bounds over 64-point sweeps of both special families.
pub fn criterion_bounds() -> Vec<Check> {
    let w = 0.1;
    let mut out = Vec::new();
    let a = (|| {
        let field = case_a_field(2.0, 0.0)?;
        let ca = CaseA::new(&field, ACCEPT_GRID)?;
        let mu = mu_field(&field, ACCEPT_GRID)?;
        Ok::<_, crate::error::RibbonError>((ca, comparison_bounds(&mu, w)))
    })();
    match a {
        Ok((ca, (e_n, add, ratio))) => {
            let (mut over_add, mut over_ratio) = (f64::MIN, f64::MIN);
            for k in 0..64 {
                let e_v = ca.energy(TAU * k as f64 / 64.0, w);
                over_add = over_add.max(e_v - add);
                if let Some(r) = ratio {
                    over_ratio = over_ratio.max(e_v - r * e_n);
                }
            }
            out.push(Check::at_most("c9_case_a_additive_excess", over_add, 1e-12));
            out.push(Check::at_most("c9_case_a_ratio_excess", over_ratio, 1e-12));
        }
        Err(_) => out.push(Check::failed("c9_case_a", 1e-12)),
    }
    let b = (|| {
        let c = helix11()?;
        let cb = CaseB::new(&c, ACCEPT_GRID)?;
        let mu = mu_field(&NormalField::principal(&c), ACCEPT_GRID)?;
        Ok::<_, crate::error::RibbonError>((cb, comparison_bounds(&mu, w)))
    })();
    match b {
        Ok((cb, (e_n, add, ratio))) => {
            let (mut over_add, mut over_ratio) = (f64::MIN, f64::MIN);
            for k in 0..64 {
                let e_v = cb.energy(TAU * k as f64 / 64.0, w);
                over_add = over_add.max(e_v - add);
                if let Some(r) = ratio {
                    over_ratio = over_ratio.max(e_v - r * e_n);
                }
            }
            out.push(Check::at_most("c9_case_b_additive_excess", over_add, 1e-12));
            out.push(Check::at_most("c9_case_b_ratio_excess", over_ratio, 1e-12));
        }
        Err(_) => out.push(Check::failed("c9_case_b", 1e-12)),
    }
    out
}

/// Rotation by `π - 2 atan2(κ_g, κ_n)` keeps the geodesic curvature.
pub fn criterion_isometric_pair() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let s = DarbouxScalars::new(
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
        );
        if let Ok(th) = isometric_partner_angle(&s) {
            worst = worst.max((rotate(&s, th, 0.0).kappa_g - s.kappa_g).abs());
        } else {
            worst = f64::NAN;
        }
    }
    let name = "c10_partner_kappa_g_on_helix";
    let helix = or_fail(
        name,
        1e-10,
        (|| {
            let c = helix11()?;
            let base = frenet_rotation_field(&c, FRAC_PI_3, 201)?;
            let b2 = base.clone();
            let partner = base.rotated(Arc::new(FnAngle::new(
                move |t| {
                    darboux_scalars(&b2, t)
                        .and_then(|s| isometric_partner_angle(&s))
                        .unwrap_or(f64::NAN)
                },
                1e-4,
            )));
            let mut worst: f64 = 0.0;
            for t in c.grid(201) {
                let a = darboux_scalars(&base, t)?.kappa_g;
                let b = darboux_scalars(&partner, t)?.kappa_g;
                worst = worst.max((a - b).abs());
            }
            Ok(Check::at_most(name, worst, 1e-10))
        })(),
    );
    vec![Check::at_most("c10_partner_kappa_g_random", worst, 1e-12), helix]
}

/// All config-independent criteria, grouped by criterion number.
pub fn criteria() -> Vec<(usize, Vec<Check>)> {
    vec![
        (1, criterion_helix_ivp()),
        (2, criterion_case_b_solution()),
        (3, criterion_torus_family()),
        (4, criterion_energy_oracle()),
        (5, criterion_limit_law()),
        (6, criterion_helix_energy()),
        (7, criterion_case_a()),
        (8, criterion_ratios()),
        (9, criterion_bounds()),
        (10, criterion_isometric_pair()),
    ]
}

/// Invariant checks on the configured curve and field.
pub fn invariant_checks(cfg: &RunConfig, samples: Option<&[[f64; 4]]>) -> Vec<Check> {
    let s = match setup(cfg, samples) {
        Ok(s) => s,
        Err(_) => return vec![Check::failed("setup", 0.0)],
    };
    let grid = s.curve.grid(201);
    let mut out = Vec::new();

    out.push(Check::at_most(
        "unit_speed",
        s.curve.unit_speed_defect(201, 1e-3 * s.curve.length() / 100.0),
        1e-8,
    ));
    out.push(or_fail(
        "frame_orthonormality",
        1e-10,
        (|| {
            let mut worst: f64 = 0.0;
            for &t in &grid {
                worst = worst.max(s.base.frame(t)?.orthonormality_defect());
            }
            Ok(Check::at_most("frame_orthonormality", worst, 1e-10))
        })(),
    ));
    out.push(or_fail(
        "pythagoras",
        1e-8,
        (|| {
            let mut worst: f64 = 0.0;
            for &t in &grid {
                let sc = darboux_scalars(&s.base, t)?;
                let k = s.curve.frenet(t).curvature;
                worst = worst.max((sc.kappa_g.powi(2) + sc.kappa_n.powi(2) - k * k).abs());
            }
            Ok(Check::at_most("pythagoras", worst, 1e-8))
        })(),
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut group: f64 = 0.0;
    for _ in 0..200 {
        let sc = DarbouxScalars::new(
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        );
        let (a, da, b, db): (f64, f64, f64, f64) = (
            rng.gen_range(-7.0..7.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-7.0..7.0),
            rng.gen_range(-2.0..2.0),
        );
        let two = rotate(&rotate(&sc, a, da), b, db);
        let one = rotate(&sc, a + b, da + db);
        group = group
            .max((two.kappa_g - one.kappa_g).abs())
            .max((two.kappa_n - one.kappa_n).abs())
            .max((two.tau_g - one.tau_g).abs());
    }
    out.push(Check::at_most("rotation_group_action", group, 1e-12));

    let q0 = cfg.q_values[0];
    out.push(or_fail(
        "gronwall_continuity",
        0.0,
        (|| {
            let dq = 1e-3;
            let a = solve_member_theta(&s, cfg, q0)?;
            let b = solve_member_theta(&s, cfg, q0 + dq)?;
            let mu = mu_field(&s.base, cfg.grid)?;
            let cot: Vec<f64> = match cfg.phi {
                PhiSpec::Base => mu.values().to_vec(),
                PhiSpec::Constant(phi) => vec![1.0 / phi.tan(); mu.len()],
            };
            let c = lipschitz_bound(mu.scalars(), &cot);
            let mut excess = f64::MIN;
            for (i, &t) in a.grid().iter().enumerate() {
                let bound = dq * (c * t).exp() * (1.0 + 1e-6) + 1e-12;
                excess = excess.max((a.values()[i] - b.values()[i]).abs() - bound);
            }
            Ok(Check::at_most("gronwall_continuity", excess, 0.0))
        })(),
    ));
    if cfg.phi == PhiSpec::Base {
        out.push(or_fail(
            "ivp_midpoint_residual",
            1e-6,
            (|| {
                let sol = solve_member_theta(&s, cfg, q0)?;
                let rhs = |t: f64, y: f64| rhs_same_angle(t, y, &darboux_scalars(&s.base, t)?);
                Ok(Check::at_most(
                    "ivp_midpoint_residual",
                    sol.midpoint_residual(&rhs)?,
                    1e-6,
                ))
            })(),
        ));
    }

    let ribbon = base_ribbon(&s, cfg).map(|r| r.with_ruling_perturbation(cfg.inject_fault));
    out.push(or_fail(
        "flatness_ruling_normal",
        1e-8,
        (|| {
            let rep = flatness_residuals(ribbon.as_ref().map_err(Clone::clone)?, cfg.mesh_nt, cfg.mesh_nu)?;
            Ok(Check::at_most(
                "flatness_ruling_normal",
                rep.max_ruling_normal.max(rep.max_f),
                1e-8,
            ))
        })(),
    ));
    out.push(or_fail(
        "flatness_ruling_twist",
        1e-7,
        (|| {
            let rep = flatness_residuals(ribbon.as_ref().map_err(Clone::clone)?, cfg.mesh_nt, cfg.mesh_nu)?;
            Ok(Check::at_most("flatness_ruling_twist", rep.max_ruling_twist, 1e-7))
        })(),
    ));
    out.push(or_fail(
        "energy_closed_vs_quadrature",
        1e-6,
        (|| {
            let r = ribbon.as_ref().map_err(Clone::clone)?;
            let closed = bending_energy_closed(r)?.value;
            let quad = bending_energy_quadrature(r, cfg.grid, cfg.quad_nu)?.value;
            let d = if closed == 0.0 { quad.abs() } else { rel(quad, closed) };
            Ok(Check::at_most("energy_closed_vs_quadrature", d, 1e-6))
        })(),
    ));
    out.push(or_fail(
        "energy_limit_law",
        0.5,
        (|| {
            let r = ribbon.as_ref().map_err(Clone::clone)?;
            let mu: &MuField = r.mu();
            let w_max = max_regular_width(mu);
            if !w_max.is_finite() {
                // λ ≡ 0: the closed form equals the limit formula exactly.
                let w = r.half_width();
                let d = rel(bending_energy_closed_at(mu, w)?.value, limit_energy(mu, w).value);
                return Ok(Check::at_most("energy_limit_law", d, 1e-12));
            }
            let w = w_max / 8.0;
            let e0 = limit_energy(mu, w).value / w;
            let e1 = bending_energy_closed_at(mu, w)?.value / w;
            let e2 = bending_energy_closed_at(mu, 0.5 * w)?.value / (0.5 * w);
            Ok(Check::at_most(
                "energy_limit_law",
                ((e1 - e0) / (e2 - e0) - 4.0).abs(),
                0.5,
            ))
        })(),
    ));
    out
}

/// Invariant checks followed by every acceptance criterion.
pub fn run_all(cfg: &RunConfig, samples: Option<&[[f64; 4]]>) -> Vec<Check> {
    let mut out = invariant_checks(cfg, samples);
    for (_, checks) in criteria() {
        out.extend(checks);
    }
    out
}
