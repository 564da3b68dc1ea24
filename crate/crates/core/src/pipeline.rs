//! Turns a `RunConfig` into curves, normal fields and ribbon families.

use std::sync::Arc;

use crate::config::{CurveSpec, NormalSpec, PhiSpec, RunConfig, WidthSpec};
use crate::curve::{
    arc_length_reparametrize, make_helix, make_torus_knot, ArcLengthCurve, HelixParams, SplineCurve, TorusKnotParams,
};
use crate::darboux::{ConstantAngle, NormalField};
use crate::error::{Result, RibbonError};
use crate::ivp::{solve_prescribed, solve_same_angle, AnglePrescription, InitialCondition, ThetaSolution};
use crate::ribbon::{max_regular_width, mu_field, FlatRibbon, MuField};

/// Length tolerance used when reparametrizing sampled or parametric curves.
pub const LENGTH_TOL: f64 = 1e-9;

/// The curve and the base normal field of a run.
#[derive(Debug, Clone)]
pub struct Setup {
    pub curve: ArcLengthCurve,
    pub base: NormalField,
}

/// Builds the curve (sampled rows must be supplied for `kind = samples`)
/// and the base field, rotated by the configured constant offset.
pub fn setup(cfg: &RunConfig, samples: Option<&[[f64; 4]]>) -> Result<Setup> {
    let cells = cfg.grid - 1;
    let (curve, torus) = match &cfg.curve {
        CurveSpec::Helix { a, b, length } => {
            let p = match length {
                Some(l) => HelixParams::new(*a, *b, *l),
                None => HelixParams::one_turn(*a, *b),
            };
            (make_helix(p)?, None)
        }
        CurveSpec::TorusKnot { major, minor, winding } => {
            let (c, t) = make_torus_knot(
                TorusKnotParams {
                    major: *major,
                    minor: *minor,
                    winding: *winding as i32,
                },
                cells,
            )?;
            (c, Some(t))
        }
        CurveSpec::Samples { .. } => {
            let rows = samples.ok_or_else(|| RibbonError::InvalidParams("sample rows missing".into()))?;
            let spline = SplineCurve::from_samples(rows)?;
            (arc_length_reparametrize(Arc::new(spline), cells, LENGTH_TOL)?, None)
        }
    };
    let base = match cfg.normal {
        NormalSpec::Principal => NormalField::principal(&curve),
        NormalSpec::TorusNormal => {
            let torus = torus.ok_or_else(|| RibbonError::InvalidParams("torus normal needs a torus knot".into()))?;
            NormalField::torus_normal(&curve, torus)
        }
        NormalSpec::RotationMinimizing => NormalField::rotation_minimizing(&curve, 2 * cfg.grid - 1),
    };
    let base = if cfg.offset != 0.0 {
        base.rotated(Arc::new(ConstantAngle(cfg.offset)))
    } else {
        base
    };
    Ok(Setup { curve, base })
}

/// Half-width from the configured width. A fraction of `w_max` refers to
/// `1/max κ` when `w_max` is unbounded (`λ ≡ 0`).
pub fn resolve_width(spec: WidthSpec, mu: &MuField) -> f64 {
    match spec {
        WidthSpec::Absolute(w) => w,
        WidthSpec::OfMax(f) => {
            let w_max = max_regular_width(mu);
            if w_max.is_finite() {
                f * w_max
            } else {
                let kappa = mu.scalars().iter().map(|s| s.curvature()).fold(0.0, f64::max);
                if kappa > 0.0 {
                    f / kappa
                } else {
                    f
                }
            }
        }
    }
}

/// The ribbon on the base field at the configured width.
pub fn base_ribbon(setup: &Setup, cfg: &RunConfig) -> Result<FlatRibbon> {
    let mu = mu_field(&setup.base, cfg.grid)?;
    let w = resolve_width(cfg.width, &mu);
    FlatRibbon::from_mu(&setup.base, w, mu)
}

/// One ribbon of the initial-condition circle: `θ(0) = q`.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub q: f64,
    pub theta: ThetaSolution,
    pub field: NormalField,
    pub ribbon: FlatRibbon,
}

/// Solves for `θ` with `θ(0) = q` (same-angle equation for `phi = base`,
/// prescribed-angle equation otherwise) and builds the ribbon on `N(θ)`.
pub fn solve_member_theta(setup: &Setup, cfg: &RunConfig, q: f64) -> Result<ThetaSolution> {
    let ic = InitialCondition::at_start(q);
    match cfg.phi {
        PhiSpec::Base => solve_same_angle(&setup.base, ic, cfg.grid - 1, cfg.tol),
        PhiSpec::Constant(phi) => solve_prescribed(
            &setup.base,
            &AnglePrescription::constant(phi)?,
            ic,
            cfg.grid - 1,
            cfg.tol,
        ),
    }
}

pub fn family_member(setup: &Setup, cfg: &RunConfig, q: f64) -> Result<FamilyMember> {
    let theta = solve_member_theta(setup, cfg, q)?;
    let field = setup.base.rotated(Arc::new(theta.clone()));
    let mu = mu_field(&field, cfg.grid)?;
    let w = resolve_width(cfg.width, &mu);
    let ribbon = FlatRibbon::from_mu(&field, w, mu)?;
    Ok(FamilyMember {
        q,
        theta,
        field,
        ribbon,
    })
}
