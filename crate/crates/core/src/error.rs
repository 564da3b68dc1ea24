use thiserror::Error;

/// Errors raised by curve, frame, ribbon, IVP and energy operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RibbonError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("curve is not regular at parameter {param} (|c'| = {speed:e})")]
    NonRegularCurve { param: f64, speed: f64 },

    #[error("arc-length table error estimate {estimate:e} exceeds tolerance {tol:e}")]
    ToleranceNotMet { estimate: f64, tol: f64 },

    #[error("normal field is not orthogonal to the tangent at t = {t} (<N,T> = {dot:e})")]
    NonOrthogonalNormal { t: f64, dot: f64 },

    #[error("curvature vanishes at t = {t} (kappa = {kappa:e})")]
    VanishingCurvature { t: f64, kappa: f64 },

    #[error("normal curvature vanishes at t = {t}; use the prescribed-angle equation instead")]
    NormalCurvatureZero { t: f64 },

    #[error("ruling is singular at t = {t}: kappa_n = 0 while tau_g = {tau_g:e}")]
    SingularRuling { t: f64, tau_g: f64 },

    #[error("continuous extension of tau_g/kappa_n at t = {t} needs more than {max_order} derivatives")]
    ExtensionOrderExceeded { t: f64, max_order: usize },

    #[error("half-width {w} exceeds the maximal regular half-width {w_max}")]
    WidthTooLarge { w: f64, w_max: f64 },

    #[error("point (t = {t}, u = {u}) lies outside the regular domain (1 + u*lambda = {area:e})")]
    OutsideRegularDomain { t: f64, u: f64, area: f64 },

    #[error("degenerate metric: EG - F^2 = {0:e}")]
    DegenerateMetric(f64),

    #[error("integrator failed: error estimate {estimate:e} above {tol:e} after refining to step {step:e}")]
    StepSizeUnderflow { step: f64, estimate: f64, tol: f64 },

    #[error("ruling angles differ by {max_diff:e} at t = {t}")]
    RulingAngleMismatch { t: f64, max_diff: f64 },

    #[error("normal field is not of case A type (max |tau_g| = {max_tau_g:e})")]
    NotCaseA { max_tau_g: f64 },
}

pub type Result<T> = std::result::Result<T, RibbonError>;
