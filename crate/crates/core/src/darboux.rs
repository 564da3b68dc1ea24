//! Darboux frames `(T, H, N)` along a curve with respect to a unit normal
//! field, the scalars `(κ_g, κ_n, τ_g)`, and rotations of the frame about
//! the tangent.

use std::fmt;
use std::sync::Arc;

use crate::curve::{ArcLengthCurve, Torus, Vec3, KAPPA_MIN};
use crate::error::{Result, RibbonError};
use crate::quadrature::{hermite, uniform_cell};

/// Geodesic curvature, normal curvature and geodesic torsion.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DarbouxScalars {
    pub kappa_g: f64,
    pub kappa_n: f64,
    pub tau_g: f64,
}

impl DarbouxScalars {
    pub fn new(kappa_g: f64, kappa_n: f64, tau_g: f64) -> Self {
        Self {
            kappa_g,
            kappa_n,
            tau_g,
        }
    }

    /// `√(κ_g² + κ_n²)`, the curvature of the curve.
    pub fn curvature(&self) -> f64 {
        self.kappa_g.hypot(self.kappa_n)
    }
}

/// Orthonormal frame with `H = N × T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarbouxFrame {
    pub t: Vec3,
    pub h: Vec3,
    pub n: Vec3,
}

impl DarbouxFrame {
    /// Largest deviation from orthonormality and right-handedness.
    pub fn orthonormality_defect(&self) -> f64 {
        let dots = [self.t.dot(&self.h), self.t.dot(&self.n), self.h.dot(&self.n)];
        let norms = [self.t.norm(), self.h.norm(), self.n.norm()];
        let hand = self.t.cross(&self.h).dot(&self.n) - 1.0;
        dots.iter()
            .map(|d| d.abs())
            .chain(norms.iter().map(|n| (n - 1.0).abs()))
            .chain(std::iter::once(hand.abs()))
            .fold(0.0, f64::max)
    }
}

/// Derivatives `(T', H', N')` of a Darboux frame from its scalars.
pub fn frame_derivative(frame: &DarbouxFrame, s: &DarbouxScalars) -> [Vec3; 3] {
    let DarbouxFrame { t, h, n } = *frame;
    [
        h * s.kappa_g + n * s.kappa_n,
        -t * s.kappa_g + n * s.tau_g,
        -t * s.kappa_n - h * s.tau_g,
    ]
}

/// Scalars of the frame rotated about the tangent by `theta` (with
/// derivative `dtheta`).
pub fn rotate(s: &DarbouxScalars, theta: f64, dtheta: f64) -> DarbouxScalars {
    let (sn, cs) = theta.sin_cos();
    DarbouxScalars {
        kappa_g: s.kappa_g * cs + s.kappa_n * sn,
        kappa_n: -s.kappa_g * sn + s.kappa_n * cs,
        tau_g: dtheta + s.tau_g,
    }
}

/// Rotation angle `θ(t)` with its derivative.
pub trait AngleFunction: Send + Sync {
    fn value(&self, t: f64) -> f64;
    fn derivative(&self, t: f64) -> f64;
}

/// `θ ≡ c`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantAngle(pub f64);

impl AngleFunction for ConstantAngle {
    fn value(&self, _t: f64) -> f64 {
        self.0
    }
    fn derivative(&self, _t: f64) -> f64 {
        0.0
    }
}

/// `θ(t) = offset + slope·t`.
#[derive(Debug, Clone, Copy)]
pub struct LinearAngle {
    pub offset: f64,
    pub slope: f64,
}

impl AngleFunction for LinearAngle {
    fn value(&self, t: f64) -> f64 {
        self.offset + self.slope * t
    }
    fn derivative(&self, _t: f64) -> f64 {
        self.slope
    }
}

/// Angle given by a closure; the derivative is a fourth-order central
/// difference with step `h`.
pub struct FnAngle<F> {
    f: F,
    h: f64,
}

impl<F: Fn(f64) -> f64 + Send + Sync> FnAngle<F> {
    pub fn new(f: F, h: f64) -> Self {
        Self { f, h }
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync> AngleFunction for FnAngle<F> {
    fn value(&self, t: f64) -> f64 {
        (self.f)(t)
    }
    fn derivative(&self, t: f64) -> f64 {
        let (f, h) = (&self.f, self.h);
        (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h)
    }
}

/// A unit normal vector and its arc-length derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub n: Vec3,
    pub dn: Vec3,
}

/// Unit vector field along a curve, always orthogonal to the tangent.
#[derive(Clone)]
pub struct NormalField {
    curve: ArcLengthCurve,
    kind: Arc<FieldKind>,
}

enum FieldKind {
    Principal,
    Torus(Torus),
    RotationMinimizing(RmfTable),
    Rotated {
        base: NormalField,
        angle: Arc<dyn AngleFunction>,
    },
    Perturbed {
        base: NormalField,
        direction: Vec3,
        amount: f64,
    },
}

impl fmt::Debug for NormalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match &*self.kind {
            FieldKind::Principal => "Principal".to_string(),
            FieldKind::Torus(t) => format!("Torus({}, {})", t.major, t.minor),
            FieldKind::RotationMinimizing(r) => format!("RotationMinimizing({} nodes)", r.grid.len()),
            FieldKind::Rotated { base, .. } => format!("Rotated({base:?})"),
            FieldKind::Perturbed { base, amount, .. } => format!("Perturbed({base:?}, {amount})"),
        };
        write!(f, "NormalField::{name}")
    }
}

/// Rotation-minimizing field sampled on a uniform grid (double reflection).
struct RmfTable {
    grid: Vec<f64>,
    normals: Vec<Vec3>,
    derivs: Vec<Vec3>,
}

impl NormalField {
    /// Principal normal `T'/|T'|`; undefined where the curvature vanishes.
    pub fn principal(curve: &ArcLengthCurve) -> Self {
        Self {
            curve: curve.clone(),
            kind: Arc::new(FieldKind::Principal),
        }
    }

    /// Outward normal of a torus the curve lies on.
    pub fn torus_normal(curve: &ArcLengthCurve, torus: Torus) -> Self {
        Self {
            curve: curve.clone(),
            kind: Arc::new(FieldKind::Torus(torus)),
        }
    }

    /// Rotation-minimizing (parallel-transport) field seeded at `t = 0` with
    /// the principal normal, or with an arbitrary normal when `κ(0) = 0`.
    pub fn rotation_minimizing(curve: &ArcLengthCurve, grid_size: usize) -> Self {
        let grid = curve.grid(grid_size.max(2));
        let jets: Vec<_> = grid.iter().map(|&t| curve.jet(t)).collect();
        let f0 = curve.frenet(0.0);
        let seed = f0.principal_normal.unwrap_or_else(|| {
            let t = f0.tangent;
            let pick = if t.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
            (pick - t * t.dot(&pick)).normalize()
        });
        let mut normals = Vec::with_capacity(grid.len());
        normals.push(seed);
        for i in 0..grid.len() - 1 {
            let (a, b) = (&jets[i], &jets[i + 1]);
            let r = normals[i];
            let v1 = b.pos - a.pos;
            let c1 = v1.norm_squared();
            let r_l = r - v1 * (2.0 / c1 * v1.dot(&r));
            let t_l = a.d1 - v1 * (2.0 / c1 * v1.dot(&a.d1));
            let v2 = b.d1 - t_l;
            let c2 = v2.norm_squared();
            let next = if c2 > 0.0 {
                r_l - v2 * (2.0 / c2 * v2.dot(&r_l))
            } else {
                r_l
            };
            let next = (next - b.d1 * b.d1.dot(&next)).normalize();
            normals.push(next);
        }
        let derivs = normals.iter().zip(&jets).map(|(n, j)| -j.d1 * j.d2.dot(n)).collect();
        Self {
            curve: curve.clone(),
            kind: Arc::new(FieldKind::RotationMinimizing(RmfTable { grid, normals, derivs })),
        }
    }

    pub fn curve(&self) -> &ArcLengthCurve {
        &self.curve
    }

    /// `N(t)` and `N'(t)`.
    pub fn sample(&self, t: f64) -> Result<FieldSample> {
        match &*self.kind {
            FieldKind::Principal => {
                let j = self.curve.jet(t);
                let kappa = j.d2.norm();
                if kappa <= KAPPA_MIN {
                    return Err(RibbonError::VanishingCurvature { t, kappa });
                }
                let n = j.d2 / kappa;
                let dn = j.d3 / kappa - j.d2 * (j.d2.dot(&j.d3) / kappa.powi(3));
                Ok(FieldSample { n, dn })
            }
            FieldKind::Torus(torus) => {
                let j = self.curve.jet(t);
                let (n, dn) = torus.normal_with_derivative(&j.pos, &j.d1);
                Ok(FieldSample { n, dn })
            }
            FieldKind::RotationMinimizing(table) => {
                let j = self.curve.jet(t);
                let i = uniform_cell(&table.grid, t);
                let (t0, t1) = (table.grid[i], table.grid[i + 1]);
                let mut n = Vec3::zeros();
                for k in 0..3 {
                    n[k] = hermite(
                        t0,
                        t1,
                        table.normals[i][k],
                        table.normals[i + 1][k],
                        table.derivs[i][k],
                        table.derivs[i + 1][k],
                        t,
                    )
                    .0;
                }
                let n = (n - j.d1 * j.d1.dot(&n)).normalize();
                let dn = -j.d1 * j.d2.dot(&n);
                Ok(FieldSample { n, dn })
            }
            FieldKind::Rotated { base, angle } => {
                let j = self.curve.jet(t);
                let b = base.sample(t)?;
                let h = b.n.cross(&j.d1);
                let dh = b.dn.cross(&j.d1) + b.n.cross(&j.d2);
                let theta = angle.value(t);
                let dtheta = angle.derivative(t);
                let (sn, cs) = theta.sin_cos();
                let n = -h * sn + b.n * cs;
                let dn = -h * (dtheta * cs) - dh * sn - b.n * (dtheta * sn) + b.dn * cs;
                Ok(FieldSample { n, dn })
            }
            FieldKind::Perturbed {
                base,
                direction,
                amount,
            } => {
                let b = base.sample(t)?;
                Ok(FieldSample {
                    n: (b.n + direction * *amount).normalize(),
                    dn: b.dn,
                })
            }
        }
    }

    /// Darboux frame at `t`.
    pub fn frame(&self, t: f64) -> Result<DarbouxFrame> {
        let tangent = self.curve.tangent(t);
        let n = self.sample(t)?.n;
        Ok(DarbouxFrame {
            t: tangent,
            h: n.cross(&tangent),
            n,
        })
    }

    /// The field rotated about the tangent by `θ(t)`.
    pub fn rotated(&self, angle: Arc<dyn AngleFunction>) -> Self {
        Self {
            curve: self.curve.clone(),
            kind: Arc::new(FieldKind::Rotated {
                base: self.clone(),
                angle,
            }),
        }
    }

    /// Field tilted by a constant vector and renormalized; only used to
    /// inject faults into invariant checks.
    pub fn perturbed(&self, direction: Vec3, amount: f64) -> Self {
        Self {
            curve: self.curve.clone(),
            kind: Arc::new(FieldKind::Perturbed {
                base: self.clone(),
                direction,
                amount,
            }),
        }
    }

    /// Largest `|⟨N, T⟩|` and `| |N| - 1 |` over `n` nodes.
    pub fn normality_defect(&self, n: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for t in self.curve.grid(n) {
            let s = self.sample(t)?;
            let tangent = self.curve.tangent(t);
            worst = worst.max(s.n.dot(&tangent).abs()).max((s.n.norm() - 1.0).abs());
        }
        Ok(worst)
    }
}

/// `κ_g = ⟨T', H⟩`, `κ_n = ⟨T', N⟩`, `τ_g = ⟨H', N⟩` at arc length `t`.
pub fn darboux_scalars(field: &NormalField, t: f64) -> Result<DarbouxScalars> {
    let j = field.curve.jet(t);
    let s = field.sample(t)?;
    let dot = s.n.dot(&j.d1);
    if dot.abs() > 1e-8 {
        return Err(RibbonError::NonOrthogonalNormal { t, dot });
    }
    let h = s.n.cross(&j.d1);
    let dh = s.dn.cross(&j.d1) + s.n.cross(&j.d2);
    Ok(DarbouxScalars {
        kappa_g: j.d2.dot(&h),
        kappa_n: j.d2.dot(&s.n),
        tau_g: dh.dot(&s.n),
    })
}

/// Rotates the field about the tangent by `θ(t)`.
pub fn rotate_field(field: &NormalField, angle: Arc<dyn AngleFunction>) -> NormalField {
    field.rotated(angle)
}

/// The field `cos(x) P + sin(x) B` (principal normal rotated by the
/// constant `x`), whose geodesic torsion is the torsion and whose normal
/// curvature is `κ cos x`. Checks `κ > KAPPA_MIN` on `grid_size` nodes.
pub fn frenet_rotation_field(curve: &ArcLengthCurve, x: f64, grid_size: usize) -> Result<NormalField> {
    for t in curve.grid(grid_size.max(2)) {
        let kappa = curve.frenet(t).curvature;
        if kappa <= KAPPA_MIN {
            return Err(RibbonError::VanishingCurvature { t, kappa });
        }
    }
    Ok(NormalField::principal(curve).rotated(Arc::new(ConstantAngle(x))))
}

/// Constant rotation `π - 2θ̄`, `θ̄ = atan2(κ_g, κ_n)`, that leaves the
/// geodesic curvature unchanged.
pub fn isometric_partner_angle(s: &DarbouxScalars) -> Result<f64> {
    let kappa = s.curvature();
    if kappa <= KAPPA_MIN {
        return Err(RibbonError::VanishingCurvature { t: f64::NAN, kappa });
    }
    Ok(std::f64::consts::PI - 2.0 * s.kappa_g.atan2(s.kappa_n))
}
