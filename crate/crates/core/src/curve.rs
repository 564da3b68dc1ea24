//! Smooth regular space curves, arc-length reparametrization, Frenet data and
//! the built-in example curves (circular helix, torus knots, sampled splines).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;

use crate::error::{Result, RibbonError};
use crate::quadrature::{central_derivatives, hermite, simpson, uniform_grid};

pub type Vec3 = Vector3<f64>;

/// Curvature below which the principal normal and torsion are reported absent.
pub const KAPPA_MIN: f64 = 1e-9;

/// Position and the first three derivatives at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub pos: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
    pub d3: Vec3,
}

/// A regular curve in an arbitrary parametrization.
///
/// Implementors must provide positions; derivatives default to fourth-order
/// central differences with step `1e-4` times the domain length.
pub trait ParamCurve: Send + Sync {
    fn domain(&self) -> (f64, f64);

    fn position(&self, s: f64) -> Vec3;

    fn jet(&self, s: f64) -> Jet {
        let (s0, s1) = self.domain();
        let h = (s1 - s0) * 1e-4;
        // Per coordinate: first three derivatives.
        let c: [_; 3] = std::array::from_fn(|k| central_derivatives(|x| self.position(x)[k], s, h));
        let d = |order: usize| Vec3::new(c[0][order], c[1][order], c[2][order]);
        Jet {
            pos: self.position(s),
            d1: d(0),
            d2: d(1),
            d3: d(2),
        }
    }

    fn velocity(&self, s: f64) -> Vec3 {
        self.jet(s).d1
    }
}

/// A curve given by a position closure only; derivatives come from finite
/// differences.
pub struct FnCurve<F> {
    f: F,
    domain: (f64, f64),
}

impl<F: Fn(f64) -> Vec3 + Send + Sync> FnCurve<F> {
    pub fn new(f: F, s0: f64, s1: f64) -> Self {
        Self { f, domain: (s0, s1) }
    }
}

impl<F: Fn(f64) -> Vec3 + Send + Sync> ParamCurve for FnCurve<F> {
    fn domain(&self) -> (f64, f64) {
        self.domain
    }

    fn position(&self, s: f64) -> Vec3 {
        (self.f)(s)
    }
}

/// Circular helix of radius `a` and pitch `2πb`, sampled over arc length `length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelixParams {
    pub a: f64,
    pub b: f64,
    pub length: f64,
}

impl HelixParams {
    pub fn new(a: f64, b: f64, length: f64) -> Self {
        Self { a, b, length }
    }

    /// One full turn of the major angle.
    pub fn one_turn(a: f64, b: f64) -> Self {
        Self::new(a, b, 2.0 * PI * (a * a + b * b).sqrt())
    }

    pub fn curvature(&self) -> f64 {
        self.a / (self.a * self.a + self.b * self.b)
    }

    pub fn torsion(&self) -> f64 {
        self.b / (self.a * self.a + self.b * self.b)
    }

    /// The aggregate `r = bL/(a²+b²)` that controls the normalized energy ratios.
    pub fn r(&self) -> f64 {
        self.b * self.length / (self.a * self.a + self.b * self.b)
    }

    fn jet(&self, t: f64) -> Jet {
        let c = (self.a * self.a + self.b * self.b).sqrt();
        let (sn, cs) = (t / c).sin_cos();
        let a = self.a;
        Jet {
            pos: Vec3::new(a * cs, a * sn, self.b * t / c),
            d1: Vec3::new(-a / c * sn, a / c * cs, self.b / c),
            d2: Vec3::new(-a / (c * c) * cs, -a / (c * c) * sn, 0.0),
            d3: Vec3::new(a / (c * c * c) * sn, -a / (c * c * c) * cs, 0.0),
        }
    }
}

/// Torus of major radius `major` and minor radius `minor`, centred at the
/// origin with the z axis as symmetry axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Torus {
    pub major: f64,
    pub minor: f64,
}

impl Torus {
    fn core_point(&self, p: &Vec3) -> (Vec3, f64) {
        let rxy = (p.x * p.x + p.y * p.y).sqrt();
        (Vec3::new(p.x / rxy, p.y / rxy, 0.0), rxy)
    }

    /// Signed distance from the torus surface (positive outside).
    pub fn distance(&self, p: &Vec3) -> f64 {
        let (q, _) = self.core_point(p);
        (p - self.major * q).norm() - self.minor
    }

    /// Outward unit normal at the surface point closest to `p`.
    pub fn normal(&self, p: &Vec3) -> Vec3 {
        let (q, _) = self.core_point(p);
        (p - self.major * q).normalize()
    }

    /// Outward normal at `p` and its derivative along a curve through `p`
    /// with velocity `v`.
    pub fn normal_with_derivative(&self, p: &Vec3, v: &Vec3) -> (Vec3, Vec3) {
        let (q, rxy) = self.core_point(p);
        let vxy = Vec3::new(v.x, v.y, 0.0);
        let dq = (vxy - q * q.dot(&vxy)) / rxy;
        let m = p - self.major * q;
        let dm = v - self.major * dq;
        let len = m.norm();
        let n = m / len;
        let dn = (dm - n * n.dot(&dm)) / len;
        (n, dn)
    }
}

/// Torus knot `((R + ρ cos nφ) cos φ, (R + ρ cos nφ) sin φ, ρ sin nφ)`,
/// `φ ∈ [0, 2π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusKnotParams {
    pub major: f64,
    pub minor: f64,
    pub winding: i32,
}

impl Default for TorusKnotParams {
    fn default() -> Self {
        Self {
            major: 2.0,
            minor: 1.0,
            winding: 3,
        }
    }
}

impl TorusKnotParams {
    pub fn torus(&self) -> Torus {
        Torus {
            major: self.major,
            minor: self.minor,
        }
    }
}

impl ParamCurve for TorusKnotParams {
    fn domain(&self) -> (f64, f64) {
        (0.0, 2.0 * PI)
    }

    fn position(&self, s: f64) -> Vec3 {
        self.jet(s).pos
    }

    fn jet(&self, phi: f64) -> Jet {
        let n = self.winding as f64;
        let rho = self.minor;
        let (sn, cn) = (n * phi).sin_cos();
        let (sp, cp) = phi.sin_cos();
        let r = self.major + rho * cn;
        let r1 = -rho * n * sn;
        let r2 = -rho * n * n * cn;
        let r3 = rho * n * n * n * sn;
        let z = rho * sn;
        let z1 = rho * n * cn;
        let z2 = -rho * n * n * sn;
        let z3 = -rho * n * n * n * cn;
        Jet {
            pos: Vec3::new(r * cp, r * sp, z),
            d1: Vec3::new(r1 * cp - r * sp, r1 * sp + r * cp, z1),
            d2: Vec3::new(r2 * cp - 2.0 * r1 * sp - r * cp, r2 * sp + 2.0 * r1 * cp - r * sp, z2),
            d3: Vec3::new(
                r3 * cp - 3.0 * r2 * sp - 3.0 * r1 * cp + r * sp,
                r3 * sp + 3.0 * r2 * cp - 3.0 * r1 * sp - r * cp,
                z3,
            ),
        }
    }

    fn velocity(&self, phi: f64) -> Vec3 {
        self.jet(phi).d1
    }
}

/// Natural cubic spline through `(t, x, y, z)` samples.
#[derive(Debug, Clone)]
pub struct SplineCurve {
    knots: Vec<f64>,
    coords: [Spline1; 3],
}

#[derive(Debug, Clone)]
struct Spline1 {
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Spline1 {
    fn natural(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm for the interior second derivatives.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut upper = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                diag[i - 1] = 2.0 * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for i in 1..k {
                let lower = x[i + 1] - x[i];
                let f = lower / diag[i - 1];
                diag[i] -= f * upper[i - 1];
                rhs[i] -= f * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        Self { y: y.to_vec(), m }
    }

    fn eval(&self, x: &[f64], i: usize, t: f64) -> [f64; 4] {
        let h = x[i + 1] - x[i];
        let a = (x[i + 1] - t) / h;
        let b = (t - x[i]) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (y1 - y0) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0 + (3.0 * b * b - 1.0) / 6.0 * h * m1;
        let d2 = a * m0 + b * m1;
        let d3 = (m1 - m0) / h;
        [v, d1, d2, d3]
    }
}

impl SplineCurve {
    /// Builds the spline from rows `(t, x, y, z)` with strictly increasing `t`.
    pub fn from_samples(rows: &[[f64; 4]]) -> Result<Self> {
        if rows.len() < 4 {
            return Err(RibbonError::InvalidParams(
                "a sampled curve needs at least 4 rows".into(),
            ));
        }
        if rows.windows(2).any(|w| !(w[1][0] > w[0][0])) {
            return Err(RibbonError::InvalidParams(
                "sample parameters must be strictly increasing".into(),
            ));
        }
        let knots: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let coord = |k: usize| {
            let ys: Vec<f64> = rows.iter().map(|r| r[k + 1]).collect();
            Spline1::natural(&knots, &ys)
        };
        Ok(Self {
            coords: [coord(0), coord(1), coord(2)],
            knots,
        })
    }

    fn cell(&self, t: f64) -> usize {
        let n = self.knots.len();
        match self.knots.binary_search_by(|k| k.total_cmp(&t)) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }
}

impl ParamCurve for SplineCurve {
    fn domain(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    fn position(&self, s: f64) -> Vec3 {
        self.jet(s).pos
    }

    fn jet(&self, s: f64) -> Jet {
        let i = self.cell(s);
        let e: Vec<[f64; 4]> = self.coords.iter().map(|c| c.eval(&self.knots, i, s)).collect();
        let col = |k: usize| Vec3::new(e[0][k], e[1][k], e[2][k]);
        Jet {
            pos: col(0),
            d1: col(1),
            d2: col(2),
            d3: col(3),
        }
    }
}

/// Frenet data at one arc-length parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetData {
    pub tangent: Vec3,
    pub curvature: f64,
    /// Absent when the curvature is below [`KAPPA_MIN`].
    pub torsion: Option<f64>,
    pub principal_normal: Option<Vec3>,
    pub binormal: Option<Vec3>,
}

/// Unit-speed curve on `[0, L]`.
#[derive(Clone)]
pub struct ArcLengthCurve {
    repr: Repr,
    length: f64,
}

#[derive(Clone)]
enum Repr {
    Helix(HelixParams),
    Reparam(Arc<ArcTable>),
}

impl fmt::Debug for ArcLengthCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Helix(p) => write!(f, "ArcLengthCurve::Helix({p:?})"),
            Repr::Reparam(t) => write!(
                f,
                "ArcLengthCurve::Reparam {{ length: {}, cells: {} }}",
                self.length,
                t.params.len() - 1
            ),
        }
    }
}

/// Cumulative arc-length table of a parametric curve.
struct ArcTable {
    curve: Arc<dyn ParamCurve>,
    params: Vec<f64>,
    cumulative: Vec<f64>,
    speeds: Vec<f64>,
}

impl ArcTable {
    fn cell_of_param(&self, s: f64) -> usize {
        crate::quadrature::uniform_cell(&self.params, s)
    }

    fn speed(&self, s: f64) -> f64 {
        self.curve.velocity(s).norm()
    }

    /// Arc length from the start of the domain to `s` (extrapolates linearly
    /// in cells outside the domain).
    fn arc(&self, s: f64) -> f64 {
        let i = self.cell_of_param(s);
        let a = self.params[i];
        let h = s - a;
        if h == 0.0 {
            return self.cumulative[i];
        }
        let mid = self.speed(a + 0.5 * h);
        self.cumulative[i] + h / 6.0 * (self.speeds[i] + 4.0 * mid + self.speed(s))
    }

    /// Parameter at arc length `t` (Hermite initial guess, Newton refinement).
    fn param_at(&self, t: f64) -> f64 {
        let n = self.cumulative.len();
        let i = match self.cumulative.binary_search_by(|c| c.total_cmp(&t)) {
            Ok(i) => return self.params[i],
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        };
        let (c0, c1) = (self.cumulative[i], self.cumulative[i + 1]);
        let (mut s, _) = hermite(
            c0,
            c1,
            self.params[i],
            self.params[i + 1],
            1.0 / self.speeds[i],
            1.0 / self.speeds[i + 1],
            t,
        );
        let scale = (self.params[n - 1] - self.params[0]).abs().max(1.0);
        for _ in 0..8 {
            let step = (self.arc(s) - t) / self.speed(s);
            s -= step;
            if step.abs() <= 4.0 * f64::EPSILON * scale {
                break;
            }
        }
        s
    }

    fn jet(&self, t: f64) -> Jet {
        let s = self.param_at(t);
        let c = self.curve.jet(s);
        let sigma = c.d1.norm();
        let c12 = c.d1.dot(&c.d2);
        let sigma_s = c12 / sigma;
        let sigma_ss = (c.d2.norm_squared() + c.d1.dot(&c.d3)) / sigma - c12 * c12 / sigma.powi(3);
        let p1 = 1.0 / sigma;
        let p2 = -sigma_s / sigma.powi(3);
        let p3 = -sigma_ss / sigma.powi(4) + 3.0 * sigma_s * sigma_s / sigma.powi(5);
        Jet {
            pos: c.pos,
            d1: c.d1 * p1,
            d2: c.d2 * (p1 * p1) + c.d1 * p2,
            d3: c.d3 * (p1 * p1 * p1) + c.d2 * (3.0 * p1 * p2) + c.d1 * p3,
        }
    }
}

impl ArcLengthCurve {
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Position and unit-speed derivatives at arc length `t`.
    pub fn jet(&self, t: f64) -> Jet {
        match &self.repr {
            Repr::Helix(p) => p.jet(t),
            Repr::Reparam(table) => table.jet(t),
        }
    }

    pub fn point(&self, t: f64) -> Vec3 {
        self.jet(t).pos
    }

    pub fn tangent(&self, t: f64) -> Vec3 {
        self.jet(t).d1
    }

    /// Parameter of the underlying curve at arc length `t` (identity for the
    /// helix, which is born unit-speed).
    pub fn param_at(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Helix(_) => t,
            Repr::Reparam(table) => table.param_at(t),
        }
    }

    /// Uniform grid of `n` nodes on `[0, L]`.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        uniform_grid(0.0, self.length, n)
    }

    pub fn helix_params(&self) -> Option<HelixParams> {
        match self.repr {
            Repr::Helix(p) => Some(p),
            Repr::Reparam(_) => None,
        }
    }

    pub fn frenet(&self, t: f64) -> FrenetData {
        frenet_from_jet(&self.jet(t))
    }

    /// Largest `| |γ'| - 1 |` over `n` nodes, with `γ'` estimated by
    /// fourth-order central differences of positions (step `h`).
    pub fn unit_speed_defect(&self, n: usize, h: f64) -> f64 {
        self.grid(n)
            .iter()
            .map(|&t| {
                let p = |x: f64| self.point(x);
                let d = (p(t - 2.0 * h) - 8.0 * p(t - h) + 8.0 * p(t + h) - p(t + 2.0 * h)) / (12.0 * h);
                (d.norm() - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn frenet_from_jet(j: &Jet) -> FrenetData {
    let kappa = j.d2.norm();
    if kappa > KAPPA_MIN {
        let normal = j.d2 / kappa;
        let binormal = j.d1.cross(&normal);
        let torsion = j.d1.cross(&j.d2).dot(&j.d3) / (kappa * kappa);
        FrenetData {
            tangent: j.d1,
            curvature: kappa,
            torsion: Some(torsion),
            principal_normal: Some(normal),
            binormal: Some(binormal),
        }
    } else {
        FrenetData {
            tangent: j.d1,
            curvature: kappa,
            torsion: None,
            principal_normal: None,
            binormal: None,
        }
    }
}

/// Reparametrizes `curve` by arc length using a cumulative Simpson table of
/// `grid_size` cells. Fails if the curve is singular at a sample or if the
/// Richardson estimate of the length error exceeds `tol`.
pub fn arc_length_reparametrize(curve: Arc<dyn ParamCurve>, grid_size: usize, tol: f64) -> Result<ArcLengthCurve> {
    if grid_size < 2 {
        return Err(RibbonError::InvalidParams("grid_size must be at least 2".into()));
    }
    let cells = grid_size + grid_size % 2;
    let (s0, s1) = curve.domain();
    let params = uniform_grid(s0, s1, cells + 1);
    let h = params[1] - params[0];
    let mut speeds = Vec::with_capacity(cells + 1);
    for &s in &params {
        let v = curve.velocity(s).norm();
        if !(v >= 1e-12) {
            return Err(RibbonError::NonRegularCurve { param: s, speed: v });
        }
        speeds.push(v);
    }
    let mut cumulative = Vec::with_capacity(cells + 1);
    cumulative.push(0.0);
    let mut mids = Vec::with_capacity(cells);
    for i in 0..cells {
        let mid = curve.velocity(params[i] + 0.5 * h).norm();
        if !(mid >= 1e-12) {
            return Err(RibbonError::NonRegularCurve {
                param: params[i] + 0.5 * h,
                speed: mid,
            });
        }
        mids.push(mid);
        let acc = cumulative[i] + h / 6.0 * (speeds[i] + 4.0 * mid + speeds[i + 1]);
        cumulative.push(acc);
    }
    let length = cumulative[cells];
    // Same rule on panels twice as wide, reusing the table nodes.
    let coarse = simpson(&speeds, h);
    let estimate = (length - coarse).abs() / 15.0;
    if estimate > tol {
        return Err(RibbonError::ToleranceNotMet { estimate, tol });
    }
    Ok(ArcLengthCurve {
        repr: Repr::Reparam(Arc::new(ArcTable {
            curve,
            params,
            cumulative,
            speeds,
        })),
        length,
    })
}

/// Frenet data of `curve` at arc length `t`.
pub fn frenet_data(curve: &ArcLengthCurve, t: f64) -> FrenetData {
    curve.frenet(t)
}

/// The helix `(a cos(t/c), a sin(t/c), bt/c)`, `c = √(a²+b²)`, already unit-speed.
pub fn make_helix(params: HelixParams) -> Result<ArcLengthCurve> {
    if !(params.a > 0.0) || !(params.b >= 0.0) || !params.b.is_finite() {
        return Err(RibbonError::InvalidParams(format!(
            "helix needs a > 0 and b >= 0, got a = {}, b = {}",
            params.a, params.b
        )));
    }
    if !(params.length > 0.0) || !params.length.is_finite() {
        return Err(RibbonError::InvalidParams(format!(
            "helix length must be positive, got {}",
            params.length
        )));
    }
    Ok(ArcLengthCurve {
        repr: Repr::Helix(params),
        length: params.length,
    })
}

/// Arc-length torus knot together with the torus it lies on.
pub fn make_torus_knot(params: TorusKnotParams, grid_size: usize) -> Result<(ArcLengthCurve, Torus)> {
    if !(params.minor > 0.0 && params.minor < params.major) || params.winding == 0 {
        return Err(RibbonError::InvalidParams(format!(
            "torus knot needs 0 < rho < R and n != 0, got R = {}, rho = {}, n = {}",
            params.major, params.minor, params.winding
        )));
    }
    let curve = arc_length_reparametrize(Arc::new(params), grid_size, 1e-9)?;
    Ok((curve, params.torus()))
}

/// Result of the grid-based local nonplanarity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nonplanarity {
    pub nonplanar: bool,
    /// Parameter interval where κ or τ vanishes on at least three
    /// consecutive nodes.
    pub witness: Option<(f64, f64)>,
}

/// Scans `grid_size` nodes for a run of at least three consecutive nodes on
/// which the curve is planar to tolerance (κ ≈ 0 or τ ≈ 0).
pub fn is_locally_nonplanar(curve: &ArcLengthCurve, grid_size: usize) -> Nonplanarity {
    const TOL: f64 = 1e-9;
    let grid = curve.grid(grid_size.max(3));
    let flat: Vec<bool> = grid
        .iter()
        .map(|&t| {
            let f = curve.frenet(t);
            match f.torsion {
                None => true,
                Some(tau) => tau.abs() < TOL,
            }
        })
        .collect();
    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    for (i, &is_flat) in flat.iter().chain(std::iter::once(&false)).enumerate() {
        match (is_flat, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                let run = (s, i - 1);
                if i - s >= 3 && best.is_none_or(|(a, b)| b - a < run.1 - run.0) {
                    best = Some(run);
                }
                start = None;
            }
            _ => {}
        }
    }
    match best {
        Some((a, b)) => Nonplanarity {
            nonplanar: false,
            witness: Some((grid[a], grid[b])),
        },
        None => Nonplanarity {
            nonplanar: true,
            witness: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn unit_circle_length() {
        let c = make_helix(HelixParams::one_turn(1.0, 0.0)).unwrap();
        assert!(close(c.length(), 2.0 * PI, 1e-12));
        let raw = FnCurve::new(|s: f64| Vec3::new(s.cos(), s.sin(), 0.0), 0.0, 2.0 * PI);
        let c = arc_length_reparametrize(Arc::new(raw), 1000, 1e-8).unwrap();
        assert!(close(c.length(), 2.0 * PI, 1e-8), "{}", c.length());
    }

    #[test]
    fn raw_helix_length_matches_direct_quadrature() {
        let raw = FnCurve::new(|s: f64| Vec3::new(s.cos(), s.sin(), s), 0.0, 2.0 * PI);
        let raw = Arc::new(raw);
        // Oracle: Simpson on |c'| of the raw parametrization, fine grid.
        let oracle = crate::quadrature::simpson_fn(|s| raw.velocity(s).norm(), 0.0, 2.0 * PI, 4000);
        let c = arc_length_reparametrize(raw, 1000, 1e-8).unwrap();
        assert!(close(oracle, 2.0 * PI * 2f64.sqrt(), 1e-8));
        assert!(close(c.length(), oracle, 1e-8));
    }

    #[test]
    fn torus_knot_length_is_grid_stable() {
        let (a, _) = make_torus_knot(TorusKnotParams::default(), 1000).unwrap();
        let (b, _) = make_torus_knot(TorusKnotParams::default(), 2000).unwrap();
        assert!((a.length() - b.length()).abs() < 1e-8, "{} {}", a.length(), b.length());
    }

    #[test]
    fn reparametrized_curve_is_unit_speed() {
        let (c, _) = make_torus_knot(TorusKnotParams::default(), 2000).unwrap();
        assert!(c.unit_speed_defect(200, 1e-3) < 1e-8);
        for t in c.grid(50) {
            assert!((c.tangent(t).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_curve_is_rejected() {
        let raw = FnCurve::new(|s: f64| Vec3::new(s * s, 0.0, 0.0), -1.0, 1.0);
        let err = arc_length_reparametrize(Arc::new(raw), 10, 1e-6).unwrap_err();
        assert!(matches!(err, RibbonError::NonRegularCurve { .. }));
    }

    #[test]
    fn loose_table_reports_tolerance() {
        let raw = FnCurve::new(|s: f64| Vec3::new(s, (5.0 * s).sin(), 0.0), 0.0, 3.0);
        let err = arc_length_reparametrize(Arc::new(raw), 4, 1e-12).unwrap_err();
        assert!(matches!(err, RibbonError::ToleranceNotMet { .. }));
    }

    #[test]
    fn helix_frenet_values() {
        for &(a, b) in &[(1.0, 1.0), (3.0, 4.0), (2.0, 0.5)] {
            let p = HelixParams::one_turn(a, b);
            let c = make_helix(p).unwrap();
            for t in [0.0, 0.3, 2.0, p.length] {
                let f = c.frenet(t);
                assert!(close(f.curvature, a / (a * a + b * b), 1e-12));
                assert!(close(f.torsion.unwrap(), b / (a * a + b * b), 1e-12));
                let tn = f.tangent.cross(&f.principal_normal.unwrap());
                assert!((tn - f.binormal.unwrap()).norm() < 1e-12);
            }
        }
        let f = make_helix(HelixParams::new(3.0, 4.0, 1.0)).unwrap().frenet(0.0);
        assert!(close(f.curvature, 3.0 / 25.0, 1e-15));
        assert!(close(f.torsion.unwrap(), 4.0 / 25.0, 1e-15));
    }

    #[test]
    fn helix_start_point_and_tangent() {
        let c = make_helix(HelixParams::one_turn(1.0, 1.0)).unwrap();
        let j = c.jet(0.0);
        assert!((j.pos - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-15);
        let s = 0.5f64.sqrt();
        assert!((j.d1 - Vec3::new(0.0, s, s)).norm() < 1e-15);
        let circle = make_helix(HelixParams::one_turn(1.0, 0.0)).unwrap();
        for t in circle.grid(17) {
            let p = circle.point(t);
            assert!(close(p.norm(), 1.0, 1e-14) && p.z == 0.0);
        }
    }

    #[test]
    fn invalid_helix_params() {
        assert!(make_helix(HelixParams::new(0.0, 1.0, 1.0)).is_err());
        assert!(make_helix(HelixParams::new(-1.0, 1.0, 1.0)).is_err());
        assert!(make_torus_knot(
            TorusKnotParams {
                major: 1.0,
                minor: 2.0,
                winding: 3
            },
            100
        )
        .is_err());
    }

    #[test]
    fn circle_frenet() {
        let c = make_helix(HelixParams::one_turn(1.0, 0.0)).unwrap();
        let f = c.frenet(0.0);
        assert!(close(f.curvature, 1.0, 1e-15));
        assert!(close(f.torsion.unwrap(), 0.0, 1e-15));
    }

    #[test]
    fn torus_knot_frenet_is_grid_stable() {
        let (a, _) = make_torus_knot(TorusKnotParams::default(), 1000).unwrap();
        let (b, _) = make_torus_knot(TorusKnotParams::default(), 2000).unwrap();
        let (fa, fb) = (a.frenet(0.0), b.frenet(0.0));
        assert!(close(fa.curvature, fb.curvature, 1e-6));
        assert!(close(fa.torsion.unwrap(), fb.torsion.unwrap(), 1e-6));
        // Finite-difference oracle on positions.
        let h = 1e-3;
        let t = 1.7;
        let fd = (a.point(t + h) - 2.0 * a.point(t) + a.point(t - h)) / (h * h);
        assert!((fd.norm() - a.frenet(t).curvature).abs() < 1e-5);
    }

    #[test]
    fn torus_knot_geometry() {
        let (c, torus) = make_torus_knot(TorusKnotParams::default(), 2000).unwrap();
        let p0 = c.point(0.0);
        assert!((p0 - Vec3::new(3.0, 0.0, 0.0)).norm() < 1e-12);
        assert!((torus.normal(&p0) - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-12);
        for i in 0..100 {
            let t = c.length() * (i as f64 + 0.37) / 100.0;
            let j = c.jet(t);
            assert!(torus.distance(&j.pos).abs() < 1e-10);
            assert!(torus.normal(&j.pos).dot(&j.d1).abs() < 1e-10);
        }
    }

    #[test]
    fn nonplanarity_scan() {
        let helix = make_helix(HelixParams::one_turn(1.0, 1.0)).unwrap();
        assert!(is_locally_nonplanar(&helix, 200).nonplanar);
        let circle = make_helix(HelixParams::one_turn(1.0, 0.0)).unwrap();
        let r = is_locally_nonplanar(&circle, 200);
        assert!(!r.nonplanar);
        let (a, b) = r.witness.unwrap();
        assert!(a == 0.0 && close(b, circle.length(), 1e-12));
        let (knot, _) = make_torus_knot(TorusKnotParams::default(), 2000).unwrap();
        assert!(is_locally_nonplanar(&knot, 500).nonplanar);
    }

    #[test]
    fn spline_reproduces_helix_samples() {
        let rows: Vec<[f64; 4]> = uniform_grid(0.0, 2.0 * PI, 401)
            .into_iter()
            .map(|s| [s, s.cos(), s.sin(), 0.5 * s])
            .collect();
        let spline = SplineCurve::from_samples(&rows).unwrap();
        let c = arc_length_reparametrize(Arc::new(spline), 2000, 1e-6).unwrap();
        let expected = 2.0 * PI * 1.25f64.sqrt();
        assert!(close(c.length(), expected, 1e-6), "{}", c.length());
        let f = c.frenet(c.length() / 2.0);
        assert!(close(f.curvature, 1.0 / 1.25, 1e-4));
    }

    #[test]
    fn fd_fallback_matches_analytic_jet() {
        let knot = TorusKnotParams::default();
        let fd = FnCurve::new(move |s| knot.position(s), 0.0, 2.0 * PI);
        let (ja, jf) = (knot.jet(0.9), fd.jet(0.9));
        assert!((ja.d1 - jf.d1).norm() < 1e-9);
        assert!((ja.d2 - jf.d2).norm() < 1e-5);
        assert!((ja.d3 - jf.d3).norm() < 1e-2);
    }
}
