//! Python bindings: curves, normal fields, ribbons, the rotation-angle IVPs,
//! energies and the helix ratio formulas. Arrays cross the boundary as
//! plain lists.

use std::sync::Arc;

use flat_ribbon::curve::{make_helix, make_torus_knot, Torus};
use flat_ribbon::darboux::{darboux_scalars, rotate, ConstantAngle, DarbouxScalars};
use flat_ribbon::energy::{
    bending_energy_closed, bending_energy_quadrature, helix_ratio_a, helix_ratio_b, limit_energy, EnergyReport,
};
use flat_ribbon::ivp::{self, AnglePrescription, InitialCondition, ThetaSolution};
use flat_ribbon::ribbon::{flatness_residuals, max_regular_width, mu_field, ruling_angle, tessellate};
use flat_ribbon::{ArcLengthCurve, HelixParams, TorusKnotParams, Vec3};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(flat_ribbon_py, RibbonError, PyException);

fn py_err(e: flat_ribbon::RibbonError) -> PyErr {
    RibbonError::new_err(e.to_string())
}

type Triple = (f64, f64, f64);

fn triple(v: Vec3) -> Triple {
    (v.x, v.y, v.z)
}

/// Unit-speed curve on `[0, length]`.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct Curve {
    inner: ArcLengthCurve,
    torus: Option<Torus>,
}

#[pymethods]
impl Curve {
    /// Helix `(a cos s, a sin s, b s)`; one full turn when `length` is omitted.
    #[staticmethod]
    #[pyo3(signature = (a, b, length=None))]
    fn helix(a: f64, b: f64, length: Option<f64>) -> PyResult<Self> {
        let p = match length {
            Some(l) => HelixParams::new(a, b, l),
            None => HelixParams::one_turn(a, b),
        };
        Ok(Self {
            inner: make_helix(p).map_err(py_err)?,
            torus: None,
        })
    }

    /// `(R, ρ, n)` torus knot, reparametrized by arc length on `cells` cells.
    #[staticmethod]
    #[pyo3(signature = (major=2.0, minor=1.0, winding=3, cells=2000))]
    fn torus_knot(major: f64, minor: f64, winding: i32, cells: usize) -> PyResult<Self> {
        let (inner, torus) = make_torus_knot(TorusKnotParams { major, minor, winding }, cells).map_err(py_err)?;
        Ok(Self {
            inner,
            torus: Some(torus),
        })
    }

    #[getter]
    fn length(&self) -> f64 {
        self.inner.length()
    }

    fn point(&self, t: f64) -> Triple {
        triple(self.inner.point(t))
    }

    fn tangent(&self, t: f64) -> Triple {
        triple(self.inner.tangent(t))
    }

    /// Dict with `tangent`, `curvature`, and `torsion`, `normal`,
    /// `binormal` (`None` where the curvature vanishes).
    fn frenet<'py>(&self, py: Python<'py>, t: f64) -> PyResult<Bound<'py, PyDict>> {
        let f = self.inner.frenet(t);
        let d = PyDict::new(py);
        d.set_item("tangent", triple(f.tangent))?;
        d.set_item("curvature", f.curvature)?;
        d.set_item("torsion", f.torsion)?;
        d.set_item("normal", f.principal_normal.map(triple))?;
        d.set_item("binormal", f.binormal.map(triple))?;
        Ok(d)
    }

    fn grid(&self, n: usize) -> Vec<f64> {
        self.inner.grid(n)
    }
}

/// Unit normal field along a curve.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct NormalField {
    inner: flat_ribbon::darboux::NormalField,
}

#[pymethods]
impl NormalField {
    #[staticmethod]
    fn principal(curve: &Curve) -> Self {
        Self {
            inner: flat_ribbon::darboux::NormalField::principal(&curve.inner),
        }
    }

    /// Outward torus normal; the curve must come from `Curve.torus_knot`.
    #[staticmethod]
    fn torus_normal(curve: &Curve) -> PyResult<Self> {
        let torus = curve
            .torus
            .ok_or_else(|| RibbonError::new_err("torus normal needs a torus-knot curve"))?;
        Ok(Self {
            inner: flat_ribbon::darboux::NormalField::torus_normal(&curve.inner, torus),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (curve, grid=2001))]
    fn rotation_minimizing(curve: &Curve, grid: usize) -> Self {
        Self {
            inner: flat_ribbon::darboux::NormalField::rotation_minimizing(&curve.inner, grid),
        }
    }

    /// Field rotated about the tangent by a constant angle.
    fn rotated(&self, angle: f64) -> Self {
        Self {
            inner: self.inner.rotated(Arc::new(ConstantAngle(angle))),
        }
    }

    /// Field rotated by a solved angle function `θ(t)`.
    fn rotated_by(&self, theta: &Theta) -> Self {
        Self {
            inner: self.inner.rotated(Arc::new(theta.inner.clone())),
        }
    }

    /// `(κ_g, κ_n, τ_g)` at `t`.
    fn scalars(&self, t: f64) -> PyResult<Triple> {
        let s = darboux_scalars(&self.inner, t).map_err(py_err)?;
        Ok((s.kappa_g, s.kappa_n, s.tau_g))
    }

    /// `(T, N, H)` at `t`.
    fn frame(&self, t: f64) -> PyResult<(Triple, Triple, Triple)> {
        let f = self.inner.frame(t).map_err(py_err)?;
        Ok((triple(f.t), triple(f.n), triple(f.h)))
    }

    /// Largest half-width for which the ribbon is regular.
    #[pyo3(signature = (grid=2001))]
    fn w_max(&self, grid: usize) -> PyResult<f64> {
        Ok(max_regular_width(&mu_field(&self.inner, grid).map_err(py_err)?))
    }
}

/// Solution `θ(t)` of a rotation-angle initial value problem.
#[pyclass(frozen)]
pub struct Theta {
    inner: ThetaSolution,
}

#[pymethods]
impl Theta {
    #[getter]
    fn t(&self) -> Vec<f64> {
        self.inner.grid().to_vec()
    }

    #[getter]
    fn theta(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn dtheta(&self) -> Vec<f64> {
        self.inner.derivatives().to_vec()
    }

    #[getter]
    fn step(&self) -> f64 {
        self.inner.step
    }

    #[getter]
    fn error_estimate(&self) -> f64 {
        self.inner.error_estimate
    }

    fn __call__(&self, t: f64) -> f64 {
        use flat_ribbon::darboux::AngleFunction;
        self.inner.value(t)
    }
}

/// Rotation angle keeping the ruling angle of the ribbon on `field`.
#[pyfunction]
#[pyo3(signature = (field, q, cells=2000, tol=1e-8))]
fn solve_same_angle(field: &NormalField, q: f64, cells: usize, tol: f64) -> PyResult<Theta> {
    let inner = ivp::solve_same_angle(&field.inner, InitialCondition::at_start(q), cells, tol).map_err(py_err)?;
    Ok(Theta { inner })
}

/// Rotation angle giving the constant ruling angle `phi ∈ (0, π)`.
#[pyfunction]
#[pyo3(signature = (field, phi, q, cells=2000, tol=1e-8))]
fn solve_prescribed(field: &NormalField, phi: f64, q: f64, cells: usize, tol: f64) -> PyResult<Theta> {
    let phi = AnglePrescription::constant(phi).map_err(py_err)?;
    let inner = ivp::solve_prescribed(&field.inner, &phi, InitialCondition::at_start(q), cells, tol).map_err(py_err)?;
    Ok(Theta { inner })
}

fn report_dict<'py>(py: Python<'py>, r: &EnergyReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("value", r.value)?;
    d.set_item("method", r.method.as_str())?;
    d.set_item("w", r.w)?;
    d.set_item("err_estimate", r.err_estimate)?;
    Ok(d)
}

/// Flat ribbon of half-width `w` normal to a field. Give either an
/// absolute `w` or a fraction `w_frac` of the largest regular half-width.
#[pyclass(frozen)]
pub struct Ribbon {
    inner: flat_ribbon::ribbon::FlatRibbon,
}

#[pymethods]
impl Ribbon {
    #[new]
    #[pyo3(signature = (field, w=None, w_frac=0.5, grid=2001))]
    fn new(field: &NormalField, w: Option<f64>, w_frac: f64, grid: usize) -> PyResult<Self> {
        let mu = mu_field(&field.inner, grid).map_err(py_err)?;
        let w = w.unwrap_or_else(|| {
            flat_ribbon::pipeline::resolve_width(flat_ribbon::config::WidthSpec::OfMax(w_frac), &mu)
        });
        let inner = flat_ribbon::ribbon::FlatRibbon::from_mu(&field.inner, w, mu).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn half_width(&self) -> f64 {
        self.inner.half_width()
    }

    #[getter]
    fn w_max(&self) -> f64 {
        self.inner.w_max()
    }

    #[getter]
    fn length(&self) -> f64 {
        self.inner.length()
    }

    /// Slope `μ` on the ribbon grid.
    #[getter]
    fn mu(&self) -> Vec<f64> {
        self.inner.mu().values().to_vec()
    }

    fn point(&self, t: f64, u: f64) -> PyResult<Triple> {
        Ok(triple(self.inner.point(t, u).map_err(py_err)?))
    }

    fn ruling(&self, t: f64) -> PyResult<Triple> {
        Ok(triple(self.inner.ruling(t).map_err(py_err)?))
    }

    /// Angle between ruling and tangent.
    fn ruling_angle(&self, t: f64) -> f64 {
        ruling_angle(&self.inner, t)
    }

    /// Maxima of the developability residuals.
    #[pyo3(signature = (mesh_nt=400, mesh_nu=11))]
    fn flatness<'py>(&self, py: Python<'py>, mesh_nt: usize, mesh_nu: usize) -> PyResult<Bound<'py, PyDict>> {
        let r = flatness_residuals(&self.inner, mesh_nt, mesh_nu).map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("ruling_normal", r.max_ruling_normal)?;
        d.set_item("ruling_twist", r.max_ruling_twist)?;
        d.set_item("gaussian", r.max_gaussian)?;
        d.set_item("f", r.max_f)?;
        Ok(d)
    }

    /// `(vertices, triangles)` of an `n_t × n_u` mesh (0-based indices).
    fn mesh(&self, n_t: usize, n_u: usize) -> PyResult<(Vec<Triple>, Vec<[usize; 3]>)> {
        let m = tessellate(&self.inner, n_t, n_u).map_err(py_err)?;
        Ok((m.vertices.iter().map(|&v| triple(v)).collect(), m.triangles))
    }

    fn write_obj(&self, path: std::path::PathBuf, n_t: usize, n_u: usize) -> PyResult<()> {
        let m = tessellate(&self.inner, n_t, n_u).map_err(py_err)?;
        let f = std::fs::File::create(path)?;
        m.write_obj(std::io::BufWriter::new(f))?;
        Ok(())
    }

    fn energy_closed<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        report_dict(py, &bending_energy_closed(&self.inner).map_err(py_err)?)
    }

    #[pyo3(signature = (n_t=2001, n_u=41))]
    fn energy_quadrature<'py>(&self, py: Python<'py>, n_t: usize, n_u: usize) -> PyResult<Bound<'py, PyDict>> {
        report_dict(py, &bending_energy_quadrature(&self.inner, n_t, n_u).map_err(py_err)?)
    }

    fn energy_limit<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        report_dict(py, &limit_energy(self.inner.mu(), self.inner.half_width()))
    }
}

/// Scalars `(κ_g, κ_n, τ_g)` after rotating the frame by `theta` with
/// derivative `dtheta`.
#[pyfunction]
fn rotate_scalars(kappa_g: f64, kappa_n: f64, tau_g: f64, theta: f64, dtheta: f64) -> Triple {
    let s = rotate(&DarbouxScalars::new(kappa_g, kappa_n, tau_g), theta, dtheta);
    (s.kappa_g, s.kappa_n, s.tau_g)
}

/// Helix energy ratio for constant ruling angle π/2.
#[pyfunction]
fn ratio_a(q: f64, r: f64) -> f64 {
    helix_ratio_a(q, r)
}

/// Helix energy ratio for the rectifying-developable ruling angle.
#[pyfunction]
fn ratio_b(q: f64, r: f64) -> f64 {
    helix_ratio_b(q, r)
}

#[pymodule]
pub fn flat_ribbon_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("RibbonError", m.py().get_type::<RibbonError>())?;
    m.add_class::<Curve>()?;
    m.add_class::<NormalField>()?;
    m.add_class::<Theta>()?;
    m.add_class::<Ribbon>()?;
    m.add_function(wrap_pyfunction!(solve_same_angle, m)?)?;
    m.add_function(wrap_pyfunction!(solve_prescribed, m)?)?;
    m.add_function(wrap_pyfunction!(rotate_scalars, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_a, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_b, m)?)?;
    Ok(())
}
