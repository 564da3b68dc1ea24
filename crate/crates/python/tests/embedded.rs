use std::ffi::CString;

use flat_ribbon_py::flat_ribbon_py;
use pyo3::prelude::*;

fn run(code: &str) -> PyResult<()> {
    pyo3::append_to_inittab!(flat_ribbon_py);
    Python::initialize();
    Python::attach(|py| {
        let code = CString::new(code).unwrap();
        py.run(&code, None, None)
    })
}

#[test]
fn module_round_trip() {
    run(r#"
import math
import flat_ribbon_py as fr
c = fr.Curve.helix(1.0, 1.0)
n = fr.NormalField.principal(c)
sol = fr.solve_same_angle(n, math.pi / 2, cells=400)
assert abs(sol.theta[0] - math.pi / 2) < 1e-15
r = fr.Ribbon(n.rotated_by(sol), grid=401)
assert r.flatness(80, 3)["ruling_normal"] < 1e-8
assert fr.ratio_a(0.0, 2.0) == 1.0
try:
    fr.NormalField.torus_normal(c)
    raise AssertionError("helix accepted as torus knot")
except fr.RibbonError:
    pass
"#)
    .unwrap();
}
