//! Composite Simpson rules and small interpolation helpers shared by the
//! curve, IVP and energy code.

/// Composite Simpson over equally spaced samples. `values.len()` must be odd
/// and at least 3.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(
        n >= 3 && n % 2 == 1,
        "simpson needs an odd number (>= 3) of samples, got {n}"
    );
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (values[0] + values[n - 1] + 4.0 * odd + 2.0 * even)
}

/// Composite Simpson for any sample count >= 4: an even count closes with
/// the 3/8 rule on the last three panels.
pub fn simpson_any(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n % 2 == 1 {
        return simpson(values, h);
    }
    assert!(n >= 4, "need at least 4 samples, got {n}");
    let tail = &values[n - 4..];
    let three_eighths = 3.0 * h / 8.0 * (tail[0] + 3.0 * tail[1] + 3.0 * tail[2] + tail[3]);
    if n == 4 {
        three_eighths
    } else {
        simpson(&values[..n - 3], h) + three_eighths
    }
}

/// Composite Simpson of `f` on `[a, b]` with `panels` (even) subintervals.
pub fn simpson_fn(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(2) + panels % 2;
    let h = (b - a) / panels as f64;
    let values: Vec<f64> = (0..=panels).map(|i| f(a + h * i as f64)).collect();
    simpson(&values, h)
}

/// Simpson integral with a Richardson error estimate from the same samples
/// taken at every other node. Needs `values.len() ≡ 1 (mod 4)` for the
/// estimate; otherwise the estimate is `NaN`.
pub fn simpson_with_estimate(values: &[f64], h: f64) -> (f64, f64) {
    let fine = simpson(values, h);
    let n = values.len();
    if !(n - 1).is_multiple_of(4) {
        return (fine, f64::NAN);
    }
    let coarse: Vec<f64> = values.iter().step_by(2).copied().collect();
    let coarse = simpson(&coarse, 2.0 * h);
    (fine, (fine - coarse).abs() / 15.0)
}

/// Running integral of `f` over the nodes `t_0 < t_1 < ...`, one Simpson
/// panel per interval (uses the interval midpoint).
pub fn cumulative_simpson(f: impl Fn(f64) -> f64, nodes: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(nodes.len());
    let mut acc = 0.0;
    out.push(0.0);
    let mut f_prev = f(nodes[0]);
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let f_mid = f(0.5 * (a + b));
        let f_next = f(b);
        acc += (b - a) / 6.0 * (f_prev + 4.0 * f_mid + f_next);
        out.push(acc);
        f_prev = f_next;
    }
    out
}

/// Uniform grid of `n` nodes on `[a, b]`.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { b } else { a + h * i as f64 }).collect()
}

/// Cubic Hermite interpolation on `[x0, x1]`; returns value and derivative.
pub fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = (6.0 * s2 - 6.0 * s) / h;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = (-6.0 * s2 + 6.0 * s) / h;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let deriv = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
    (value, deriv)
}

/// Index `i` of the cell `[grid[i], grid[i+1]]` containing `x` on a uniform
/// grid (clamped to the first/last cell).
pub fn uniform_cell(grid: &[f64], x: f64) -> usize {
    let n = grid.len();
    let h = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    let i = ((x - grid[0]) / h).floor();
    if i < 0.0 {
        0
    } else {
        (i as usize).min(n - 2)
    }
}

/// Fourth-order finite-difference derivative of uniformly sampled values:
/// five-point central stencil inside, one-sided five-point stencils at the
/// two nodes next to each end.
pub fn differentiate_uniform(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5, "need at least 5 samples to differentiate");
    let v = values;
    (0..n)
        .map(|i| {
            if i >= 2 && i + 2 < n {
                (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h)
            } else if i == 0 {
                (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h)
            } else if i == 1 {
                (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h)
            } else if i == n - 2 {
                (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] - v[n - 5]) / (12.0 * h)
            } else {
                (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4] + 3.0 * v[n - 5]) / (12.0 * h)
            }
        })
        .collect()
}

/// Fourth-order central-difference first, second and third derivatives of a
/// scalar function at `x` with step `h`.
pub fn central_derivatives(f: impl Fn(f64) -> f64, x: f64, h: f64) -> [f64; 3] {
    let f1 = f(x + h);
    let fm1 = f(x - h);
    let f2 = f(x + 2.0 * h);
    let fm2 = f(x - 2.0 * h);
    let f3 = f(x + 3.0 * h);
    let fm3 = f(x - 3.0 * h);
    let f0 = f(x);
    let d1 = (fm2 - 8.0 * fm1 + 8.0 * f1 - f2) / (12.0 * h);
    let d2 = (-f2 + 16.0 * f1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
    let d3 = (-f3 + 8.0 * f2 - 13.0 * f1 + 13.0 * fm1 - 8.0 * fm2 + fm3) / (8.0 * h * h * h);
    [d1, d2, d3]
}
