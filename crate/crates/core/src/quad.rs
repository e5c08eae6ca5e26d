//! Small numeric-integration helpers shared by the solvers.

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// Recurses until the local Richardson error estimate falls below `tol`
/// (distributed over subintervals) or the depth limit is hit. Intended for
/// the smooth, rapidly decaying integrands that show up here; callers split
/// at known kinks themselves.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Trapezoid rule over uniformly spaced samples `ys` with spacing `dx`.
pub fn trapezoid_uniform(ys: &[f64], dx: f64) -> f64 {
    match ys.len() {
        0 | 1 => 0.0,
        _ => {
            let inner: f64 = ys[1..ys.len() - 1].iter().sum();
            dx * (0.5 * ys[0] + inner + 0.5 * ys[ys.len() - 1])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomial_is_near_exact() {
        // x^3 over [0, 2] = 4
        let v = adaptive_simpson(&|x| x * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn simpson_exponential_tail() {
        let v = adaptive_simpson(&|x| (-x).exp(), 0.0, 60.0, 1e-12);
        assert!((v - 1.0).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn trapezoid_linear_exact() {
        let ys: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        let v = trapezoid_uniform(&ys, 1.0);
        assert_eq!(v, 50.0);
    }
}
