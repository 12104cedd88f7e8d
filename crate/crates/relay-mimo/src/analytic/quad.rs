//! Quadrature primitives: adaptive Simpson for finite intervals and cached
//! Gauss-Laguerre rules for the e^(-λ)-weighted half-line integrals.

use std::sync::OnceLock;

use nalgebra::DMatrix;

const MAX_DEPTH: u32 = 48;

fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth >= MAX_DEPTH || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * eps, depth + 1)
        + simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * eps, depth + 1)
}

/// Adaptive Simpson integration of `f` over `[a, b]`. The effective
/// tolerance is `max(abs_tol, rel_tol * |first estimate|)`.
pub fn adaptive_simpson(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let eps = abs_tol.max(rel_tol * whole.abs()).max(f64::MIN_POSITIVE);
    simpson_step(&f, a, fa, b, fb, m, fm, whole, eps, 0)
}

/// Nodes and weights of the `n`-point Gauss-Laguerre rule (weight e^(-x)),
/// computed by the Golub-Welsch eigendecomposition of the Jacobi matrix.
fn laguerre_rule(n: usize) -> Vec<(f64, f64)> {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        j[(i, i)] = (2 * i + 1) as f64;
        if i + 1 < n {
            j[(i, i + 1)] = (i + 1) as f64;
            j[(i + 1, i)] = (i + 1) as f64;
        }
    }
    let eig = nalgebra::SymmetricEigen::new(j);
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let node = eig.eigenvalues[k];
            let w = eig.eigenvectors[(0, k)].powi(2);
            (node, w)
        })
        .collect();
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    rule
}

static LAGUERRE_200: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
static LAGUERRE_400: OnceLock<Vec<(f64, f64)>> = OnceLock::new();

/// `∫_0^∞ f(x) e^(-x) dx` by the cached n-point Gauss-Laguerre rule;
/// only the two sizes used by the evaluator are available.
pub fn gauss_laguerre(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    let rule = match n {
        200 => LAGUERRE_200.get_or_init(|| laguerre_rule(200)),
        400 => LAGUERRE_400.get_or_init(|| laguerre_rule(400)),
        _ => panic!("uncached Gauss-Laguerre size {n}"),
    };
    rule.iter().map(|&(x, w)| w * f(x)).sum()
}
