use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::{NumericsError, Result};

/// Total node count of the default real-line rule.
pub const DEFAULT_LINE_NODES: usize = 400;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Nodes `x_j` and weights `w_j` on the real line for `n` total nodes.
///
/// The half lines `(-∞, 0)` and `(0, ∞)` are each mapped by `x = tan θ` and
/// integrated with an `n/2`-point Gauss-Legendre rule, so integrands with a
/// jump at the origin keep their spectral accuracy.
fn line_rule(n: usize) -> Vec<(f64, f64)> {
    let half = (n / 2).max(1);
    let (t, w) = gauss_legendre(half);
    let mut out = Vec::with_capacity(2 * half);
    for (lo, hi) in [(-FRAC_PI_2, 0.0), (0.0, FRAC_PI_2)] {
        let mid = 0.5 * (lo + hi);
        let rad = 0.5 * (hi - lo);
        for (&tj, &wj) in t.iter().zip(&w) {
            let theta: f64 = mid + rad * tj;
            let c = theta.cos();
            out.push((theta.tan(), wj * rad / (c * c)));
        }
    }
    out
}

fn default_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| line_rule(DEFAULT_LINE_NODES))
}

/// `∫_ℝ f(x) dx` for an integrand decaying like `|x|^(-decay_order)`.
///
/// Uses the default 400-node rule.
pub fn real_line_quadrature<F>(f: F, decay_order: u32) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if decay_order < 2 {
        return Err(NumericsError::SlowDecay(decay_order));
    }
    Ok(default_rule().iter().map(|&(x, w)| f(x) * w).sum())
}

/// As [`real_line_quadrature`] with an explicit node count.
pub fn real_line_quadrature_with<F>(f: F, decay_order: u32, nodes: usize) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if decay_order < 2 {
        return Err(NumericsError::SlowDecay(decay_order));
    }
    Ok(line_rule(nodes).iter().map(|&(x, w)| f(x) * w).sum())
}
