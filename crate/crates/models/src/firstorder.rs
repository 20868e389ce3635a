//! `A = i d/dx` on `L²(0, ∞)`.
//!
//! With `Γ1 f = i f(0)` and `Γ2 = 0` the M-function of every extension
//! vanishes identically, while the extension `A_B` (boundary condition
//! `f(0) = 0`) has the whole closed upper half plane as spectrum. Its
//! resolvent for `Im λ < 0` is
//!
//! ```text
//! f(x) = −i e^{−iλx} ∫₀ˣ e^{iλt} g(t) dt,
//! ```
//!
//! and its norm `1/|Im λ|` blows up at the real axis even though `M` is
//! analytic there.

use serde::{Deserialize, Serialize};
use weyl_numerics::{gauss_legendre, least_squares, CMatrix, CVector, Complex64};

use crate::error::ModelError;
use crate::Result;

/// Uniform grid on `[0, L]` with trapezoid weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridParams", into = "GridParams")]
pub struct HalfLineGrid {
    length: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct GridParams {
    length: f64,
    n: usize,
}

impl TryFrom<GridParams> for HalfLineGrid {
    type Error = ModelError;
    fn try_from(p: GridParams) -> Result<Self> {
        HalfLineGrid::new(p.length, p.n)
    }
}

impl From<HalfLineGrid> for GridParams {
    fn from(g: HalfLineGrid) -> Self {
        GridParams { length: g.length, n: g.len() }
    }
}

impl HalfLineGrid {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) || n < 16 {
            return Err(ModelError::Invalid(format!("grid needs L > 0 and n ≥ 16, got L = {length}, n = {n}")));
        }
        let h = length / (n - 1) as f64;
        let nodes = (0..n).map(|j| j as f64 * h).collect();
        let mut weights = vec![h; n];
        weights[0] = 0.5 * h;
        weights[n - 1] = 0.5 * h;
        Ok(Self { length, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.nodes[1]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Samples `f` at the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> Complex64) -> CVector {
        CVector::from_iterator(self.len(), self.nodes.iter().map(|&x| f(x)))
    }

    /// Trapezoid `L²` norm of a grid function.
    pub fn norm(&self, f: &CVector) -> f64 {
        f.iter().zip(&self.weights).map(|(z, w)| w * z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Default for HalfLineGrid {
    fn default() -> Self {
        Self::new(40.0, 4096).expect("default grid parameters are valid")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoModel {
    /// Boundary parameter of the extension.
    pub b: Complex64,
    pub grid: HalfLineGrid,
}

impl Default for FoModel {
    fn default() -> Self {
        Self { b: Complex64::new(1.0, 0.0), grid: HalfLineGrid::default() }
    }
}

/// `M_B(λ)`, identically zero.
pub fn fo_m(_model: &FoModel, _lambda: Complex64) -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// The adjoint-side value `M̃_B̃(λ) = −1/B̃`.
pub fn fo_m_adjoint(b_tilde: Complex64) -> Result<Complex64> {
    if b_tilde.norm() == 0.0 {
        return Err(ModelError::Invalid("adjoint M-function needs B̃ ≠ 0".into()));
    }
    Ok(-1.0 / b_tilde)
}

fn lower_half(lambda: Complex64) -> Result<()> {
    if !(lambda.im < 0.0) {
        return Err(ModelError::UpperHalfPlane(lambda));
    }
    Ok(())
}

/// Local cubic interpolation weights for the per-interval integrals
/// `∫_{x_j}^{x_{j+1}} e^{−iλ(x_{j+1}−t)} g(t) dt`, indexed by the position of
/// the interval inside its four-point stencil.
fn interval_weights(lambda: Complex64, h: f64) -> [[Complex64; 4]; 3] {
    let (xi, wq) = gauss_legendre(4);
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 3];
    for (o, row) in out.iter_mut().enumerate() {
        for (&x, &w) in xi.iter().zip(&wq) {
            let tau = o as f64 + 0.5 * (1.0 + x);
            let kernel = (Complex64::new(0.0, -1.0) * lambda * (h * (o as f64 + 1.0 - tau))).exp();
            for (k, slot) in row.iter_mut().enumerate() {
                let mut lk = 1.0;
                for l in 0..4 {
                    if l != k {
                        lk *= (tau - l as f64) / (k as f64 - l as f64);
                    }
                }
                *slot += kernel * (0.5 * h * w * lk);
            }
        }
    }
    out
}

/// `(A_B − λ)^{-1} g` on the grid, for `Im λ < 0`.
///
/// Marches `f_{j+1} = e^{−iλh} f_j − i ∫_{x_j}^{x_{j+1}} e^{−iλ(x_{j+1}−t)} g(t) dt`
/// with `g` interpolated by local cubics and each interval integrated by
/// four-point Gauss-Legendre, which is fourth-order accurate. Since
/// `|e^{−iλh}| < 1` the recursion is stable.
pub fn fo_resolvent(model: &FoModel, lambda: Complex64, g: &CVector) -> Result<CVector> {
    lower_half(lambda)?;
    let grid = &model.grid;
    let n = grid.len();
    if g.len() != n {
        return Err(ModelError::Invalid(format!("grid function has length {}, grid has {n} nodes", g.len())));
    }
    let h = grid.spacing();
    let step = (Complex64::new(0.0, -1.0) * lambda * h).exp();
    let weights = interval_weights(lambda, h);
    let mut f = CVector::zeros(n);
    for j in 0..n - 1 {
        let s = j.saturating_sub(1).min(n - 4);
        let o = j - s;
        let integral: Complex64 = (0..4).map(|k| weights[o][k] * g[s + k]).sum();
        f[j + 1] = step * f[j] - Complex64::new(0.0, 1.0) * integral;
    }
    Ok(f)
}

/// Largest centered-difference residual of `i f′ − λf = g` over the
/// interior nodes.
pub fn fo_ode_residual(model: &FoModel, lambda: Complex64, f: &CVector, g: &CVector) -> f64 {
    let h = model.grid.spacing();
    let i = Complex64::new(0.0, 1.0);
    (1..f.len() - 1)
        .map(|j| (i * (f[j + 1] - f[j - 1]) / (2.0 * h) - lambda * f[j] - g[j]).norm())
        .fold(0.0, f64::max)
}

/// Weighted least-squares distance from `f` to `span{e^{−iμ_j x}}`.
pub fn fo_t_density_residual(model: &FoModel, f: &CVector, mus: &[Complex64]) -> Result<f64> {
    if let Some(&bad) = mus.iter().find(|mu| !(mu.im < 0.0)) {
        return Err(ModelError::BadMu(bad));
    }
    let grid = &model.grid;
    if f.len() != grid.len() {
        return Err(ModelError::Invalid(format!("grid function has length {}, grid has {} nodes", f.len(), grid.len())));
    }
    let sqrt_w: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
    let a = CMatrix::from_fn(grid.len(), mus.len(), |r, c| {
        (Complex64::new(0.0, -1.0) * mus[c] * grid.nodes()[r]).exp() * sqrt_w[r]
    });
    let b = CVector::from_fn(grid.len(), |r, _| f[r] * sqrt_w[r]);
    let (_, residual) = least_squares(&a, &b, 1e-13)?;
    Ok(residual)
}

/// A nested sequence of sample points on the line `Im μ = −1`: the real
/// parts are the base-2 van der Corput sequence mapped to `[−2, 2]`, so
/// every prefix refines the previous one.
pub fn nested_mus(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|k| {
            let mut x = 0.0;
            let mut denom = 1.0;
            let mut k = k;
            while k > 0 {
                denom *= 2.0;
                x += (k & 1) as f64 / denom;
                k >>= 1;
            }
            Complex64::new(-2.0 + 4.0 * x, -1.0)
        })
        .collect()
}

/// `‖(A_B − λ_j)^{-1} g‖` along a path in the lower half plane.
pub fn fo_blowup_scan(model: &FoModel, path: &[Complex64], g: &CVector) -> Result<Vec<f64>> {
    path.iter().map(|&l| Ok(model.grid.norm(&fo_resolvent(model, l, g)?))).collect()
}

/// Operator norm of `(A_B − λ)^{-1}` on `L²(0, ∞)`.
///
/// Multiplication by `e^{−i Re λ x}` is unitary and shifts `λ` by its real
/// part, so only `η = −Im λ` matters. The Volterra operator with kernel
/// `e^{−η(x−t)}` is discretized by the trapezoid rule on `[0, 40/η]` with
/// `nodes` points, long enough for the kernel to decay by `e^{−40}`, and
/// its largest singular value in the weighted inner product is found by
/// power iteration using O(n) recursions for the operator and its adjoint.
/// Because the column spaces `T̄ = T̃̄` are all of `L²`, this is also the
/// norm of the bordered resolvent.
pub fn fo_resolvent_norm(lambda: Complex64, nodes: usize) -> Result<f64> {
    lower_half(lambda)?;
    if nodes < 16 {
        return Err(ModelError::Invalid(format!("need at least 16 nodes, got {nodes}")));
    }
    let eta = -lambda.im;
    let n = nodes;
    let h = 40.0 / eta / (n - 1) as f64;
    let a = (-eta * h).exp();
    let mut d = vec![h; n];
    d[0] = 0.5 * h;
    d[n - 1] = 0.5 * h;
    let sd: Vec<f64> = d.iter().map(|x| x.sqrt()).collect();

    let apply = |g: &[f64], out: &mut [f64]| {
        let mut s = 0.0;
        out[0] = 0.0;
        for i in 1..n {
            let c = if i == 1 { 0.5 } else { 1.0 };
            s = a * (s + c * g[i - 1]);
            out[i] = h * (s + 0.5 * g[i]);
        }
    };
    let apply_t = |u: &[f64], out: &mut [f64]| {
        let mut t = 0.0;
        out[n - 1] = 0.5 * h * u[n - 1];
        for j in (0..n - 1).rev() {
            t = a * (t + u[j + 1]);
            out[j] = if j == 0 { 0.5 * h * t } else { h * (t + 0.5 * u[j]) };
        }
    };

    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut tmp = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut sigma = 0.0;
    for _ in 0..2000 {
        // y = G v with G = D^{1/2} K D^{-1/2}.
        for i in 0..n {
            tmp[i] = v[i] / sd[i];
        }
        apply(&tmp, &mut y);
        for i in 0..n {
            y[i] *= sd[i];
        }
        let gv: f64 = y.iter().map(|x| x * x).sum::<f64>().sqrt();
        // v ← Gᵀ y / ‖Gᵀ y‖.
        for i in 0..n {
            tmp[i] = y[i] * sd[i];
        }
        apply_t(&tmp, &mut v);
        let norm: f64 = v.iter().zip(&sd).map(|(x, s)| (x / s) * (x / s)).sum::<f64>().sqrt();
        for (x, s) in v.iter_mut().zip(&sd) {
            *x /= s * norm;
        }
        if (gv - sigma).abs() <= 1e-13 * gv {
            sigma = gv;
            break;
        }
        sigma = gv;
    }
    Ok(sigma)
}
