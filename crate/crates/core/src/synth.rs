//! Synthetic triples for tests, checks and the command line.

use rand::Rng;
use rand_distr::StandardNormal;
use weyl_numerics::{CMatrix, Complex64, Factorized};

use crate::error::CoreError;
use crate::triple::{make_triple, FiniteTriple};
use crate::Result;

fn gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    })
}

fn real_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, 0.0)
    })
}

/// A random triple with state dimension `m` and boundary dimensions
/// `h`, `k`.
///
/// `T_int` has Gaussian entries of variance `1/m`, so its spectrum stays in
/// a disc of radius about `√2`. The boundary block of `Γ̃2` is solved for
/// so that the boundary maps are compatible.
pub fn random_triple<R: Rng + ?Sized>(rng: &mut R, m: usize, h: usize, k: usize) -> Result<FiniteTriple> {
    if h > m || k > m {
        return Err(CoreError::DimensionMismatch(format!(
            "boundary dimensions h = {h}, k = {k} cannot exceed the state dimension {m}"
        )));
    }
    let t = gaussian(rng, m, m, (0.5 / m.max(1) as f64).sqrt());
    let g1 = gaussian(rng, h, m + h, 0.5f64.sqrt());
    let g2 = gaussian(rng, k, m + h, 0.5f64.sqrt());
    let gt1 = gaussian(rng, k, m + k, 0.5f64.sqrt());
    let mut gt2 = gaussian(rng, h, m + k, 0.5f64.sqrt());

    // Γ̃2_b* Γ1_a = Γ̃1_b* Γ2_a  ⇔  Γ̃2_b = Γ1_a^{-*} Γ2_a* Γ̃1_b.
    let g1a = g1.columns(m, h).into_owned();
    let rhs = g2.columns(m, h).adjoint() * gt1.columns(m, k);
    let gt2b = Factorized::new(&g1a.adjoint())?.solve_matrix(&rhs)?;
    gt2.columns_mut(m, k).copy_from(&gt2b);

    make_triple(&t, &g1, &g2, &gt1, &gt2)
}

/// A selfadjoint triple: `T̃ = T` and `Γ̃i = Γi`, with `h = k`.
///
/// `Γ1` reads the `h` extra coordinates and `Γ2` is a random functional of
/// the state. With `real` set, every matrix is real, so `M(λ̄)` is the
/// complex conjugate of `M(λ)` for real `B`.
pub fn selfadjoint_toy<R: Rng + ?Sized>(rng: &mut R, m: usize, h: usize, real: bool) -> Result<FiniteTriple> {
    if h > m {
        return Err(CoreError::DimensionMismatch(format!("h = {h} exceeds the state dimension {m}")));
    }
    let draw = |rng: &mut R, r, c| if real { real_gaussian(rng, r, c, 1.0) } else { gaussian(rng, r, c, 0.5f64.sqrt()) };
    let x = draw(rng, m, m);
    let t = (&x + x.adjoint()) * Complex64::new(0.5 / (m as f64).sqrt(), 0.0);
    let mut g1 = CMatrix::zeros(h, m + h);
    g1.view_mut((0, m), (h, h)).fill_with_identity();
    let mut g2 = CMatrix::zeros(h, m + h);
    g2.columns_mut(0, m).copy_from(&draw(rng, h, m));
    make_triple(&t, &g1, &g2, &g1, &g2)
}

/// Appends a hidden block: the new state space is `ℂ^m ⊕ ℂ^p` with
/// `hidden` acting on the second summand, and every boundary map
/// vanishes there. The result has the same M-function at common resolvent
/// points, while `σ(hidden)` joins the spectrum of every extension.
pub fn direct_sum_hidden(tr: &FiniteTriple, hidden: &CMatrix) -> Result<FiniteTriple> {
    if !hidden.is_square() {
        return Err(CoreError::DimensionMismatch(format!(
            "hidden block must be square, got {}x{}",
            hidden.nrows(),
            hidden.ncols()
        )));
    }
    let p = hidden.nrows();
    if p == 0 {
        return Ok(tr.clone());
    }
    let m = tr.state_dim();
    let widen = |g: &CMatrix| {
        let extra = g.ncols() - m;
        let mut out = CMatrix::zeros(g.nrows(), m + p + extra);
        out.columns_mut(0, m).copy_from(&g.columns(0, m));
        out.columns_mut(m + p, extra).copy_from(&g.columns(m, extra));
        out
    };
    let mut t = CMatrix::zeros(m + p, m + p);
    t.view_mut((0, 0), (m, m)).copy_from(&tr.t_interior());
    t.view_mut((m, m), (p, p)).copy_from(hidden);
    let out = make_triple(&t, &widen(tr.g1()), &widen(tr.g2()), &widen(tr.gt1()), &widen(tr.gt2()))?;
    let id = if tr.id.is_empty() { String::new() } else { format!("{}+hidden{p}", tr.id) };
    Ok(out.with_id(id))
}
