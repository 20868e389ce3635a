//! Finite-dimensional adjoint pairs with boundary maps.
//!
//! The state space is `H = ℂ^m`. Elements of the maximal domain of `Ã*`
//! are pairs `(x, a)` with `x ∈ ℂ^m` the state and `a ∈ ℂ^h` extra boundary
//! coordinates, so the domain is `ℂ^(m+h)` and `Ã*` acts as an `m × (m+h)`
//! matrix `T`. Likewise the domain of `A*` is `ℂ^(m+k)` with action `T̃`.
//! `E` and `Ẽ` denote the projections onto the state coordinates.
//!
//! The abstract Green formula
//!
//! ```text
//! (Ã*u, v) − (u, A*v) = (Γ1 u, Γ̃2 v) − (Γ2 u, Γ̃1 v)
//! ```
//!
//! becomes the matrix identity `Ẽ*T − T̃*E = Γ̃2*Γ1 − Γ̃1*Γ2`. Given the
//! interior block of `T` and the four boundary maps, this identity
//! determines the boundary columns of `T` and all of `T̃`, which is what
//! [`make_triple`] does. The minimal domain `ker Γ1 ∩ ker Γ2` then has
//! dimension `m − k`.

use weyl_numerics::linalg::singular_values;
use weyl_numerics::{CMatrix, CVector, Complex64};

use crate::error::CoreError;
use crate::Result;

/// Relative tolerance for the rank and compatibility checks of the
/// boundary data.
pub const STRUCTURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteTriple {
    /// Optional label carried into reports.
    pub id: String,
    m: usize,
    h: usize,
    k: usize,
    t: CMatrix,
    ttilde: CMatrix,
    g1: CMatrix,
    g2: CMatrix,
    gt1: CMatrix,
    gt2: CMatrix,
}

fn shape_check(name: &str, a: &CMatrix, rows: usize, cols: usize) -> Result<()> {
    if a.shape() != (rows, cols) {
        return Err(CoreError::DimensionMismatch(format!(
            "{name} is {}x{}, expected {rows}x{cols}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

fn numerical_rank(a: &CMatrix) -> usize {
    let s = singular_values(a);
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x > STRUCTURE_TOL * top).count()
}

fn stack(top: &CMatrix, bottom: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(top.nrows() + bottom.nrows(), top.ncols());
    out.rows_mut(0, top.nrows()).copy_from(top);
    out.rows_mut(top.nrows(), bottom.nrows()).copy_from(bottom);
    out
}

/// Builds a triple from the interior action `t_int` (`m × m`) and the
/// boundary maps `g1` (`h × (m+h)`), `g2` (`k × (m+h)`), `gt1`
/// (`k × (m+k)`), `gt2` (`h × (m+k)`).
///
/// Fails if either stacked boundary map is not surjective or if the maps
/// violate the part of the Green identity that involves only boundary
/// coordinates, `Γ̃2_b* Γ1_a = Γ̃1_b* Γ2_a`.
pub fn make_triple(t_int: &CMatrix, g1: &CMatrix, g2: &CMatrix, gt1: &CMatrix, gt2: &CMatrix) -> Result<FiniteTriple> {
    let m = t_int.nrows();
    shape_check("T", t_int, m, m)?;
    let h = g1.nrows();
    let k = g2.nrows();
    shape_check("Γ1", g1, h, m + h)?;
    shape_check("Γ2", g2, k, m + h)?;
    shape_check("Γ̃1", gt1, k, m + k)?;
    shape_check("Γ̃2", gt2, h, m + k)?;
    for (name, a) in [("Γ1", g1), ("Γ2", g2), ("Γ̃1", gt1), ("Γ̃2", gt2), ("T", t_int)] {
        if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(CoreError::DimensionMismatch(format!("{name} has non-finite entries")));
        }
    }

    let rank = numerical_rank(&stack(g1, g2));
    if rank != h + k {
        return Err(CoreError::RankDeficientBoundary { which: "(Γ1; Γ2)", rank, needed: h + k });
    }
    let rank = numerical_rank(&stack(gt1, gt2));
    if rank != h + k {
        return Err(CoreError::RankDeficientBoundary { which: "(Γ̃1; Γ̃2)", rank, needed: h + k });
    }

    // R = Γ̃2*Γ1 − Γ̃1*Γ2, of size (m+k) × (m+h).
    let r = gt2.adjoint() * g1 - gt1.adjoint() * g2;
    let scale = (gt2.norm() * g1.norm() + gt1.norm() * g2.norm()).max(1.0);
    let corner = r.view((m, m), (k, h)).norm();
    if corner > STRUCTURE_TOL * scale {
        return Err(CoreError::IncompatibleBoundary(corner));
    }

    let mut t = CMatrix::zeros(m, m + h);
    t.columns_mut(0, m).copy_from(t_int);
    t.columns_mut(m, h).copy_from(&r.view((0, m), (m, h)));

    // T̃* restricted to state columns: rows 0..m give T_int − R_xx, rows
    // m.. give −R_bx.
    let mut ttilde_adj = CMatrix::zeros(m + k, m);
    ttilde_adj.rows_mut(0, m).copy_from(&(t_int - r.view((0, 0), (m, m))));
    ttilde_adj.rows_mut(m, k).copy_from(&(-r.view((m, 0), (k, m))));
    let ttilde = ttilde_adj.adjoint();

    Ok(FiniteTriple {
        id: String::new(),
        m,
        h,
        k,
        t,
        ttilde,
        g1: g1.clone(),
        g2: g2.clone(),
        gt1: gt1.clone(),
        gt2: gt2.clone(),
    })
}

impl FiniteTriple {
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    /// State dimension `m`.
    pub fn state_dim(&self) -> usize {
        self.m
    }
    /// Dimension of the range of `Γ1`.
    pub fn h(&self) -> usize {
        self.h
    }
    /// Dimension of the range of `Γ2`.
    pub fn k(&self) -> usize {
        self.k
    }
    /// Dimension of the domain of `Ã*`, namely `m + h`.
    pub fn domain_dim(&self) -> usize {
        self.m + self.h
    }
    /// Dimension of the domain of `A*`, namely `m + k`.
    pub fn adjoint_domain_dim(&self) -> usize {
        self.m + self.k
    }

    /// Action of `Ã*`, `m × (m+h)`.
    pub fn t(&self) -> &CMatrix {
        &self.t
    }
    /// Action of `A*`, `m × (m+k)`.
    pub fn ttilde(&self) -> &CMatrix {
        &self.ttilde
    }
    pub fn g1(&self) -> &CMatrix {
        &self.g1
    }
    pub fn g2(&self) -> &CMatrix {
        &self.g2
    }
    pub fn gt1(&self) -> &CMatrix {
        &self.gt1
    }
    pub fn gt2(&self) -> &CMatrix {
        &self.gt2
    }
    /// Interior block `T E*`.
    pub fn t_interior(&self) -> CMatrix {
        self.t.columns(0, self.m).into_owned()
    }

    /// Projection of a domain vector onto its state coordinates.
    pub fn state_part(&self, u: &CVector) -> CVector {
        u.rows(0, self.m).into_owned()
    }

    /// `|(Ã*u, v) − (u, A*v) − (Γ1u, Γ̃2v) + (Γ2u, Γ̃1v)|` for `u ∈ ℂ^(m+h)`
    /// and `v ∈ ℂ^(m+k)`.
    pub fn green_residual(&self, u: &CVector, v: &CVector) -> Result<f64> {
        if u.len() != self.domain_dim() || v.len() != self.adjoint_domain_dim() {
            return Err(CoreError::DimensionMismatch(format!(
                "Green pairing needs vectors of length {} and {}, got {} and {}",
                self.domain_dim(),
                self.adjoint_domain_dim(),
                u.len(),
                v.len()
            )));
        }
        let inner = |a: &CVector, b: &CVector| b.dotc(a);
        let eu = self.state_part(u);
        let ev = v.rows(0, self.m).into_owned();
        let lhs = inner(&(&self.t * u), &ev) - inner(&eu, &(&self.ttilde * v));
        let rhs = inner(&(&self.g1 * u), &(&self.gt2 * v)) - inner(&(&self.g2 * u), &(&self.gt1 * v));
        Ok((lhs - rhs).norm())
    }

    /// Frobenius norm of `Ẽ*T − T̃*E − (Γ̃2*Γ1 − Γ̃1*Γ2)`.
    pub fn green_matrix_residual(&self) -> f64 {
        let (m, h, k) = (self.m, self.h, self.k);
        let mut lhs = CMatrix::zeros(m + k, m + h);
        lhs.rows_mut(0, m).copy_from(&self.t);
        let tt_adj = self.ttilde.adjoint();
        let mut sub = lhs.columns_mut(0, m);
        sub -= tt_adj;
        let r = self.gt2.adjoint() * &self.g1 - self.gt1.adjoint() * &self.g2;
        (lhs - r).norm()
    }

    /// The triple of the adjoint pair: `A*` with `(Γ̃1, Γ̃2)` as boundary
    /// maps and `(Γ1, Γ2)` as the dual maps. Extensions of the adjoint
    /// with parameter `B*` are the adjoints of extensions with `B`.
    pub fn adjoint(&self) -> FiniteTriple {
        FiniteTriple {
            id: if self.id.is_empty() { String::new() } else { format!("{}-adjoint", self.id) },
            m: self.m,
            h: self.k,
            k: self.h,
            t: self.ttilde.clone(),
            ttilde: self.t.clone(),
            g1: self.gt1.clone(),
            g2: self.gt2.clone(),
            gt1: self.g1.clone(),
            gt2: self.g2.clone(),
        }
    }

    /// Checks a supplied adjoint action against the derived one.
    pub fn verify_ttilde(&self, supplied: &CMatrix) -> Result<()> {
        shape_check("T̃", supplied, self.m, self.m + self.k)?;
        let diff = (supplied - &self.ttilde).norm();
        if diff > STRUCTURE_TOL * self.ttilde.norm().max(1.0) {
            return Err(CoreError::AdjointMismatch(diff));
        }
        Ok(())
    }

    /// Overwrites one entry of `Γ1` without re-deriving anything. Only
    /// useful for negative tests of the Green identity.
    pub fn corrupt_g1(&mut self, row: usize, col: usize, delta: Complex64) {
        self.g1[(row, col)] += delta;
    }
}
