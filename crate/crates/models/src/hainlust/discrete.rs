use serde::{Deserialize, Serialize};
use weyl_numerics::{eig_near, spectral_norm, CMatrix, Complex64, Factorized};

use super::essran::hl_essran;
use super::shoot::{hl_m_matrix_with, DEFAULT_ODE_TOL};
use super::{cot, HlModel};
use crate::error::ModelError;
use crate::Result;

/// Grid size used by bordered scans.
pub const DEFAULT_SCAN_NODES: usize = 128;
/// Distance from the real axis at which two-sided jumps are sampled.
pub const DEFAULT_SCAN_EPSILON: f64 = 1e-6;

const GRID_CLEARANCE: f64 = 1e-3;

/// Finite-difference form of the operator on `n` nodes `x_j = j/(n−1)`.
///
/// Unknowns are ordered `(y_0 … y_{n−1}, z_0 … z_{n−1})`. The Robin
/// conditions are imposed through ghost nodes, which keeps second order at
/// the ends; the coupling and `u` blocks are diagonal.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub matrix: CMatrix,
    pub nodes: Vec<f64>,
    /// Whether each node lies in `W`.
    pub in_w: Vec<bool>,
}

impl Discretization {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    /// Mask of the coordinates belonging to `L²(0,1) ⊕ L²(W)`.
    pub fn h1_mask(&self) -> Vec<bool> {
        std::iter::repeat_n(true, self.n()).chain(self.in_w.iter().copied()).collect()
    }

    /// `(A − λ)^{-1}`. When the lower-right block is diagonal, as produced
    /// by [`hl_discretize`], the `u` coordinates are eliminated first and
    /// only the Schur complement on the first block is factorized.
    pub fn resolvent(&self, lambda: Complex64) -> Result<CMatrix> {
        if let Some(r) = self.block_resolvent(lambda)? {
            return Ok(r);
        }
        let dim = self.matrix.nrows();
        let mut shifted = self.matrix.clone();
        for i in 0..dim {
            shifted[(i, i)] -= lambda;
        }
        let lu = Factorized::new(&shifted).map_err(|_| ModelError::LambdaInSpectrum(lambda))?;
        Ok(lu.solve_matrix(&CMatrix::identity(dim, dim))?)
    }

    fn block_resolvent(&self, lambda: Complex64) -> Result<Option<CMatrix>> {
        let n = self.n();
        let a = &self.matrix;
        if a.nrows() != 2 * n {
            return Ok(None);
        }
        let diagonal = |r0: usize, c0: usize| (0..n).all(|i| (0..n).all(|j| i == j || a[(r0 + i, c0 + j)].norm() == 0.0));
        if !(diagonal(0, n) && diagonal(n, 0) && diagonal(n, n)) {
            return Ok(None);
        }
        let d: Vec<Complex64> = (0..n).map(|j| a[(n + j, n + j)] - lambda).collect();
        let scale = a.camax().max(lambda.norm());
        if d.iter().any(|z| z.norm() <= 1e-12 * scale) {
            return Ok(None);
        }
        let wr: Vec<Complex64> = (0..n).map(|j| a[(j, n + j)] / d[j]).collect();
        let wl: Vec<Complex64> = (0..n).map(|j| a[(n + j, j)] / d[j]).collect();
        let mut schur = a.view((0, 0), (n, n)).into_owned();
        for j in 0..n {
            schur[(j, j)] -= lambda + a[(j, n + j)] * wl[j];
        }
        let lu = Factorized::new(&schur).map_err(|_| ModelError::LambdaInSpectrum(lambda))?;
        let s_inv = lu.solve_matrix(&CMatrix::identity(n, n))?;
        let mut r = CMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let s = s_inv[(i, j)];
                r[(i, j)] = s;
                r[(i, n + j)] = -s * wr[j];
                r[(n + i, j)] = -wl[i] * s;
                r[(n + i, n + j)] = wl[i] * s * wr[j];
            }
            r[(n + i, n + i)] += 1.0 / d[i];
        }
        Ok(Some(r))
    }

    fn is_real(&self) -> bool {
        self.matrix.iter().all(|z| z.im == 0.0)
    }
}

/// Spectral norm, through a real matrix when every entry is real or every
/// entry is imaginary.
fn jump_norm(j: &CMatrix) -> f64 {
    let real_part = j.iter().all(|z| z.im == 0.0);
    if real_part || j.iter().all(|z| z.re == 0.0) {
        let r = j.map(|z| if real_part { z.re } else { z.im });
        return r.singular_values().iter().copied().fold(0.0, f64::max);
    }
    spectral_norm(j)
}

pub fn hl_discretize(model: &HlModel, n: usize) -> Result<Discretization> {
    if n < 32 {
        return Err(ModelError::Invalid(format!("discretization needs n ≥ 32, got {n}")));
    }
    let h = 1.0 / (n - 1) as f64;
    let nodes: Vec<f64> = (0..n).map(|j| j as f64 * h).collect();
    let mut a = CMatrix::zeros(2 * n, 2 * n);
    let c = |x: f64| Complex64::new(x, 0.0);
    let inv_h2 = 1.0 / (h * h);
    for j in 0..n {
        let x = nodes[j];
        a[(j, j)] = c(2.0 * inv_h2) + model.q().eval(x);
        if j == 0 {
            a[(0, 1)] = c(-2.0 * inv_h2);
            a[(0, 0)] -= c(2.0 * cot(model.alpha()) / h);
        } else if j == n - 1 {
            a[(j, j - 1)] = c(-2.0 * inv_h2);
            a[(j, j)] += c(2.0 * cot(model.beta()) / h);
        } else {
            a[(j, j - 1)] = c(-inv_h2);
            a[(j, j + 1)] = c(-inv_h2);
        }
        let w = model.w().eval(x);
        a[(j, n + j)] = w;
        a[(n + j, j)] = w;
        a[(n + j, n + j)] = model.u().eval(x);
    }
    let in_w = nodes.iter().map(|&x| model.in_w(x)).collect();
    Ok(Discretization { matrix: a, nodes, in_w })
}

/// The eigenvalue of the `n`-node discretization closest to `target`.
pub fn hl_discrete_eig_near(model: &HlModel, n: usize, target: Complex64) -> Result<Complex64> {
    let d = hl_discretize(model, n)?;
    Ok(eig_near(&d.matrix, target, 1e-13)?.value)
}

fn compress(r: &CMatrix, rows: &[bool], cols: &[bool]) -> CMatrix {
    CMatrix::from_fn(r.nrows(), r.ncols(), |i, j| if rows[i] && cols[j] { r[(i, j)] } else { Complex64::new(0.0, 0.0) })
}

/// Norms of `R(λ) − R(λ̄)` for the full resolvent and for its compression
/// to `L²(0,1) ⊕ L²(W)`: the jump across the real axis at `Re λ`.
pub fn hl_bordered_jump(disc: &Discretization, lambda: Complex64) -> Result<(f64, f64)> {
    if lambda.im == 0.0 {
        return Err(ModelError::Invalid(format!("jump needs a nonreal λ, got {lambda}")));
    }
    let r = disc.resolvent(lambda)?;
    // For real data (A − λ̄)^{-1} is the entrywise conjugate, bit for bit.
    let r_bar = if disc.is_real() { r.map(|z| z.conj()) } else { disc.resolvent(lambda.conj())? };
    let diff = r - r_bar;
    let mask = disc.h1_mask();
    Ok((jump_norm(&diff), jump_norm(&compress(&diff, &mask, &mask))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BorderedRow {
    pub lambda: Complex64,
    /// `m11, m12, m21, m22`; NaN at eigenvalues.
    pub m: [Complex64; 4],
    pub denom_abs: f64,
    pub full_jump: f64,
    pub bordered_jump: f64,
}

impl BorderedRow {
    pub fn compute(model: &HlModel, disc: &Discretization, lambda: Complex64) -> Result<Self> {
        let distance = model.singular_distance(lambda);
        if distance < GRID_CLEARANCE {
            return Err(ModelError::GridHitsEssranW { lambda, distance });
        }
        let (m, denom_abs) = match hl_m_matrix_with(model, lambda, DEFAULT_ODE_TOL) {
            Ok((m, s)) => ([m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]], s.denominator(model.beta()).norm()),
            Err(ModelError::AtEigenvalue { denominator, .. }) => ([Complex64::new(f64::NAN, f64::NAN); 4], denominator),
            Err(e) => return Err(e),
        };
        let (full_jump, bordered_jump) = hl_bordered_jump(disc, lambda)?;
        Ok(Self { lambda, m, denom_abs, full_jump, bordered_jump })
    }
}

/// M-matrix and two-sided resolvent jumps on a grid of nonreal points,
/// using an `n`-node discretization.
pub fn hl_bordered_scan(model: &HlModel, grid: &[Complex64], n: usize) -> Result<Vec<BorderedRow>> {
    let (_, on_w) = hl_essran(model);
    if let Some((&lambda, distance)) =
        grid.iter().map(|l| (l, on_w.distance(*l))).find(|&(_, d)| d < GRID_CLEARANCE)
    {
        return Err(ModelError::GridHitsEssranW { lambda, distance });
    }
    let disc = hl_discretize(model, n)?;
    grid.iter().map(|&l| BorderedRow::compute(model, &disc, l)).collect()
}

/// `‖(I−P)R(λ)P‖ + ‖P R(λ)(I−P)‖` for the projection `P` onto
/// `L²(0,1) ⊕ L²(W)`; zero exactly when that subspace reduces the
/// discretized operator.
pub fn hl_reducing_check(model: &HlModel, lambda: Complex64, n: usize) -> Result<f64> {
    hl_reducing_check_with(model, lambda, n, |x| model.in_w(x))
}

/// As [`hl_reducing_check`], with the second component projected onto the
/// indicator `keep` instead of `W`.
pub fn hl_reducing_check_with(model: &HlModel, lambda: Complex64, n: usize, keep: impl Fn(f64) -> bool) -> Result<f64> {
    let disc = hl_discretize(model, n)?;
    let r = disc.resolvent(lambda)?;
    let p: Vec<bool> = std::iter::repeat_n(true, n).chain(disc.nodes.iter().map(|&x| keep(x))).collect();
    let q: Vec<bool> = p.iter().map(|b| !b).collect();
    Ok(spectral_norm(&compress(&r, &q, &p)) + spectral_norm(&compress(&r, &p, &q)))
}

#[cfg(test)]
mod tests {
    use super::super::Piecewise;
    use super::*;
    use std::f64::consts::PI;
    use weyl_numerics::{c64, eigenvalues};

    fn neumann_fd(k: usize, n: usize) -> f64 {
        let h = 1.0 / (n - 1) as f64;
        4.0 / (h * h) * (k as f64 * PI * h / 2.0).sin().powi(2)
    }

    #[test]
    fn decoupled_spectrum() {
        let m = HlModel::decoupled_neumann(5.0);
        let n = 48;
        let mut ev = eigenvalues(&hl_discretize(&m, n).unwrap().matrix).unwrap();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        let fives = ev.iter().filter(|z| (*z - 5.0).norm() < 1e-9).count();
        assert_eq!(fives, n);
        let upper: Vec<_> = ev.iter().filter(|z| (*z - 5.0).norm() >= 1e-9).collect();
        for (k, z) in upper.iter().enumerate() {
            assert!((*z - neumann_fd(k, n)).norm() < 1e-8 * neumann_fd(k, n).max(1.0), "{k}: {z}");
        }
    }

    #[test]
    fn second_order_convergence() {
        let m = HlModel::decoupled_neumann(5.0);
        let exact = PI * PI;
        let e1 = (hl_discrete_eig_near(&m, 64, c64(9.8, 0.0)).unwrap() - exact).norm();
        let e2 = (hl_discrete_eig_near(&m, 127, c64(9.8, 0.0)).unwrap() - exact).norm();
        let ratio = e1 / e2;
        assert!(ratio > 3.8 && ratio < 4.2, "{ratio}");
    }

    #[test]
    fn real_data_gives_real_spectrum() {
        let q = Piecewise::polynomial(vec![c64(1.0, 0.0), c64(-2.0, 0.0)]).unwrap();
        let u = Piecewise::polynomial(vec![c64(3.0, 0.0), c64(1.0, 0.0)]).unwrap();
        let w = Piecewise::steps(&[0.0, 0.4, 1.0], &[0.8, 0.0]).unwrap();
        let m = HlModel::new(q, u, w, 0.9, 2.0).unwrap();
        let ev = eigenvalues(&hl_discretize(&m, 40).unwrap().matrix).unwrap();
        assert!(ev.iter().all(|z| z.im.abs() < 1e-8));
    }

    #[test]
    fn block_elimination_matches_dense_inverse() {
        let q = Piecewise::polynomial(vec![c64(0.5, 0.2), c64(-1.0, 0.0)]).unwrap();
        let u = Piecewise::polynomial(vec![c64(2.0, -0.3), c64(1.0, 0.0)]).unwrap();
        let w = Piecewise::steps(&[0.0, 0.6, 1.0], &[1.3, 0.0]).unwrap();
        let m = HlModel::new(q, u, w, 1.1, 2.2).unwrap();
        let d = hl_discretize(&m, 40).unwrap();
        let l = c64(2.5, 0.7);
        let mut shifted = d.matrix.clone();
        for i in 0..80 {
            shifted[(i, i)] -= l;
        }
        let dense = shifted.try_inverse().unwrap();
        let fast = d.resolvent(l).unwrap();
        assert!((fast - &dense).camax() < 1e-12 * dense.camax());
        assert!(!d.is_real());
    }

    #[test]
    fn conjugate_resolvent_for_real_data() {
        let d = hl_discretize(&HlModel::step(), 40).unwrap();
        assert!(d.is_real());
        let l = c64(2.5, 0.7);
        let r = d.resolvent(l).unwrap();
        assert_eq!(d.resolvent(l.conj()).unwrap(), r.map(|z| z.conj()));
    }

    #[test]
    fn step_model_reduces() {
        let m = HlModel::step();
        assert!(hl_reducing_check(&m, c64(10.0, 5.0), 64).unwrap() < 1e-10);
        let corrupted = hl_reducing_check_with(&m, c64(10.0, 5.0), 64, |x| x < 0.25).unwrap();
        assert!(corrupted > 1e-2, "{corrupted}");
    }

    #[test]
    fn full_w_reduces_trivially() {
        let half_pi = PI / 2.0;
        let m = HlModel::new(Piecewise::constant(0.0), Piecewise::constant(2.0), Piecewise::constant(1.0), half_pi, half_pi)
            .unwrap();
        assert_eq!(hl_reducing_check(&m, c64(1.0, 1.0), 40).unwrap(), 0.0);
    }

    #[test]
    fn empty_w_leaves_the_schroedinger_block() {
        let m = HlModel::decoupled_neumann(5.0);
        let d = hl_discretize(&m, 40).unwrap();
        let l = c64(3.0, 0.5);
        let r = d.resolvent(l).unwrap();
        let mask = d.h1_mask();
        let bordered = compress(&r, &mask, &mask);
        let mut block = d.matrix.view((0, 0), (40, 40)).into_owned();
        for i in 0..40 {
            block[(i, i)] -= l;
        }
        let direct = block.try_inverse().unwrap();
        assert!((bordered.view((0, 0), (40, 40)) - direct).camax() < 1e-12);
        assert!(bordered.view((40, 0), (40, 80)).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn step_model_jumps() {
        let m = HlModel::step();
        let d = hl_discretize(&m, DEFAULT_SCAN_NODES).unwrap();
        let (full3, bordered3) = hl_bordered_jump(&d, c64(3.0, DEFAULT_SCAN_EPSILON)).unwrap();
        let (_, bordered2) = hl_bordered_jump(&d, c64(2.0, DEFAULT_SCAN_EPSILON)).unwrap();
        assert!(bordered3 < 1e-4, "{bordered3}");
        assert!(full3 > 1e-1, "{full3}");
        assert!(bordered2 > 1e-1, "{bordered2}");
    }

    #[test]
    fn scan_refuses_points_near_the_range_on_w() {
        let m = HlModel::step();
        let grid = [c64(1.0, 0.1), c64(2.0, 1e-4)];
        assert!(matches!(hl_bordered_scan(&m, &grid, 40), Err(ModelError::GridHitsEssranW { .. })));
        let rows = hl_bordered_scan(&m, &grid[..1], 40).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].m[1], rows[0].m[2]);
    }
}
