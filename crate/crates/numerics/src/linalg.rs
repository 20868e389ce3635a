use nalgebra::linalg::LU;
use nalgebra::{DMatrix, DVector, Dyn};
use num_complex::Complex64;

use crate::{NumericsError, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Rank cutoff relative to the largest singular value.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Relative pivot threshold below which [`solve_linear`] reports singularity.
const PIVOT_TOL: f64 = 1e-13;

/// Solves `A x = b` by LU with partial pivoting.
pub fn solve_linear(a: &CMatrix, b: &CVector) -> Result<CVector> {
    if !a.is_square() {
        return Err(NumericsError::DimensionMismatch(format!(
            "solve_linear needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.nrows() != b.len() {
        return Err(NumericsError::DimensionMismatch(format!(
            "matrix has {} rows but right-hand side has length {}",
            a.nrows(),
            b.len()
        )));
    }
    if a.nrows() == 0 {
        return Ok(CVector::zeros(0));
    }
    let scale = a.norm();
    let lu = a.clone().lu();
    let pivot = lu
        .u()
        .diagonal()
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min);
    let threshold = PIVOT_TOL * scale;
    if !(pivot > threshold) {
        return Err(NumericsError::SingularMatrix { pivot, threshold });
    }
    lu.solve(b).ok_or(NumericsError::SingularMatrix { pivot, threshold })
}

/// An LU factorization kept around for repeated solves.
#[derive(Debug, Clone)]
pub struct Factorized {
    lu: LU<Complex64, Dyn, Dyn>,
    n: usize,
}

impl Factorized {
    /// Factors a square matrix, failing under the same pivot rule as
    /// [`solve_linear`].
    pub fn new(a: &CMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(NumericsError::DimensionMismatch(format!(
                "factorization needs a square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let scale = a.norm();
        let lu = a.clone().lu();
        let pivot = lu.u().diagonal().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        let threshold = PIVOT_TOL * scale;
        if a.nrows() > 0 && !(pivot > threshold) {
            return Err(NumericsError::SingularMatrix { pivot, threshold });
        }
        Ok(Self { lu, n: a.nrows() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &CVector) -> Result<CVector> {
        self.solve_matrix(&CMatrix::from_column_slice(b.len(), 1, b.as_slice()))
            .map(|x| x.column(0).into_owned())
    }

    pub fn solve_matrix(&self, b: &CMatrix) -> Result<CMatrix> {
        if b.nrows() != self.n {
            return Err(NumericsError::DimensionMismatch(format!(
                "factorization has dimension {} but right-hand side has {} rows",
                self.n,
                b.nrows()
            )));
        }
        if self.n == 0 {
            return Ok(b.clone());
        }
        self.lu
            .solve(b)
            .ok_or(NumericsError::SingularMatrix { pivot: 0.0, threshold: 0.0 })
    }
}

/// Minimum-norm least-squares solution of `A x ≈ b` and the residual
/// `‖A x − b‖`.
///
/// Singular values below `rcond` times the largest are treated as zero.
pub fn least_squares(a: &CMatrix, b: &CVector, rcond: f64) -> Result<(CVector, f64)> {
    if a.nrows() != b.len() {
        return Err(NumericsError::DimensionMismatch(format!(
            "matrix has {} rows but right-hand side has length {}",
            a.nrows(),
            b.len()
        )));
    }
    if a.ncols() == 0 || a.nrows() == 0 {
        return Ok((CVector::zeros(a.ncols()), b.norm()));
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let x = svd
        .solve(b, rcond * smax)
        .map_err(|e| NumericsError::DimensionMismatch(e.to_string()))?;
    let r = (a * &x - b).norm();
    Ok((x, r))
}

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Smallest singular value of a square matrix; zero for empty input.
pub fn smallest_singular_value(a: &CMatrix) -> f64 {
    singular_values(a).last().copied().unwrap_or(0.0)
}

/// Orthonormal basis of the numerical column span of `columns`.
///
/// Singular directions whose singular value falls below `tol` times the
/// largest one are discarded. Columns come back ordered by decreasing
/// singular value.
pub fn orthonormal_basis(columns: &CMatrix, tol: f64) -> CMatrix {
    let n = columns.nrows();
    if n == 0 || columns.ncols() == 0 {
        return CMatrix::zeros(n, 0);
    }
    let svd = columns.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors were requested");
    let sigma = &svd.singular_values;
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    if !(smax > 0.0) {
        return CMatrix::zeros(n, 0);
    }
    let mut keep: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] > tol * smax).collect();
    keep.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    CMatrix::from_fn(n, keep.len(), |r, c| u[(r, keep[c])])
}

/// Orthonormal basis of `ker A`, using the same relative cutoff as
/// [`orthonormal_basis`].
pub fn null_space(a: &CMatrix, tol: f64) -> CMatrix {
    let n = a.ncols();
    if a.nrows() == 0 {
        return CMatrix::identity(n, n);
    }
    let row_space = orthonormal_basis(&a.adjoint(), tol);
    let complement = CMatrix::identity(n, n) - &row_space * row_space.adjoint();
    let basis = orthonormal_basis(&complement, 1e-8);
    // The complement projector has singular values 0 or 1; anything in
    // between is rounding and the expected dimension is exact.
    let dim = n - row_space.ncols();
    basis.columns(0, dim.min(basis.ncols())).into_owned()
}

/// Principal angles between the spans of two orthonormal column families,
/// in nondecreasing order.
///
/// Cosines and sines are both computed and each angle is taken from
/// whichever is better conditioned, so tiny angles are resolved to
/// roughly machine precision rather than its square root.
pub fn principal_angles(u: &CMatrix, v: &CMatrix) -> Result<Vec<f64>> {
    if u.nrows() != v.nrows() {
        return Err(NumericsError::DimensionMismatch(format!(
            "subspaces live in different spaces ({} vs {} rows)",
            u.nrows(),
            v.nrows()
        )));
    }
    let (big, small) = if u.ncols() >= v.ncols() { (u, v) } else { (v, u) };
    let q = small.ncols();
    if q == 0 {
        return Ok(Vec::new());
    }
    let cross = big.adjoint() * small;
    let mut cosines = singular_values(&cross);
    cosines.resize(q, 0.0);
    let residual = small - big * &cross;
    let mut sines = singular_values(&residual);
    sines.resize(q, 0.0);
    sines.reverse();

    let mut angles: Vec<f64> = cosines
        .iter()
        .zip(&sines)
        .map(|(&c, &s)| {
            if c * c < 0.5 {
                c.min(1.0).acos()
            } else {
                s.min(1.0).asin()
            }
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

/// `‖x‖₂` of a complex vector.
#[inline]
pub fn vec_norm(x: &CVector) -> f64 {
    x.norm()
}
