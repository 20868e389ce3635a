use nalgebra::linalg::Schur;
use num_complex::Complex64;

use crate::linalg::{CMatrix, CVector};
use crate::{NumericsError, Result};

const MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: Complex64,
    /// Unit-norm right eigenvector.
    pub vector: CVector,
}

fn schur(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    if !a.is_square() {
        return Err(NumericsError::DimensionMismatch(format!(
            "eigenproblem needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let decomposition =
        Schur::try_new(a.clone(), f64::EPSILON, MAX_SWEEPS).ok_or(NumericsError::NoConvergence(MAX_SWEEPS))?;
    Ok(decomposition.unpack())
}

/// All eigenvalues of a square matrix, with multiplicity, in Schur order.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    if a.nrows() == 0 && a.is_square() {
        return Ok(Vec::new());
    }
    let (_, t) = schur(a)?;
    Ok(t.diagonal().iter().copied().collect())
}

/// Eigenvalues and right eigenvectors of a dense complex matrix.
///
/// The complex Schur form `A = Q T Q*` is computed first; each eigenvector
/// is then obtained by back substitution in the triangular factor. Nearly
/// equal diagonal entries are separated by a perturbation of order
/// `ε‖T‖`, which gives usable (if not independent) vectors for defective
/// eigenvalues.
pub fn eig_dense(a: &CMatrix) -> Result<Vec<EigenPair>> {
    let n = a.nrows();
    if n == 0 && a.is_square() {
        return Ok(Vec::new());
    }
    let (q, t) = schur(a)?;
    let floor = f64::EPSILON * t.norm().max(f64::MIN_POSITIVE);

    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut x = CVector::zeros(n);
        x[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                acc += t[(i, j)] * x[j];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < floor {
                d = Complex64::new(floor, 0.0);
            }
            x[i] = -acc / d;
        }
        let mut v = &q * x;
        let norm = v.norm();
        if norm > 0.0 {
            v /= Complex64::new(norm, 0.0);
        }
        pairs.push(EigenPair { value: lambda, vector: v });
    }
    Ok(pairs)
}

/// The eigenpair closest to `shift`, by shifted inverse iteration.
///
/// One LU factorization of `A - shift` is reused for every step, so this is
/// the cheap route when only a few eigenvalues of a large matrix are
/// wanted. Stops once `‖A v - λ v‖ ≤ tol ‖A‖_F`.
pub fn eig_near(a: &CMatrix, shift: Complex64, tol: f64) -> Result<EigenPair> {
    let n = a.nrows();
    if !a.is_square() || n == 0 {
        return Err(NumericsError::DimensionMismatch(format!(
            "eig_near needs a nonempty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = a.norm();
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] -= shift;
    }
    let lu = shifted.lu();
    // An exact hit leaves a zero pivot; nudge the shift off it.
    let lu = if lu.u().diagonal().iter().any(|z| z.norm() <= f64::EPSILON * scale) {
        let mut nudged = a.clone();
        let eps = Complex64::new(1e3 * f64::EPSILON * scale.max(1.0), 0.0);
        for i in 0..n {
            nudged[(i, i)] -= shift + eps;
        }
        nudged.lu()
    } else {
        lu
    };
    let mut v = CVector::from_fn(n, |i, _| Complex64::new(1.0 + (i as f64 * 0.618).sin(), 0.1 * (i as f64).cos()));
    v /= Complex64::new(v.norm(), 0.0);
    let max_iter = 500;
    for _ in 0..max_iter {
        let mut w = lu.solve(&v).ok_or(NumericsError::SingularMatrix { pivot: 0.0, threshold: 0.0 })?;
        let norm = w.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(NumericsError::NoConvergence(max_iter));
        }
        w /= Complex64::new(norm, 0.0);
        let av = a * &w;
        let value = w.dotc(&av);
        let residual = (&av - &w * value).norm();
        v = w;
        if residual <= tol * scale.max(f64::MIN_POSITIVE) {
            return Ok(EigenPair { value, vector: v });
        }
    }
    Err(NumericsError::NoConvergence(max_iter))
}
