//! Dense complex numerics shared by the boundary-triple and model crates.
//!
//! Everything here is a pure function of its inputs. Matrices are
//! `nalgebra` dense matrices over `Complex64`.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contour;
pub mod eigen;
mod error;
pub mod linalg;
pub mod matrix_json;
pub mod quadrature;

pub use contour::{contour_integral, contour_integral_scalar, ContourSpec};
pub use eigen::{eig_dense, eig_near, eigenvalues, EigenPair};
pub use error::NumericsError;
pub use linalg::{
    least_squares, null_space, orthonormal_basis, Factorized, principal_angles, smallest_singular_value, solve_linear,
    spectral_norm, CMatrix, CVector, DEFAULT_RANK_TOL,
};
pub use num_complex::Complex64;
pub use quadrature::{gauss_legendre, real_line_quadrature, real_line_quadrature_with};

pub type Result<T, E = NumericsError> = std::result::Result<T, E>;

/// Shorthand for a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
