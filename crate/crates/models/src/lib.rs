//! Concrete adjoint pairs whose M-functions are known in closed or
//! semi-closed form.
//!
//! * [`firstorder`]: `i d/dx` on the half line, where `M ≡ 0` but the
//!   resolvent still blows up at the real axis.
//! * [`hainlust`]: a Schrödinger operator coupled to a multiplication
//!   operator, with M computed by shooting.
//! * [`friedrichs`]: multiplication by `x` on `L²(ℝ)` with a rank-one
//!   perturbation and rational data.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
pub mod firstorder;
pub mod friedrichs;
pub mod hainlust;

pub use error::ModelError;

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
