//! Multiplication by `x` on `L²(ℝ)` perturbed by the rank-one term
//! `⟨f, φ⟩ ψ`, with rational `φ`, `ψ`.
//!
//! Every integral is a residue sum. Convention: `H²₊` consists of the
//! boundary values of functions analytic in the upper half plane, so its
//! rational members have all poles in the lower half plane.

mod examples;
mod model;
mod rational;

pub use examples::{
    fr_example1, fr_example2, fr_example3, hardy_unit, Example1Report, Example2Report, Example3Report, HardySample,
    Obstruction,
};
pub use model::{
    evaluation_grid, fr_D, fr_adjoint_apply, fr_eigen_residual, fr_green_residual, fr_jump, fr_kernel_element, fr_m,
    fr_m_direct, fr_m_parts, fr_m_scan, fr_maximal_apply, sup_on_grid, tail_points, FriedrichsModel, FrScanRow, MParts,
    BRACKET_ZERO_TOL, D_ZERO_TOL,
};
pub use rational::{fr_c, fr_cauchy, fr_gamma, RationalH2, Term};
