use thiserror::Error;
use weyl_numerics::{Complex64, NumericsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("λ = {0} is not in the open lower half plane")]
    UpperHalfPlane(Complex64),
    #[error("sample μ = {0} is not in the open lower half plane")]
    BadMu(Complex64),

    #[error("λ = {lambda} lies within {distance:.3e} of the essential range of u")]
    CoefficientSingular { lambda: Complex64, distance: f64 },
    #[error("integrator could not reach tolerance {tol:.1e} at x = {x}")]
    ToleranceNotMet { tol: f64, x: f64 },
    #[error("λ = {lambda} is an eigenvalue (|denominator| = {denominator:.3e})")]
    AtEigenvalue { lambda: Complex64, denominator: f64 },
    #[error("search contour comes within {distance:.3e} of the essential range")]
    ContourHitsEssran { distance: f64 },
    #[error("grid point {lambda} lies within {distance:.3e} of the essential range of u on W")]
    GridHitsEssranW { lambda: Complex64, distance: f64 },
    #[error("λ = {0} is in the spectrum of the discretized operator")]
    LambdaInSpectrum(Complex64),

    #[error("λ = {0} is real")]
    RealLambda(Complex64),
    #[error("λ = {0} coincides with a pole of the integrand")]
    PoleCollision(Complex64),
    #[error("D(λ) vanishes at λ = {lambda} (|D| = {abs:.3e})")]
    DZero { lambda: Complex64, abs: f64 },
    #[error("λ = {lambda} is a pole of M (bracket {abs:.3e})")]
    BracketZero { lambda: Complex64, abs: f64 },
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
}
