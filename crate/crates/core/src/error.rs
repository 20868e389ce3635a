use thiserror::Error;
use weyl_numerics::{Complex64, NumericsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("stacked boundary map {which} has rank {rank}, needs {needed}")]
    RankDeficientBoundary { which: &'static str, rank: usize, needed: usize },
    #[error("boundary maps violate the Green identity on the boundary block (residual {0:.3e})")]
    IncompatibleBoundary(f64),
    #[error("supplied adjoint action differs from the derived one (residual {0:.3e})")]
    AdjointMismatch(f64),
    #[error("λ = {lambda} is in the spectrum (smallest singular value {sigma_min:.3e}, threshold {threshold:.3e})")]
    LambdaInSpectrum { lambda: Complex64, sigma_min: f64, threshold: f64 },
    #[error("sample point {0} is in or too close to the spectrum")]
    SampleInSpectrum(Complex64),
    #[error("contour passes within {distance:.3e} of the spectrum point {eigenvalue}")]
    ContourHitsSpectrum { eigenvalue: Complex64, distance: f64 },
    #[error("extension domain does not project onto the state space")]
    DegenerateExtension,
    #[error("unsupported triple schema {0:?}")]
    Schema(String),
}
