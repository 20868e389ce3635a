use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("singular matrix: pivot {pivot:.3e} below threshold {threshold:.3e}")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("eigenvalue iteration did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("integrand decay order {0} is below 2")]
    SlowDecay(u32),

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("malformed matrix data: {0}")]
    MalformedMatrix(String),
}
