use thiserror::Error;
use weyl_core::CoreError;
use weyl_models::ModelError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown model {name:?} (known: {known})")]
    ModelUnknown { name: String, known: String },
    #[error("unknown example {name:?} (known: {known})")]
    ExampleUnknown { name: String, known: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    /// 2 for anything wrong with the inputs, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::ModelUnknown { .. } | CliError::ExampleUnknown { .. } => 2,
            CliError::Model(_) | CliError::Core(_) | CliError::Output { .. } => 1,
        }
    }
}

impl From<weyl_numerics::NumericsError> for CliError {
    fn from(e: weyl_numerics::NumericsError) -> Self {
        CliError::Core(CoreError::Numerics(e))
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
