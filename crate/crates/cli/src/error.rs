use qsc_core::Error as CoreError;
use thiserror::Error;

/// Failure of a CLI run, mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("runtime guard: {0}")]
    Guard(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    /// Bad parameters are configuration errors; size limits and numerical
    /// breakdowns are runtime guards.
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameters(_)
            | CoreError::InvalidLambda(_)
            | CoreError::InvalidAlpha(_)
            | CoreError::Parse { .. }
            | CoreError::VertexOutOfRange { .. }
            | CoreError::SelfLoop(_) => CliError::Config(e.to_string()),
            _ => CliError::Guard(e.to_string()),
        }
    }
}
