use thiserror::Error;

/// Failure of a run, grouped by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed arguments, config file or expressions.
    #[error("config error: {0}")]
    Config(String),
    /// Well-formed input that violates a precondition.
    #[error("validation failed: {0}")]
    Validation(String),
    /// The requested work exceeds a hard limit.
    #[error("compute guard: {0}")]
    Guard(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Guard(_) => 4,
        }
    }
}

impl From<curvapprox_core::Error> for CliError {
    fn from(e: curvapprox_core::Error) -> Self {
        use curvapprox_core::Error as E;
        match e {
            E::Parse { .. } | E::Io(_) => CliError::Config(e.to_string()),
            E::ComputeGuard { .. } => CliError::Guard(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
