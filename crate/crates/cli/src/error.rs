use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config or parameters.
    #[error("{0}")]
    Usage(String),
    /// The run finished but a quantitative check failed.
    #[error("{0}")]
    Failure(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Failure(_) => ExitCode::from(1),
            CliError::Usage(_) | CliError::Io(_) => ExitCode::from(2),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
