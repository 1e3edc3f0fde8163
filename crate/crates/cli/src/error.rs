use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the command line, each mapped to an exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] toruswalk::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bound violation: {0}")]
    Violation(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 validation, 3 infeasible, 4 internal consistency.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(toruswalk::Error::Infeasible(_)) => 3,
            CliError::Core(toruswalk::Error::Consistency(_)) | CliError::Violation(_) => 4,
            CliError::Core(_) | CliError::Config(_) | CliError::Io { .. } => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
