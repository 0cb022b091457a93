use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Failures of a CLI run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or incomplete configuration or input data.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(wqed_core::Error),
    #[error("numerical error: non-finite value in output column `{0}`")]
    NonFinite(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::NonFinite(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

impl From<wqed_core::Error> for CliError {
    fn from(e: wqed_core::Error) -> Self {
        match e {
            // A missing calibration is a configuration problem, not numerics.
            wqed_core::Error::Configuration(msg) => CliError::Config(msg.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
