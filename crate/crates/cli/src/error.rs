use std::process::ExitCode;

use stakeless_core::Error;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    InsufficientData(String),
    #[error("{0}")]
    NotConverged(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Failed(_) => 1,
            CliError::Input(_) => 2,
            CliError::InsufficientData(_) => 3,
            CliError::NotConverged(_) => 4,
        })
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InsufficientData(_) => CliError::InsufficientData(e.to_string()),
            Error::BootstrapUnstable { .. } => CliError::NotConverged(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Reading input is an input error, writing output is a plain failure.
pub fn read_error(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("cannot read {}: {e}", path.display()))
}

pub fn write_error(path: &std::path::Path, e: impl std::fmt::Display) -> CliError {
    CliError::Failed(format!("cannot write {}: {e}", path.display()))
}
