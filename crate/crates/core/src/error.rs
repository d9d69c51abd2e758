use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("model family `{0}` does not define Poisson rates")]
    UnsupportedFamily(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("bootstrap unstable: {dropped} of {total} resamples did not converge")]
    BootstrapUnstable { dropped: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
