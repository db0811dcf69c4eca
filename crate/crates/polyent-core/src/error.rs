//! Error type shared by all modules.

use alloc::string::String;

/// Errors produced by constructors, kernels and checkers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// The caller handed in something structurally wrong (bad dimensions,
    /// out-of-range exponent, non-isometry, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Numerics went outside the configured policy (non-PSD operator,
    /// failed reconstruction, disagreeing dual formulas, ...).
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl Error {
    pub fn invalid_argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}

pub type Result<T> = core::result::Result<T, Error>;
