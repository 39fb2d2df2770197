//! Error taxonomy shared across the crate.

use thiserror::Error;

/// All failure modes surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (bad enum combination, non-square grid, ...).
    #[error("config error: {0}")]
    Config(String),

    /// Invalid data content (non-finite values, dimension mix, ...).
    #[error("data error: {0}")]
    Data(String),

    /// Malformed binary file; carries the byte offset of the first problem.
    #[error("format error at byte {offset}: {msg}")]
    Format { offset: u64, msg: String },

    /// Caller violated an API contract (shape mismatch, empty input, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The rectified-flow quotient is evaluated past its supported range.
    #[error("singularity: t={t} exceeds t_max={t_max}")]
    Singularity { t: f64, t_max: f64 },

    /// Training produced a non-finite quantity.
    #[error("training error at step {step}: {msg}")]
    Training { step: u64, msg: String },

    /// Sampling produced a non-finite quantity.
    #[error("sampling error at step {step}: {msg}")]
    Sampling { step: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
    pub fn format(offset: u64, msg: impl Into<String>) -> Self {
        Error::Format {
            offset,
            msg: msg.into(),
        }
    }
}
