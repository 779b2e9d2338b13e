use thiserror::Error;

/// Errors raised by the switch-run library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A 1-based window `[m, m + n - 1]` does not fit inside a sequence of length `len`.
    #[error("window out of range: m={m}, n={n}, N={len}")]
    Range { m: usize, n: usize, len: usize },

    /// A character other than '0' or '1' in a bit string.
    #[error("invalid bit character {found:?} at position {position}")]
    InvalidBit { position: usize, found: char },

    /// A computed quantity fell outside the range it is proven to lie in.
    #[error("internal consistency error: {0}")]
    InternalConsistency(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
