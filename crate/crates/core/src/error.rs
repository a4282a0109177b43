use thiserror::Error;

/// Errors produced by trellis construction and analysis.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime field order")]
    InvalidField(u32),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("enumerating {what} needs {needed} elements, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: usize,
    },

    #[error("trellis carries no vertex labels")]
    Unlabeled,

    #[error("no single-peak pattern in state-complexity profile [{0}]")]
    NoPeak(String),

    #[error("malformed trellis: {0}")]
    Malformed(String),

    /// An internal consistency assertion of a construction failed.
    #[error("construction check failed: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
