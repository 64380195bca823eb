use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] io::Error),

    #[error("malformed input: {0}")]
    Format(String),

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: String, found: String },

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("diagram dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("input too large: {cells} cells exceeds the limit of {limit}")]
    TooLarge { cells: usize, limit: usize },
}

impl Error {
    pub(crate) fn size_mismatch(expected: impl ToString, found: impl ToString) -> Self {
        Error::SizeMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    /// True for errors caused by unreadable or malformed files rather than by
    /// the semantics of otherwise valid inputs.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Format(_))
    }
}
