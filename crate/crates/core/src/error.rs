use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Non-square input, mismatched index sets, inconsistent block sizes.
    #[error("shape error: {0}")]
    Shape(String),

    /// A value outside the admissible domain (probability outside [0,1], λ = 0, t ≤ 0, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The exact engine would exceed its size cap.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// An operation was called outside the range where its formula is defined.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// Round-off larger than the documented tolerance; indicates a bug.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
