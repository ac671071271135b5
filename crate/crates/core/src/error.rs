use thiserror::Error;

/// Errors raised by the library. All arithmetic is exact, so every variant
/// signals either invalid input or a violated internal consistency check.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("word length {requested} exceeds degree cap {cap}")]
    DegreeCap { requested: usize, cap: usize },

    #[error("component index {index} out of range for r = {r}")]
    IndexOutOfRange { index: usize, r: usize },

    #[error("no marginal system for label {0}")]
    MissingMarginal(usize),

    #[error("parse error: {0}")]
    Parse(String),

    /// A runtime consistency assertion failed (interpolation guard, degree bound).
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
