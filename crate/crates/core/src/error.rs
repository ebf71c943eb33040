use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("input is not convex: {0}")]
    NonConvex(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The slope hull of a potential leaves the polytope it is tested against.
    #[error("class violation: {0}")]
    ClassViolation(String),

    #[error("not checkable: {0}")]
    NotCheckable(String),

    #[error("inconsistent state: {0}")]
    InconsistentState(String),

    /// Newton iteration hit its budget. The best iterate is kept for inspection.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        best: Box<crate::ot::Solution>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
