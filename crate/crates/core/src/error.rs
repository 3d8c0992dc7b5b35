use thiserror::Error;

/// Errors raised by the numerical, distributional and capacity routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZocError {
    #[error("function has no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("no convergence after {iterations} iterations: {context}")]
    NoConvergence { iterations: usize, context: String },

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quantile at probability 1 is infinite")]
    InfiniteQuantile,

    #[error("copula has no nondegenerate zero set")]
    EmptyZeroSet,

    #[error("quantile F^-1(1/e) is zero, gap limit undefined")]
    DegenerateQuantile,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, ZocError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(ZocError::Domain(msg.into()))
}
