use thiserror::Error;

/// Errors raised by the library.
///
/// Numeric payloads are stored as `f64` regardless of the working scalar so
/// that the error type stays independent of it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Suris parameters: {0}")]
    InvalidParams(String),

    #[error("domain error in {context}: {detail}")]
    Domain { context: &'static str, detail: String },

    #[error("rotation number {target} is not attainable on this branch (measured interval [{lo}, {hi}])")]
    NotAttainable { target: f64, lo: f64, hi: f64 },

    #[error("rotation number is not monotone in the level on [{lo}, {hi}]; eccentricity too large?")]
    NonMonotone { lo: f64, hi: f64 },

    #[error("no convergence after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("p = {p} and q = {q} are not coprime")]
    NotCoprime { p: i64, q: i64 },

    #[error("grid mismatch: expected {expected} samples, got {got}")]
    GridMismatch { expected: usize, got: usize },

    #[error("Gram matrix is singular or not positive definite (pivot {pivot:e})")]
    SingularGram { pivot: f64 },

    #[error("derivative order {order} is not supported (max {max})")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("potential is not {period}-periodic (defect {defect:e})")]
    PeriodMismatch { period: f64, defect: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(context: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { context, detail: detail.into() }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
