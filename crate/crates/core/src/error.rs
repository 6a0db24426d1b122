use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The table does not satisfy an estimator's precondition.
    #[error("{estimator} is inapplicable: {reason}")]
    Inapplicable { estimator: String, reason: String },

    /// The input sits on a boundary where the estimate diverges or is undefined.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("root not bracketed: ratio {ratio} exceeds the solver range up to x = {hi}")]
    BracketExhausted { ratio: f64, hi: f64 },

    #[error("logarithm of zero: S({x}, {y}) = 0")]
    LogOfZero { x: u64, y: u64 },

    /// Adaptive quadrature ran out of subdivisions; `estimate` is the best value reached.
    #[error("quadrature did not converge: estimate {estimate}, error {error} above tolerance")]
    Quadrature { estimate: f64, error: f64 },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("empty table")]
    EmptyTable,

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn inapplicable(estimator: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Inapplicable {
            estimator: estimator.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
