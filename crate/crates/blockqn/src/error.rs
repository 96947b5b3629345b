//! Error type shared across the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
///
/// Numerical breakdowns (`NotPositiveDefinite`, `SingularBlock`,
/// `EstimatorBreakdown`) carry enough context to tell a corrupted estimator
/// from a degenerate input; IO/parse variants carry the location.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not positive definite: pivot {pivot:.3e} at column {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("direction block is numerically singular (condition estimate {cond:.3e})")]
    SingularBlock { cond: f64 },

    #[error("greedy direction selection requires the residual diagonal")]
    MissingResidualDiag,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dataset contains no samples")]
    EmptyDataset,

    #[error("not enough iteration records above the numerical floor")]
    InsufficientData,

    #[error("inner solve did not converge: {0}")]
    NonConvergence(String),

    #[error("estimator breakdown at iteration {t}: {source}")]
    EstimatorBreakdown {
        t: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("non-finite value encountered at iteration {t}")]
    NonFinite { t: usize },

    #[error("diverged at iteration {t}: lambda {lambda:.3e} exceeds 1e3 x initial {lambda0:.3e}")]
    Diverged { t: usize, lambda: f64, lambda0: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Wraps a numerical failure with the iteration at which it occurred.
    pub fn at_iteration(self, t: usize) -> Error {
        Error::EstimatorBreakdown {
            t,
            source: Box::new(self),
        }
    }
}
