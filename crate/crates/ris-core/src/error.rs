//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A linear system was singular or too ill-conditioned to solve.
    #[error("singular system in {context} (condition estimate {cond_estimate:.3e})")]
    Singular {
        /// Operation that attempted the solve.
        context: &'static str,
        /// Ratio of the largest to smallest pivot magnitude of the
        /// factorization; `inf` for an exactly singular system.
        cond_estimate: f64,
    },

    /// Quadrature failed its convergence check at the point cap.
    #[error(
        "quadrature did not converge: relative change {rel_change:.3e} \
         when doubling past {points} points"
    )]
    QuadratureAccuracy {
        /// Relative change in modulus on the last doubling.
        rel_change: f64,
        /// Number of points per half-interval at the cap.
        points: usize,
    },

    /// A pattern was identically zero and cannot be normalized.
    #[error("degenerate pattern: {0}")]
    DegeneratePattern(String),

    /// ON/OFF cell states do not define a usable quantizer.
    #[error("degenerate cell states: {0}")]
    DegenerateCell(String),

    /// A data file failed to parse.
    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        /// File being read.
        path: String,
        /// 1-based line number of the offending row.
        line: usize,
        /// What went wrong.
        message: String,
    },

    /// A data file parsed but violated a structural requirement.
    #[error("invalid data in {path}: {message}")]
    InvalidData {
        /// File being read.
        path: String,
        /// Violated requirement.
        message: String,
    },

    /// A data file held no usable information (e.g. all samples equal).
    #[error("degenerate data in {path}: {message}")]
    DegenerateData {
        /// File being read.
        path: String,
        /// Why the data is unusable.
        message: String,
    },

    /// An I/O failure while reading a data file.
    #[error("i/o error on {path}: {source}")]
    Io {
        /// File being accessed.
        path: String,
        /// Underlying error.
        #[source]
        source: std::io::Error,
    },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
