//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors raised by kernel construction, estimators, and quadrature.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Input data that is structurally valid but carries no usable
    /// information (e.g. all rows identical where a spread is required).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// A normalized estimator was asked for a value at a point where its
    /// denominator vanishes; the query point is far from the data support.
    #[error("estimator undefined at query point: {0}")]
    UndefinedPoint(String),

    /// An iterative numerical procedure failed to converge or produced a
    /// non-finite intermediate.
    #[error("numerical failure: {0}")]
    Numeric(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
