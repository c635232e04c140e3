use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A mode/parameter combination the library does not support
    /// (e.g. exact arithmetic for products of three or more factors).
    #[error("unsupported mode: {0}")]
    Unsupported(String),

    /// Adaptive quadrature failed to reach the requested tolerance.
    /// Carries the best estimate and its error bound.
    #[error("quadrature tolerance not reached: estimate {estimate}, error bound {bound}")]
    Quadrature { estimate: f64, bound: f64 },

    /// Two supposedly equivalent representations disagreed beyond tolerance.
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    /// Numeric linear algebra failed (ill-conditioning, non-convergence).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Exact division left a remainder (value not in the ring).
    #[error("inexact division: {0}")]
    InexactDivision(String),

    /// Parsing of a serialized value failed.
    #[error("parse error: {0}")]
    Parse(String),
}
