//! Shared error type for the whole library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the arguments does not hold.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request exceeds a documented implementation limit.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// Two representations that must live over the same cyclic extension do not.
    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    /// An operation defined only at unramified places was evaluated at a ramified one.
    #[error("ramified place above p = {p}")]
    RamifiedPlace { p: u64 },

    /// Ramified splitting data is only forced when the extension degree is prime.
    #[error("unsupported ramified prime {p}: extension degree {degree} is composite")]
    UnsupportedRamified { p: u64, degree: u64 },

    /// Local-factor evaluation ran into a (near-)pole.
    #[error("numerical singularity: local factor term within {0:e} of a pole")]
    NumericalSingularity(f64),

    /// Dirichlet-series evaluation requested outside the convergence half-plane.
    #[error("convergence domain error: {0}")]
    ConvergenceDomain(String),

    /// Error-curve fitting needs enough distinct nonzero data points.
    #[error("degenerate fit: {0}")]
    FitDegenerate(String),

    /// A mathematical contract that the library asserts at runtime was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Configuration / input-file problems.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
