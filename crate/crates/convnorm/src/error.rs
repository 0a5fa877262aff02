//! Error types shared across the library.

use thiserror::Error;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Exponents cannot be completed to a feasible Young triple.
    #[error("infeasible exponents: {0}")]
    InfeasibleExponents(String),

    /// Two grid functions do not live on the same grid.
    #[error("grid shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An operation that requires a nonzero function received the zero function.
    #[error("zero function: {0}")]
    ZeroFunction(String),

    /// `k * f` vanishes identically, so the improving operator is undefined at `f`.
    #[error(
        "degenerate convolution: k * f vanishes on the grid; try a different initial condition"
    )]
    DegenerateConvolution,

    /// A stated precondition was violated (wrong exponents, not an eps-maximizer, ...).
    #[error("precondition not met: {0}")]
    Precondition(String),

    /// Derived concentration parameters are infeasible on this grid.
    #[error("parameters infeasible: {0}")]
    ParametersInfeasible(String),

    /// The requested mass window does not exist.
    #[error("degenerate window: {0}")]
    DegenerateWindow(String),

    /// A lemma validator found a counterexample.
    #[error("validator failed: {0}")]
    ValidatorFailed(String),

    /// An independent cross-check disagreed beyond tolerance.
    #[error("cross-check failed: {0}")]
    CrosscheckFailed(String),

    /// The chirp phase advances by more than the grid can resolve.
    #[error("chirp unresolved: {0}")]
    ChirpUnresolved(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
