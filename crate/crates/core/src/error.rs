use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested quantity is infinite (divergent integral or series).
    #[error("divergence: {0}")]
    Divergence(String),

    /// An iterative estimate did not reach the requested tolerance.
    #[error("accuracy not reached: estimate {estimate:e} with error {error:e} ({context})")]
    Accuracy { estimate: f64, error: f64, context: String },

    /// The ODE stepper could not make progress.
    #[error("integration failed: {0}")]
    Integration(String),

    /// A root-finding bracket did not enclose a sign change.
    #[error("invalid bracket: {0}")]
    Bracket(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
