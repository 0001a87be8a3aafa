use thiserror::Error;

/// Errors raised by the certification pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The supplied Lyapunov function does not certify the delay-free system.
    #[error("certification failure: {0}")]
    CertificationFailure(String),

    /// No admissible parameter choice satisfies every strict inequality.
    #[error("infeasible certificate: {0}")]
    Infeasible(String),

    /// Two algebraically equal routes disagree; indicates a bug in the constants.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("state left the nonnegative orthant at t = {time:e} (component {component}, value {value:e})")]
    DomainViolation {
        time: f64,
        component: usize,
        value: f64,
    },

    #[error("numerical failure at t = {time:e}: {reason}")]
    NumericalFailure { time: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
