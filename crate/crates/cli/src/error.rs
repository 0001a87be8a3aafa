use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] delaycert_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 configuration, 3 infeasible certificate, 4 numerical failure, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use delaycert_core::Error as E;
        match self {
            Self::Config(_) | Self::Core(E::InvalidArgument(_)) => 2,
            Self::Core(E::Infeasible(_) | E::CertificationFailure(_)) => 3,
            Self::Core(
                E::NumericalFailure { .. }
                | E::DomainViolation { .. }
                | E::InternalInconsistency(_),
            ) => 4,
            Self::Io(_) => 1,
        }
    }
}
