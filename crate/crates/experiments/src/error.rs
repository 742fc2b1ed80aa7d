use thiserror::Error;

/// Failures of the harness, split by the exit code they map to.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// Malformed or inconsistent configuration (exit code 2).
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] lwf_core::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Whether the error stems from the inputs rather than from a run.
    pub fn is_config(&self) -> bool {
        use lwf_core::Error as E;
        match self {
            HarnessError::Config(_) => true,
            HarnessError::Model(e) => matches!(
                e,
                E::InvalidSimplex(_)
                    | E::InvalidParameter(_)
                    | E::DimensionMismatch { .. }
                    | E::UnsupportedSampleSize { .. }
                    | E::BernsteinOutOfRange { .. }
                    | E::BernsteinRowSum { .. }
                    | E::CollisionIndex { .. }
                    | E::InfeasibleSchedule { .. }
                    | E::NonTransitiveDrift(_)
            ),
            HarnessError::Io(_) => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
