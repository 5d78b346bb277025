use thiserror::Error;

/// Failure classes of a run, each with a fixed exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("verification failed: {0}")]
    Verify(String),

    #[error("resource budget exceeded: {0}")]
    Budget(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Verify(_) => 3,
            CliError::Budget(_) => 4,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            CliError::Config(_) | CliError::Io(_) => "config_error",
            CliError::Verify(_) => "verification_failed",
            CliError::Budget(_) => "budget_exceeded",
        }
    }
}

impl From<weylwalk_core::Error> for CliError {
    fn from(e: weylwalk_core::Error) -> Self {
        use weylwalk_core::Error as E;
        match e {
            E::Budget { .. } => CliError::Budget(e.to_string()),
            E::NotHarmonic { .. } | E::NotClosed { .. } | E::Integrity(_) => CliError::Verify(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
