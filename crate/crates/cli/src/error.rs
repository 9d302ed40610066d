use thiserror::Error;

/// Failure of a subcommand, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config keys or input that violates a command's contract.
    #[error("{0}")]
    Usage(String),
    /// Missing files, malformed data or a failed computation.
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }
}

impl From<confound_core::ConfigError> for CliError {
    fn from(e: confound_core::ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<confound_core::SimulationError> for CliError {
    fn from(e: confound_core::SimulationError) -> Self {
        match e {
            confound_core::SimulationError::Config(c) => c.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}
