use conductor_core::{EnvError, GrpoError, RewardError, RolloutError, SynthError};
use thiserror::Error;

/// Failures of a command, each mapped to a stable exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Exit code 1.
    #[error("i/o error: {0}")]
    Io(String),
    /// Exit code 2.
    #[error("configuration error: {0}")]
    Config(String),
    /// Exit code 3.
    #[error("environment error: {0}")]
    Env(String),
    /// Exit code 4.
    #[error("training stalled: {0}")]
    Stall(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Env(_) => 3,
            CliError::Stall(_) => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<EnvError> for CliError {
    fn from(e: EnvError) -> Self {
        CliError::Env(e.to_string())
    }
}

impl From<RolloutError> for CliError {
    fn from(e: RolloutError) -> Self {
        match e {
            RolloutError::InvalidConfig(_) | RolloutError::GroupTooSmall(_) => CliError::Config(e.to_string()),
            RolloutError::Io(_) | RolloutError::Json(_) => CliError::Io(e.to_string()),
            _ => CliError::Env(e.to_string()),
        }
    }
}

impl From<RewardError> for CliError {
    fn from(e: RewardError) -> Self {
        match e {
            RewardError::Io(_) | RewardError::Json(_) => CliError::Io(e.to_string()),
            _ => CliError::Env(e.to_string()),
        }
    }
}

impl From<GrpoError> for CliError {
    fn from(e: GrpoError) -> Self {
        match e {
            GrpoError::InvalidConfig(_) | GrpoError::GroupTooSmall(_) => CliError::Config(e.to_string()),
            GrpoError::Rollout(r) => r.into(),
            GrpoError::Reward(r) => r.into(),
            _ => CliError::Env(e.to_string()),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::InvalidSize(_) => CliError::Config(e.to_string()),
            _ => CliError::Env(e.to_string()),
        }
    }
}
