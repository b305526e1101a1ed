use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("config line {line}, key `{key}`: {reason}")]
    Config {
        key: String,
        line: usize,
        reason: String,
    },

    #[error("config: {0}")]
    ConfigSyntax(String),

    #[error("expected {expected} states, got {actual}")]
    StateCount { expected: usize, actual: usize },

    #[error("the {0} band is empty")]
    EmptyBand(&'static str),

    #[error("eigensolver failed for realization seed {seed}: {reason}")]
    Eigensolve { seed: u64, reason: String },

    #[error("truncated space has dimension {dimension}, above the limit of {limit}")]
    SpaceTooLarge { dimension: usize, limit: usize },

    #[error("steady state: {0}")]
    SteadyState(String),

    #[error("time integration: {0}")]
    Integration(String),

    #[error("unknown preset `{name}`; valid presets: {valid}")]
    UnknownPreset { name: String, valid: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Whether the error is a numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Eigensolve { .. } | Error::SteadyState(_) | Error::Integration(_)
        )
    }
}
