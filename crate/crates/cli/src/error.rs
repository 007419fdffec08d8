use pq_osc_core::error::PqError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration for `{field}`: {message}")]
    ConfigInvalid { field: String, message: String },
    #[error(transparent)]
    Compute(#[from] PqError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::ConfigInvalid { .. } => "ConfigInvalid",
            CliError::Compute(e) => e.kind(),
            CliError::Io(_) => "Io",
            CliError::Output(_) => "Output",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigInvalid { .. } => 2,
            _ => 1,
        }
    }
}
