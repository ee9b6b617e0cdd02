use serde_json::json;
use thiserror::Error;

use crate::SCHEMA;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("i/o failure: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Numeric(#[from] szego::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::InvalidParameter(_) => 3,
            CliError::Io(_) => 4,
            CliError::Numeric(_) => 5,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::InvalidParameter(_) => "invalid_parameter",
            CliError::Io(_) => "io",
            CliError::Numeric(_) => "numeric",
        }
    }

    /// One-line machine-readable report for stderr.
    pub fn to_json(&self) -> String {
        json!({
            "schema": SCHEMA,
            "error": {
                "kind": self.kind(),
                "exit_code": self.exit_code(),
                "message": self.to_string(),
            }
        })
        .to_string()
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::InvalidParameter(msg.into())
}
