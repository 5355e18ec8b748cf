use std::path::PathBuf;

use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] graphlim_core::Error),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

impl CliError {
    /// 2 for validation and input problems, 3 for exhausted budgets, 4 for
    /// empty ensembles.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(graphlim_core::Error::Budget { .. }) => 3,
            Self::Core(graphlim_core::Error::Infeasible(_)) => 4,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Core(graphlim_core::Error::Budget { .. }) => "budget",
            Self::Core(graphlim_core::Error::Infeasible(_)) => "infeasible",
            Self::Core(_) => "validation",
            Self::Io { .. } => "io",
            Self::Json { .. } => "parse",
            Self::Usage(_) => "usage",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut body = json!({
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        if let Self::Core(graphlim_core::Error::Budget { needed, budget }) = self {
            body["needed"] = json!(needed.to_string());
            body["budget"] = json!(budget.to_string());
        }
        json!({ "error": body })
    }
}
