use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: String, field: String, line: usize, column: usize, message: String },
    #[error("{path}: {field}: {message}")]
    Spec { path: String, field: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn compute(e: impl std::fmt::Display) -> Self {
        CliError::Compute(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(_) => 1,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            CliError::Parse { path, field, line, column, message } => {
                json!({"error": "parse", "path": path, "field": field, "line": line, "column": column, "message": message})
            }
            CliError::Spec { path, field, message } => {
                json!({"error": "spec", "path": path, "field": field, "message": message})
            }
            CliError::Io { path, message } => json!({"error": "io", "path": path, "message": message}),
            CliError::Usage(m) => json!({"error": "usage", "message": m}),
            CliError::Compute(m) => json!({"error": "computation", "message": m}),
        }
    }
}
