use std::path::PathBuf;

use riskmeas_core::RiskError;
use serde::Serialize;
use thiserror::Error;

/// Input and configuration failures; these map to exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },

    #[error("{}: row {row}{}: {message}", path.display(), column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse { path: PathBuf, row: u64, column: Option<usize>, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Risk(#[from] RiskError),
}

/// Machine-readable form of a [`CliError`].
#[derive(Debug, Clone, Serialize)]
pub struct ErrorEntry {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl From<&CliError> for ErrorEntry {
    fn from(e: &CliError) -> Self {
        let (kind, path, row, column) = match e {
            CliError::Io { path, .. } => ("io", Some(path.display().to_string()), None, None),
            CliError::Parse { path, row, column, .. } => {
                ("parse", Some(path.display().to_string()), Some(*row), *column)
            }
            CliError::Config(_) => ("config", None, None, None),
            CliError::Risk(_) => ("input", None, None, None),
        };
        Self { kind, message: e.to_string(), path, row, column }
    }
}
