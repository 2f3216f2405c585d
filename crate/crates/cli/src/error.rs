use std::path::PathBuf;

use hklab::Error as CoreError;

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAILURES: i32 = 1;
    pub const INVALID_CONFIG: i32 = 2;
    pub const UNCERTIFIED: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config at `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("hypothesis not certified for `{statement}`: {message}")]
    Uncertified { statement: String, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Precondition-type core errors are configuration problems of the
    /// scenario; numerical breakdowns are failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => exit::INVALID_CONFIG,
            CliError::Uncertified { .. } => exit::UNCERTIFIED,
            CliError::Core(e) => match e {
                CoreError::Uncertified(_) => exit::UNCERTIFIED,
                CoreError::UnknownVertex(_)
                | CoreError::VertexIndex(_)
                | CoreError::InvalidGraph(_)
                | CoreError::Disconnected(_)
                | CoreError::InvalidMetric(_)
                | CoreError::NegativeTime(_)
                | CoreError::NonPositiveTime(_)
                | CoreError::Precondition(_)
                | CoreError::Parse(_) => exit::INVALID_CONFIG,
                _ => exit::FAILURES,
            },
            CliError::Io { .. } | CliError::Csv(_) | CliError::Json(_) => exit::FAILURES,
        }
    }

    /// Tags a core error with the statement that raised it.
    pub fn in_statement(statement: &str, e: CoreError) -> Self {
        match e {
            CoreError::Uncertified(message) => CliError::Uncertified { statement: statement.to_string(), message },
            CoreError::Precondition(message) => CliError::Config { field: format!("suite/{statement}"), message },
            other => CliError::Core(other),
        }
    }
}
