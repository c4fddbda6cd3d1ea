use penscat_core::error::Error as CoreError;
use thiserror::Error;

/// Failure of a run, partitioned by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error at `{path}`: {message}")]
    Schema { path: String, message: String },

    /// The medium violates `λ > 0`, `Re n > 0` or `Im n ≥ 0`.
    #[error("inadmissible medium (need lambda > 0, Re n > 0, Im n >= 0): {0}")]
    Physics(String),

    #[error("solver error: {0}")]
    Solver(CoreError),

    #[error("accuracy check failed: {0}")]
    Accuracy(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } => 2,
            CliError::Physics(_) => 3,
            CliError::Solver(_) => 4,
            CliError::Accuracy(_) => 5,
            CliError::Io { .. } => 6,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e.root() {
            CoreError::Physics(msg) => CliError::Physics(msg.clone()),
            CoreError::Accuracy(_) | CoreError::Truncation { .. } => CliError::Accuracy(e.to_string()),
            _ => CliError::Solver(e),
        }
    }
}
