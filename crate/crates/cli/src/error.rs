use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),

    #[error("{field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("{0}")]
    Compute(#[from] qfed1d_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("solver did not converge after {iterations} iterations (max |residual| {max_residual:e})")]
    NotConverged { iterations: usize, max_residual: f64 },
}

impl CliError {
    pub fn validation(field: &str, err: impl std::fmt::Display) -> Self {
        CliError::Validation {
            field: field.to_string(),
            reason: err.to_string(),
        }
    }

    /// Short category used in the machine-readable error line.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Validation { .. } => "validation",
            CliError::Compute(_) => "compute",
            CliError::Io { .. } => "io",
            CliError::NotConverged { .. } => "not-converged",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Validation { .. } => 2,
            CliError::Compute(_) | CliError::Io { .. } => 1,
            CliError::NotConverged { .. } => 3,
        }
    }
}
