use std::path::PathBuf;

use bffkit::BffError;
use bffkit_oracle::OracleError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{path}: row {row}: {detail}")]
    Parse { path: PathBuf, row: usize, detail: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config {path}: {detail}")]
    Config { path: PathBuf, detail: String },

    /// `study` is the 1-based data row of the failing study, when known.
    #[error(
        "numeric error{}{}: {source}",
        .study.map(|s| format!(" in study {s}")).unwrap_or_default(),
        .omega.map(|w| format!(" at omega {w}")).unwrap_or_default()
    )]
    Numeric {
        study: Option<usize>,
        omega: Option<f64>,
        #[source]
        source: BffError,
    },

    #[error("oracle: {0}")]
    Oracle(#[from] OracleError),

    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Io { .. } | CliError::Config { .. } => 2,
            CliError::Numeric { .. } | CliError::Oracle(_) => 3,
        }
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

/// Strips the study and effect-size context wrappers from `e`.
pub(crate) fn unwrap_context(e: BffError) -> (Option<usize>, Option<f64>, BffError) {
    match e {
        BffError::Study { index, source } => {
            let (_, omega, inner) = unwrap_context(*source);
            (Some(index), omega, inner)
        }
        BffError::AtOmega { omega, source } => {
            let (study, _, inner) = unwrap_context(*source);
            (study, Some(omega), inner)
        }
        other => (None, None, other),
    }
}

impl From<BffError> for CliError {
    fn from(e: BffError) -> Self {
        let (study, omega, source) = unwrap_context(e);
        CliError::Numeric {
            study: study.map(|i| i + 1),
            omega,
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
