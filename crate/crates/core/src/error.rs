use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BffError {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("{func} series did not converge within {terms} terms")]
    NonConvergence { func: &'static str, terms: u64 },

    #[error("lambda = {lambda} outside the support of the {family} prior")]
    Support { family: &'static str, lambda: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("optimizer failure: {0}")]
    Optimizer(String),

    #[error("study {index}: {source}")]
    Study {
        index: usize,
        #[source]
        source: Box<BffError>,
    },

    #[error("omega = {omega}: {source}")]
    AtOmega {
        omega: f64,
        #[source]
        source: Box<BffError>,
    },
}

impl BffError {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        BffError::Domain {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn invalid(detail: impl Into<String>) -> Self {
        BffError::InvalidInput(detail.into())
    }

    /// Index of the offending study when the error came from a study set.
    pub fn study_index(&self) -> Option<usize> {
        match self {
            BffError::Study { index, .. } => Some(*index),
            BffError::AtOmega { source, .. } => source.study_index(),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, BffError>;
