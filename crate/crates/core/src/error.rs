use thiserror::Error;

/// Every failure the library can report.
///
/// `BudgetExceeded` is deliberately distinct from a "no" answer: a solver that
/// runs out of budget has not decided the instance.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CffaError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("mask width exceeded: {jobs} jobs, limit {limit}")]
    MaskWidth { jobs: usize, limit: usize },

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("rule not applicable: {0}")]
    Inapplicable(String),
}

impl CffaError {
    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        CffaError::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = CffaError> = std::result::Result<T, E>;
