use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into input errors (malformed or inconsistent data) and
/// precondition violations (well-formed data outside an operation's domain);
/// the command-line frontend maps the two classes to distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeisError {
    #[error("dimension mismatch: expected m = {expected}, found m = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate chart: {0}")]
    DegenerateChart(String),
}

impl HeisError {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        HeisError::InvalidInput(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        HeisError::Precondition(msg.into())
    }

    /// True for errors caused by malformed input rather than a violated
    /// mathematical precondition.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            HeisError::DimensionMismatch { .. } | HeisError::InvalidInput(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, HeisError>;
