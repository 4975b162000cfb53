use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GptError {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("transformation has probability {0:e} on this state; cannot condition")]
    ZeroProbability(f64),

    #[error("faithful state is singular or ill-conditioned (condition number {0:e})")]
    SingularFaithfulState(f64),

    #[error("not applicable: {0}")]
    Inapplicable(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl GptError {
    pub(crate) fn dim(what: &str, expected: usize, got: usize) -> Self {
        GptError::Input(format!("{what}: expected dimension {expected}, got {got}"))
    }
}

pub type Result<T> = std::result::Result<T, GptError>;
