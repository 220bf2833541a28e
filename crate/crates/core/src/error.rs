use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FedError {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unstable stepsize: {0}")]
    UnstableStepsize(String),

    #[error("diverged at round {round}: iterate norm {norm:e} exceeds {limit:e}")]
    Divergence { round: usize, norm: f64, limit: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for FedError {
    fn from(e: std::io::Error) -> Self {
        FedError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FedError>;

pub(crate) fn check_dim(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(FedError::DimensionMismatch {
            context,
            expected,
            actual,
        })
    }
}
