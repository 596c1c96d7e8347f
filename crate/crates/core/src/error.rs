use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violates an operation's precondition.
    #[error("rejected input: {0}")]
    Rejected(String),

    /// Element is not supported by an ideal (or ideal sum) at the given block.
    #[error("element not in ideal: block {block} carries mass {mass:e}")]
    OutsideIdeal { block: usize, mass: f64 },

    #[error("element not in ideal at level {level}: block {block} carries mass {mass:e}")]
    OutsideIdealAtLevel {
        level: String,
        block: usize,
        mass: f64,
    },

    /// Iterative routine did not converge.
    #[error("numerical failure in {routine}: residual {residual:e}")]
    Numerical {
        routine: &'static str,
        residual: f64,
    },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub(crate) fn reject<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Rejected(msg.into()))
}
