use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised across the crate.
///
/// Variants fall in two families: structural problems with the inputs
/// (mismatched grids, unknown labels, malformed files) and refusals, where a
/// computation is declined because its hypothesis does not hold. The CLI maps
/// refusals to a dedicated exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("value count {got} does not match grid size {expected}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite value at sample {index}")]
    NonFinite { index: usize },

    #[error("unknown filter label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate filter label `{0}`")]
    DuplicateLabel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("scale cutoff {requested} is infeasible on this grid (max feasible {max_feasible})")]
    InfeasibleScale { requested: u32, max_feasible: u32 },

    #[error("covering gap: no filter responds at bin {bin} (frequency {frequency:?})")]
    CoveringGap { bin: usize, frequency: Vec<f64> },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("path sets differ: {0}")]
    PathSetMismatch(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True when the error means "hypothesis not met" rather than bad input.
    pub fn is_refusal(&self) -> bool {
        matches!(self, Error::Refused(_) | Error::InfeasibleScale { .. })
    }
}
