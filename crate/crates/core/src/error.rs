use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operator is not Hermitian: |a[{row}][{col}] - conj(a[{col}][{row}])| = {deviation:.3e}")]
    NonHermitian { row: usize, col: usize, deviation: f64 },

    #[error("operator must be square with dimension >= 1, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm = {norm:.12})")]
    NotNormalized { norm: f64 },

    #[error("state has zero norm")]
    ZeroState,

    #[error("spectrum is degenerate: levels {lower} and {upper} are separated by {separation:.3e}")]
    Degenerate {
        lower: usize,
        upper: usize,
        separation: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("reduced variant needs an even slice count, got L = {0}")]
    OddSliceCount(usize),

    #[error("propagation did not converge after {steps} steps (last deviation {deviation:.3e})")]
    NotConverged { steps: usize, deviation: f64 },

    #[error("grid is empty after resolving: {0}")]
    EmptyGrid(String),

    #[error("record has no slice states")]
    MissingSlices,

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
