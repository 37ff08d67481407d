use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Integer parameter (order, site count, bit depth, scan depth) out of range.
    #[error("range error: {0}")]
    Range(String),

    #[error("singular system: pivot {pivot:.3e} in column {column} is below {threshold:.0e}")]
    Singular {
        column: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("undersampled: {n_beams} beams cannot represent azimuthal order {order} (need at least {required})")]
    Undersampled {
        n_beams: usize,
        order: usize,
        required: usize,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("grid too large: {nx} x {ny} samples (limit {limit} per axis)")]
    GridTooLarge { nx: usize, ny: usize, limit: usize },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
