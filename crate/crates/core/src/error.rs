use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid size {0}: must be even and at least 16")]
    InvalidGridSize(usize),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: usize, right: usize },

    #[error("vorticity has nonzero mean {0:e}")]
    NonzeroMean(f64),

    #[error("integrator needs {needed} history entries, has {have}")]
    MissingHistory { needed: usize, have: usize },

    #[error("bootstrap step requested at step index {0}; startup is already complete")]
    BootstrapComplete(u64),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid observer configuration: {0}")]
    InvalidObservers(String),

    #[error("degenerate interpolation geometry: {0}")]
    DegenerateGeometry(String),

    #[error("forcing band {lo}..={hi} has no modes inside the dealiased band of N={n}")]
    EmptyForcingBand { lo: f64, hi: f64, n: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
