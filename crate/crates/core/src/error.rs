use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("node id {id} out of range for {n} nodes")]
    InvalidNodeId { id: usize, n: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("vector dimension must be positive")]
    ZeroDimension,

    #[error("non-finite value in vector {row} at coordinate {col}")]
    NonFinite { row: usize, col: usize },

    #[error("graph is empty")]
    EmptyGraph,

    #[error("graph has {graph} nodes but dataset has {dataset}")]
    GraphSizeMismatch { graph: usize, dataset: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("k must satisfy 1 <= k <= n (k = {k}, n = {n})")]
    InvalidK { k: usize, n: usize },

    #[error("beam width {b} is smaller than k = {k}")]
    BeamTooNarrow { b: usize, k: usize },

    #[error("gamma must be finite and >= 0, got {0}")]
    InvalidGamma(f64),

    #[error("gamma must lie in (0, 2] for the approximation check, got {0}")]
    GammaOutOfRange(f64),

    #[error("alpha must be >= 1, got {0}")]
    InvalidAlpha(f64),

    #[error("need at least {min} nodes, got {n}")]
    TooFewNodes { n: usize, min: usize },

    #[error("graph is not navigable: no out-neighbor of {x} is closer to {y}")]
    NotNavigable { x: u32, y: u32 },

    #[error("ground truth has depth {have}, need at least {need}")]
    InsufficientTruth { have: usize, need: usize },

    #[error("ground truth covers {have} queries, need {need}")]
    TruthCountMismatch { have: usize, need: usize },

    #[error("bin width must be positive, got {0}")]
    InvalidBinWidth(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: malformed file at byte offset {offset}: {reason}")]
    Format {
        path: PathBuf,
        offset: u64,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
