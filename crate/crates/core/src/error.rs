use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("distance matrix has no positive entry (all points coincide)")]
    DegenerateMatrix,

    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),

    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("invalid radius grid: {0}")]
    InvalidGrid(String),

    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),

    #[error("{n} is not a perfect cube (nearest cubes: {below} and {above})")]
    NotACube {
        n: usize,
        below: usize,
        above: usize,
    },

    #[error("integration diverged at step {step}")]
    Diverged { step: usize },

    #[error("curve error: {0}")]
    Curve(String),

    #[error("ensembles do not share a radius grid")]
    GridMismatch,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("missing input {}", .0.display())]
    MissingInput(PathBuf),

    #[error("malformed input {}: {msg}", path.display())]
    Malformed { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
