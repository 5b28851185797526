use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {layer}: expected {expected:?}, got {got:?}")]
    Shape {
        layer: String,
        expected: Vec<usize>,
        got: Vec<usize>,
    },
    #[error("tensor of shape {shape:?} cannot hold {len} values")]
    TensorLayout { shape: Vec<usize>, len: usize },
    #[error("tape was already consumed by a backward pass")]
    TapeSpent,
    #[error("backward requires a scalar loss, got shape {0:?}")]
    NonScalarLoss(Vec<usize>),
    #[error("non-finite gradient for parameter `{0}`")]
    NonFiniteGradient(String),
    #[error("gradient set does not match parameters: {0}")]
    GradientCoverage(String),
    #[error("parameter sets differ: {0}")]
    ParamMismatch(String),
    #[error("non-finite {what}: {detail}")]
    NonFinite { what: &'static str, detail: String },
    #[error("ray origin {0:?} lies outside the tank")]
    OriginOutsideTank([f64; 3]),
    #[error("{sensor} cannot be sampled while the vehicle is in {medium}")]
    WrongMedium {
        sensor: &'static str,
        medium: &'static str,
    },
    #[error("could not sample a collision-free {what} after {attempts} attempts")]
    SamplingFailed { what: &'static str, attempts: usize },
    #[error("replay buffer holds {have} transitions, {need} required")]
    BufferTooSmall { have: usize, need: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("unsupported checkpoint version {0}")]
    CheckpointVersion(u32),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
