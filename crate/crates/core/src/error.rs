use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid of {n} points per axis cannot resolve cutoff {cutoff} (need at least {required})")]
    GridTooSmall { n: usize, cutoff: usize, required: usize },

    #[error("cutoff mismatch: {0} vs {1}")]
    CutoffMismatch(usize, usize),

    #[error("component count mismatch: {0} vs {1}")]
    ComponentMismatch(usize, usize),

    #[error("box size mismatch: {0} vs {1}")]
    BoxMismatch(f64, f64),

    #[error("grid value count {got} does not match {expected}")]
    GridSize { got: usize, expected: usize },

    #[error("projector order {m} exceeds basis size {size}")]
    BasisTooSmall { m: usize, size: usize },

    #[error("non-finite coefficient at step {step} (t = {t})")]
    NonFinite { step: u64, t: f64 },

    #[error("solenoidality guard: correction {correction:e} exceeds {limit:e} at step {step}")]
    Solenoidality { step: u64, correction: f64, limit: f64 },

    #[error("CFL guard ({guard}): dt = {dt} exceeds limit {limit}")]
    Cfl { guard: &'static str, dt: f64, limit: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
