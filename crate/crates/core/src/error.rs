use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid catalog: {0}")]
    InvalidCatalog(String),
    #[error("invalid container: {0}")]
    InvalidContainer(String),
    #[error("scene {scene}: {reason}")]
    InvalidDemonstration { scene: String, reason: String },
    #[error("scene {scene}: unknown object id `{object}`")]
    UnknownObject { scene: String, object: String },
    #[error("no scene within the volume band after {attempts} attempts")]
    SamplingFailure { attempts: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("object `{0}` has no recorded placements")]
    NoPlacements(String),
    #[error("degenerate model: {0}")]
    DegenerateModel(String),
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("oracle guard exceeded: {size} objects (limit {limit})")]
    OracleGuard { size: usize, limit: usize },
    #[error("invalid statistics input: {0}")]
    InvalidStatistic(String),
}
