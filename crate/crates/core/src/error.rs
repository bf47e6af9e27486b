use std::path::PathBuf;

use thiserror::Error;

use crate::airspace::SectorId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid scenario at {pointer}: {reason}")]
    Invalid { pointer: String, reason: String },
    #[error("profile has {found} entries but the scenario has {expected} flights")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("flight {flight} uses action index {index}, but only {options} options exist")]
    ActionIndex { flight: u32, index: usize, options: usize },
    #[error("unknown sector {0}")]
    UnknownSector(u32),
    #[error("deviation is not unilateral: flights of sectors {sectors:?} changed")]
    NotUnilateral { sectors: Vec<SectorId> },
    #[error("kappa must lie in [0, 1], got {0}")]
    KappaRange(String),
    #[error("self-prioritization bound needs at least two sectors and one flight (m = {m}, n = {n})")]
    BoundUndefined { n: usize, m: usize },
    #[error("search space of {size} candidates exceeds the exhaustive cap {cap}")]
    SpaceTooLarge { size: f64, cap: u64 },
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot generate scenario: {0}")]
    Generation(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("parse error at {pointer}: {message}")]
    Parse { pointer: String, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("csv ingestion failed at row {row}: {message}")]
    Csv { row: usize, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("no `{method}` reference rows for group {group}")]
    MissingReference { method: String, group: String },
    #[error("cannot write output {path}: {message}")]
    Output { path: PathBuf, message: String },
}
