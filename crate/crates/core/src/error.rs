use thiserror::Error;

#[derive(Debug, Error)]
pub enum AbcError {
    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("edge weight needs positive degrees, got ({0}, {1})")]
    NonPositiveDegree(i64, i64),

    #[error("invalid degree sequence: {0}")]
    InvalidDegreeSequence(String),

    #[error("order {n} exceeds the capacity {cap}")]
    Capacity { n: usize, cap: usize },

    #[error("order {n} below the minimum {min}")]
    OrderTooSmall { n: usize, min: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid branch: {0}")]
    InvalidBranch(String),

    #[error("invalid family config: {0}")]
    InvalidConfig(String),

    #[error("invalid move: {0}")]
    InvalidMove(String),

    #[error("domain violation in {lemma}: {msg}")]
    Domain { lemma: String, msg: String },

    #[error("unknown lemma id `{0}`")]
    UnknownLemma(String),

    #[error("sweep of {points} points exceeds the cap {cap}")]
    SweepTooLarge { points: u128, cap: u128 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, AbcError>;
