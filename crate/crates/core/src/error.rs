use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("probabilities sum to {sum}, expected exactly 1")]
    SumNotOne { sum: String },
    #[error("duplicate atom {0}")]
    DuplicateAtom(String),
    #[error("negative probability {p} at atom {atom}")]
    NegativeProb { atom: String, p: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable sets overlap on `{0}`")]
    OverlappingSets(String),
    #[error("conditioning event has zero probability")]
    ZeroMassEvent,
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("gave up after {0} attempts")]
    RetryExhausted(usize),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("not a partition: {0}")]
    NotAPartition(String),
    #[error("not a cover: {0}")]
    NotACover(String),
    #[error("instance too large: {size} > limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("graph has no edges")]
    EmptyGraph,
}
