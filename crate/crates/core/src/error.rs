use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("side maps differ")]
    ChiMismatch,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partition {0} is not bi-non-crossing for the given side map")]
    NotBiNoncrossing(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("enumeration of n = {n} exceeds the limit {limit} (Catalan growth: C({n}) = {count})")]
    LimitExceeded { n: usize, limit: usize, count: u64 },

    #[error("{sigma} is not a refinement of {pi}")]
    NotRefinement { sigma: String, pi: String },

    #[error("subset is not a union of blocks")]
    NotUnionOfBlocks,

    #[error("index {index} out of range for arity {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("malformed grouping: {0}")]
    MalformedGroups(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("operator at position {position} is not a {side} operator")]
    SideAdmissibility { position: usize, side: &'static str },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("truncation: {0}")]
    Truncation(String),

    #[error("L/R choice disagreement while absorbing block {block}")]
    ChoiceDisagreement { block: String },

    #[error("only defined for a scalar base algebra (b_dim = 1), got b_dim = {0}")]
    NotScalar(usize),

    #[error("scenario: {0}")]
    Scenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
