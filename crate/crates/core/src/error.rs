use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vector must have at least one component")]
    EmptyVector,
    #[error("vector component {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("projection has no closed form for {0} sets")]
    UnsupportedSet(&'static str),
    #[error("point does not violate the constraint (g(x) + epsilon = {0} <= 0)")]
    NotViolating(f64),
    #[error("subgradient vanishes at the query point")]
    ZeroSubgradient,
    #[error("epsilon must be nonnegative, got {0}")]
    NegativeEpsilon(f64),
    #[error("sublevel sets are backed by code and cannot be serialized")]
    NotSerializable,
    #[error("sample of pairs is empty")]
    EmptySample,
    #[error("problem has no constraints")]
    EmptyProblem,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("trace too short: need at least {needed} iterates, have {found}")]
    TraceTooShort { needed: usize, found: usize },
    #[error("N = {n} is not a Fejér* index: monotonicity fails at k = {k}")]
    InvalidN { n: usize, k: usize },
    #[error("cluster pair is degenerate (distance {0} within tolerance)")]
    DegenerateClusterPair(f64),
    #[error("length mismatch: expected at least {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("anchor set is empty")]
    EmptyAnchorSet,
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}
