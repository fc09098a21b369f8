use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SmgoError {
    #[error("point lies within the duplicate tolerance of existing sample {index}")]
    DuplicatePoint { index: usize },
    #[error("component {dim} = {value} is outside [{lower}, {upper}]")]
    OutOfBounds {
        dim: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension {dim} exceeds the limit of {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("invalid search space: {0}")]
    InvalidSpace(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("history is empty")]
    EmptyHistory,
    #[error("at least {needed} samples are required, have {have}")]
    TooFewSamples { needed: usize, have: usize },
    #[error("samples {0} and {1} are at zero distance")]
    ZeroDistance(usize, usize),
    #[error("no exploitation candidate satisfies the best-point cone constraint")]
    Infeasible,
    #[error("every exploration candidate coincides with an existing sample")]
    PoolExhausted,
    #[error("evaluation budget of {0} is exhausted")]
    BudgetExhausted(usize),
    #[error("protocol violation: {0}")]
    ProtocolViolation(&'static str),
    #[error("cost value is not finite")]
    NonFiniteValue,
    #[error("unknown benchmark function `{0}`")]
    UnknownFunction(String),
}

pub type Result<T, E = SmgoError> = std::result::Result<T, E>;
