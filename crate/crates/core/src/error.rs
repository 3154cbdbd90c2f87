use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema error at {path} (line {line}, column {column}): {message}")]
    Schema {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    #[error("arc lengths differ: instance {instance}, trajectory {trajectory}")]
    LengthMismatch {
        instance: String,
        trajectory: String,
    },

    #[error("arc length {0} is outside the instance")]
    OutOfRange(String),

    #[error("instance is not axis-parallel (segment {0}); rectify it first")]
    NotAxisParallel(usize),

    #[error("engine invariant breached: {0}")]
    InvariantBreach(String),

    #[error("offline trajectory is not aligned with the request at s = {0}")]
    InfeasibleOpt(String),

    #[error("malformed trace: {0}")]
    MalformedTrace(String),

    #[error("points are not aligned: {0}")]
    Misaligned(String),

    #[error("request sequence of length {len} exceeds the brute-force limit {limit}")]
    SequenceTooLong { len: usize, limit: usize },

    #[error("request {index} is not orthogonal to its predecessor")]
    NonOrthogonal { index: usize },

    #[error("online protocol violation: {0}")]
    Protocol(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
