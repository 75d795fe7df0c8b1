use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown robot {0}")]
    UnknownRobot(usize),

    #[error("robot {0} is inactive but was given a target")]
    TargetForInactive(usize),

    #[error("active robot {0} has no target")]
    MissingTarget(usize),

    #[error("activation for round {got} supplied out of order (expected round {expected})")]
    OutOfOrder { expected: u64, got: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration is not connected under the {0} range")]
    Disconnected(String),

    #[error("gave up after {0} placement attempts")]
    RetryCapExceeded(usize),

    #[error("gap {index} is {got} but the update oracle predicts {expected}")]
    OracleMismatch {
        index: usize,
        expected: f64,
        got: f64,
    },

    #[error("round {0} is not collinear")]
    NotCollinear(u64),

    #[error("robot order changed during the collinear phase at round {0}")]
    OrderChanged(u64),

    #[error("outer chain robot {0} never moves")]
    OuterRobot(usize),

    #[error("malformed trace: {0}")]
    MalformedTrace(String),

    #[error("replay diverges from the recorded trace at round {0}")]
    ReplayMismatch(u64),

    #[error("sweep cell failed: {0}")]
    SweepFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
