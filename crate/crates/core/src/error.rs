use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("damping parameter {0} outside [0, 1]")]
    InvalidGamma(f64),
    #[error("polar angle {0} outside [0, pi]")]
    InvalidAngle(f64),
    #[error("cannot renormalize the zero Bloch vector")]
    ZeroNorm,
    #[error("map undefined at gamma = 1/2, theta = pi")]
    UndefinedPoint,
    #[error("qubit index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("CNOT control and target are both qubit {0}")]
    ControlEqualsTarget(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("random circuits need at least 2 qubits, got {0}")]
    TooFewQubits(usize),
    #[error("not a probability vector: {0}")]
    NotAProbabilityVector(String),
    #[error("ensemble needs at least {needed} members, got {got}")]
    EmptyEnsemble { needed: usize, got: usize },
    #[error("invalid config field `{field}`: {message}")]
    Config {
        field: &'static str,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: &'static str, message: impl Into<String>) -> Self {
        Error::Config {
            field,
            message: message.into(),
        }
    }
}
