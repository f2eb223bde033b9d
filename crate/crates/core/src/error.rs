use thiserror::Error;

/// Errors surfaced by instance validation, simulation and the harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pattern must not be empty")]
    EmptyPattern,
    #[error("pattern length {m} exceeds text length {n}")]
    PatternLongerThanText { m: usize, n: usize },
    #[error("mismatch threshold k must be positive, got {0}")]
    NonPositiveK(i64),
    #[error("epsilon must lie in (0, 1], got {0}")]
    EpsilonOutOfRange(f64),
    #[error("strings have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("state needs {qubits} qubits but the cap is {cap}")]
    StateTooLarge { qubits: usize, cap: usize },
    #[error("cannot plant instance: {0}")]
    InfeasiblePlant(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// True for errors caused by user-supplied parameters (CLI exit code 2).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::StateTooLarge { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
