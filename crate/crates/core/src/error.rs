use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("agent {agent} is out of range 1..={n}")]
    AgentOutOfRange { agent: usize, n: usize },

    #[error("self-loop on agent {0}")]
    SelfLoop(usize),

    #[error("graph must have at least one agent")]
    EmptyGraph,

    #[error("graph is not connected")]
    Disconnected,

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("matrix is empty")]
    EmptyMatrix,

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("noise queried out of order: expected step {expected}, got {got}")]
    OutOfOrder { expected: usize, got: usize },

    #[error("undetectable configuration: {0}")]
    Undetectable(String),

    #[error("no detectable attacker set among the candidates")]
    NoDetectableCandidates,

    #[error("too few usable points ({found}) for the rate estimate, need {needed}")]
    TooFewPoints { needed: usize, found: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Coarse classification of an [`Error`], mapped onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// A domain constraint was violated (exit code 1).
    Validation,
    /// Reading or parsing input failed (exit code 2).
    Input,
    /// A numerical routine failed (exit code 3).
    Numerical,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Validation => 1,
            ErrorClass::Input => 2,
            ErrorClass::Numerical => 3,
        }
    }
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => ErrorClass::Input,
            Error::Numerical(_) | Error::NonFinite(_) => ErrorClass::Numerical,
            _ => ErrorClass::Validation,
        }
    }

    pub(crate) fn dims(
        context: &'static str,
        expected: impl ToString,
        found: impl ToString,
    ) -> Self {
        Error::DimensionMismatch {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
