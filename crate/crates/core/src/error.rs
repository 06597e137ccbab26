use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A vector or grid value does not conform to its space.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The space lacks a capability (lattice operations, one-sided rule, ...).
    #[error("capability error: {0}")]
    Capability(String),

    /// A theorem hypothesis (order continuity, p > d, ...) is not met.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value at node {index}")]
    NonFinite { index: usize },

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    /// Empirical Lipschitz quotient exceeded the claimed constant.
    #[error("lipschitz violation between nodes {a} and {b}: quotient {quotient} > {constant}")]
    LipschitzViolation {
        a: usize,
        b: usize,
        quotient: f64,
        constant: f64,
    },

    #[error("certification failed: {0}")]
    Certification(String),

    /// Manifest rejected; `pointer` is a JSON pointer into the document.
    #[error("config error at {pointer}: {message}")]
    Config { pointer: String, message: String },

    #[error("io error: {0}")]
    Io(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
