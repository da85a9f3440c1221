use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for a chain of {n} qubits")]
    QubitIndex { index: usize, n: usize },

    #[error("invalid qubit pair ({i}, {j}) for a chain of {n} qubits; need 1 <= i < j <= n")]
    PairIndex { i: usize, j: usize, n: usize },

    #[error("excitation count {k} out of range for a chain of {n} qubits")]
    ExcitationCount { k: usize, n: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid chain parameters: {0}")]
    Params(String),

    #[error("invalid two-qubit density matrix: spin-flip eigenvalue {eigenvalue:e}")]
    InvalidDensity { eigenvalue: f64 },

    #[error("non-finite entries in the hierarchy state at t = {time}")]
    NonFinite { time: f64 },

    #[error("trace of {block} drifted by {error:e} at t = {time}")]
    TraceBreach { block: &'static str, error: f64, time: f64 },

    #[error("empty trajectory")]
    EmptyTrajectory,

    #[error("average pairwise concurrence needs at least two qubits, got {0}")]
    TooFewQubits(usize),

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("invalid config field `{field}`: {reason}")]
    ConfigField { field: String, reason: String },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::ConfigField { field: field.into(), reason: reason.into() }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { context: context.into(), source }
    }
}
