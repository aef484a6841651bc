use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: malformed text, invalid configuration, violated preconditions.
    Input,
    /// The numerics broke down: non-finite values, leaked imaginary energy.
    Numeric,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max |H - H^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operator dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("non-finite entry at index {index}")]
    NonFiniteEntry { index: usize },

    #[error("pivot {pivot} out of range for dimension {dim}")]
    PivotOutOfRange { pivot: usize, dim: usize },

    #[error("amplitude at pivot {pivot} is too small to divide by (|a| = {modulus:e})")]
    ZeroPivot { pivot: usize, modulus: f64 },

    #[error("{qubits} qubits exceeds the configured cap of {cap}")]
    QubitCap { qubits: usize, cap: usize },

    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("term {term} has {found} labels but earlier terms have {expected}")]
    MixedLabelLength {
        term: usize,
        expected: usize,
        found: usize,
    },

    #[error("coefficient of term {term} is not finite")]
    NonFiniteCoefficient { term: usize },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("invalid flow settings: {0}")]
    InvalidSettings(String),

    #[error("observable `{observable}` requires N = 4, system has N = {dim}")]
    RequiresTwoQubits { observable: &'static str, dim: usize },

    #[error("non-finite value during integration at step {step}")]
    NonFiniteStep { step: usize },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("classical energy has imaginary part {imag:e}")]
    ImaginaryEnergy { imag: f64 },

    #[error("invalid scenario: {0}")]
    Validation(String),

    #[error("cannot parse scenario: {0}")]
    ScenarioParse(#[from] toml::de::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NonFiniteStep { .. }
            | Error::Eigen(_)
            | Error::ImaginaryEnergy { .. } => ErrorKind::Numeric,
            Error::Io(_) => ErrorKind::Io,
            _ => ErrorKind::Input,
        }
    }
}
