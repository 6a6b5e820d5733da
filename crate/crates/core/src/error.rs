use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("operators {0} and {1} do not commute")]
    NonCommuting(usize, usize),

    #[error("generator {0} is not independent of the preceding ones")]
    Dependent(usize),

    #[error("operator {0} is not Hermitian")]
    NonHermitian(usize),

    #[error("inconsistent signs: the generators imply -I")]
    InconsistentSigns,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("expected a pure state, found {generators} generators on {qubits} qubits")]
    MixedState { generators: usize, qubits: usize },

    #[error("group is not expressible over the logical basis")]
    Inexpressible,

    #[error("regions overlap or fall outside the register")]
    BadRegions,

    #[error("failed to sample a simple (3,6)-regular graph after {0} attempts")]
    LdpcSampling(usize),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("cannot parse Pauli string {0:?}")]
    PauliParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
