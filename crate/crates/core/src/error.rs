use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("qubit {index} out of range for a {qubits}-qubit register")]
    QubitOutOfRange { index: usize, qubits: usize },
    #[error("qubit {0} listed twice")]
    DuplicateQubit(usize),
    #[error("basis label {0} listed twice")]
    DuplicateLabel(u128),
    #[error("states live on different bases")]
    BasisMismatch,
    #[error("operation needs a qubit-register basis")]
    NotQubitBasis,
    #[error("amplitudes are not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("dimension {dim} exceeds the configured cap {cap}")]
    CapExceeded { dim: usize, cap: usize },
    #[error("power {power} is outside the declared range {range}")]
    PowerOutOfRange { power: i128, range: u128 },
    #[error("control qubit {0} overlaps the target register")]
    ControlOverlap(usize),
    #[error("{0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("terms {0} and {1} do not commute (commutator norm {2:e})")]
    NonCommuting(usize, usize, f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
