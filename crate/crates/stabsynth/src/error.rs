use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not hollow symmetric")]
    NotHollowSymmetric,
    #[error("matrix has odd dimension {0}")]
    OddDimension(usize),
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("rows do not form the lower half of a symplectic matrix")]
    NotSymplecticHalf,
    #[error("lower half has rank {0}, expected {1}")]
    RankDeficient(usize, usize),
    #[error("element is not in the Borel subgroup")]
    NotBorel,
    #[error("qubit {qubit} out of range for {n} qubits")]
    InvalidQubit { qubit: usize, n: usize },
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("circuit contains a Hadamard gate")]
    HadamardNotSupported,
    #[error("phase polynomial has a term of weight > 2")]
    NotQuadratic,
    #[error("linear part must be the identity")]
    NonIdentityLinearPart,
    #[error("too many qubits ({0}) for this operation")]
    TooManyQubits(usize),
    #[error("search budget exceeded")]
    SearchBudgetExceeded,
    #[error("target is not generated by the gate alphabet")]
    Unreachable,
    #[error("unsupported size n = {0}")]
    UnsupportedSize(usize),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
