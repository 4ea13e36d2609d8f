use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (relative deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (most negative eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("matrix has no support (all eigenvalues are zero)")]
    NoSupport,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid bipartite state: {0}")]
    InvalidBipartite(String),

    #[error("state label {label} out of range for an ensemble of {count} states")]
    LabelOutOfRange { label: usize, count: usize },

    #[error("reduced operator is inconsistent with the bipartite state (deviation {deviation:e})")]
    InconsistentMarginal { deviation: f64 },

    #[error("outcome has zero probability ({probability:e}); conditional quantities are undefined")]
    ZeroProbability { probability: f64 },

    #[error("measurement is incomplete (deviation of the effect sum from identity {deviation:e})")]
    IncompletePom { deviation: f64 },

    #[error("invalid Kraus operator: {0}")]
    InvalidKraus(String),

    #[error("Kraus operator annihilates state {label} (Tr(ρ A†A) = {weight:e})")]
    AnnihilatedState { label: usize, weight: f64 },

    #[error("state has Schmidt rank 1; there is no entanglement to concentrate")]
    ProductState,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
