use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("entry count {found} does not match {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, found: usize },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("non-finite entry")]
    NonFinite,
    #[error("invalid observable: {0}")]
    InvalidPovm(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("invalid instrument: {0}")]
    InvalidInstrument(String),
    #[error("invalid joint observable: {0}")]
    InvalidJoint(String),
    #[error("outcome mismatch: {0}")]
    OutcomeMismatch(String),
    #[error("mixing weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),
    #[error("observables do not commute (max commutator norm {max_commutator:e})")]
    NotCommuting { max_commutator: f64 },
    #[error("inconsistent marginals (normalization gap {gap:e})")]
    InconsistentMarginals { gap: f64 },
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
}
