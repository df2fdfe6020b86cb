use thiserror::Error;

#[derive(Debug, Error)]
pub enum TomographyError {
    #[error(transparent)]
    Core(#[from] qcore::QcoreError),
    #[error("lexicographic index {index} out of range for {qubits} qubits")]
    IndexOutOfRange { index: usize, qubits: usize },
    #[error("unsupported qubit count {0} (supported: 1..=3)")]
    BadQubitCount(usize),
    #[error("expectation value has imaginary part {0:.3e} (input not Hermitian?)")]
    ImaginaryExpectation(f64),
    #[error("correlation vector invalid: {0}")]
    InvalidVector(String),
    #[error("shot count must be at least 1")]
    ZeroShots,
}
