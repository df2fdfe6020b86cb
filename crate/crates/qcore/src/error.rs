use thiserror::Error;

#[derive(Debug, Error)]
pub enum QcoreError {
    #[error("matrix dimensions invalid: {0}")]
    BadDimensions(String),
    #[error("matrix is not Hermitian (max deviation {deviation:.3e} exceeds tol {tol:.3e})")]
    NotHermitian { deviation: f64, tol: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps (off-norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("state is not normalized (|norm^2 - 1| = {0:.3e})")]
    NotNormalized(f64),
    #[error("not a density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("invalid Pauli index {index} (must be 0..=3)")]
    BadPauliIndex { index: usize },
    #[error("unsupported qubit count {0} (supported: 1..=3)")]
    BadQubitCount(usize),
    #[error("subsystem index {index} out of range for {qubits} qubits")]
    BadSubsystem { index: usize, qubits: usize },
}
