//! Complex linear algebra and quantum-state primitives for few-qubit systems.
//!
//! Everything here is dense and small (dimensions up to 8), so the crate keeps
//! its own matrix type and a hand-rolled Hermitian eigensolver instead of
//! pulling in a linear-algebra dependency. Complex scalars come from
//! `num-complex`.

pub mod eigen;
pub mod error;
pub mod matrix;
pub mod pauli;
pub mod seed;
pub mod states;

pub use eigen::hermitian_eigenvalues;
pub use error::QcoreError;
pub use matrix::ComplexMatrix;
pub use pauli::{pauli_matrix, PauliString};
pub use states::{
    bell_state, basis_state, ghz_state, is_ppt, orthonormal_complement, partial_transpose,
    reduced_purity, single_qubit_purity, w_state, DensityMatrix, PureState,
};

pub type Complex64 = num_complex::Complex<f64>;

/// Tolerance below which a numerically computed eigenvalue still counts as
/// non-negative. Sampled states can pick up round-off of this size.
pub const PSD_TOL: f64 = 1e-10;

/// Tolerance for Hermiticity and normalization checks.
pub const HERM_TOL: f64 = 1e-12;
