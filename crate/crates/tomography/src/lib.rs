//! Pauli correlation vectors: the measurement encoding used as network
//! input.
//!
//! An N-qubit state is represented by the 4^N expectation values of the
//! Pauli strings, stored flat in lexicographic order. The same order is the
//! canonical feature order on disk and in memory everywhere downstream.

mod corr;
mod error;
mod shots;

pub use corr::{
    correlation_vector, lex_index, lex_unindex, pauli_expectation, reconstruct_density,
    sparse_pauli_table, CorrelationVector, Reconstruction,
};
pub use error::TomographyError;
pub use shots::{finite_shot_correlation, perturb_with_shots, ShotConfig};
