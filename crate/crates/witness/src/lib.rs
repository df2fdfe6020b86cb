//! Projector-based entanglement witnesses W = alpha*I - |phi><phi| for
//! three-qubit states, plus the analysis tools built on them: detection
//! regimes in the depolarization parameter, Pauli decompositions of the GHZ
//! and W projectors, redundancy/disjointness checks between witnesses, and
//! analytic detection boundaries for relative-phase families.

mod checks;
mod coefficients;
mod phases;
mod spec;

pub use checks::{check_disjointness, check_redundancy, CheckOutcome};
pub use coefficients::{projector_pauli_coefficients, witness_support, PauliCoefficients};
pub use phases::{ghz_phase_state, phase_boundary, w_phase_state, PhasePoint};
pub use spec::{detection_regime, witness_value, DetectionRegime, ReferenceState, WitnessSpec};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error(transparent)]
    Core(#[from] qcore::QcoreError),
    #[error("witness alpha {0} outside (0, 1)")]
    BadAlpha(f64),
    #[error("dimension mismatch: witness acts on dim {expected}, state has dim {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("coefficient table disagrees with trace oracle at {string}: table {table}, trace {trace}")]
    CoefficientMismatch {
        string: String,
        table: f64,
        trace: f64,
    },
    #[error("witness pair violates precondition: {0}")]
    BadPair(String),
}
