//! Pauli decompositions of the GHZ and W projectors.
//!
//! The sparse coefficient tables below are verified at first use against the
//! trace tr(sigma_s P_phi) over all 64 strings; the trace, not the table, is
//! canonical, and any disagreement beyond 1e-10 is a hard error.

use std::sync::OnceLock;

use qcore::{DensityMatrix, PauliString};
use tomography::{correlation_vector, lex_index, lex_unindex};

use crate::spec::{ReferenceState, WitnessSpec};
use crate::WitnessError;

const TABLE_TOL: f64 = 1e-10;

/// Sparse map from lexicographic Pauli index to the real coefficient of the
/// projector decomposition P = (1/8) sum_s p_s sigma_s. The identity entry
/// p_0 = 1 is always present, and (1/8) sum p^2 = 1 for pure projectors.
#[derive(Debug, Clone)]
pub struct PauliCoefficients {
    num_qubits: usize,
    entries: Vec<(usize, f64)>,
}

impl PauliCoefficients {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Nonzero entries as (lexicographic index, coefficient), sorted by index.
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn coefficient(&self, j: usize) -> f64 {
        self.entries
            .iter()
            .find(|(idx, _)| *idx == j)
            .map(|(_, c)| *c)
            .unwrap_or(0.0)
    }

    pub fn coefficient_of(&self, s: &PauliString) -> f64 {
        self.coefficient(lex_index(s))
    }

    /// (1/8) sum_j p_j T_j — the projector overlap tr(P rho) evaluated from a
    /// correlation vector.
    pub fn overlap_from_correlations(&self, t: &[f64]) -> f64 {
        let norm = 1.0 / (1usize << self.num_qubits) as f64;
        norm * self
            .entries
            .iter()
            .map(|(j, c)| c * t[*j])
            .sum::<f64>()
    }
}

/// (indices as (i1, i2, i3), coefficient)
const GHZ_TABLE: [([u8; 3], f64); 8] = [
    ([0, 0, 0], 1.0),
    ([0, 3, 3], 1.0),
    ([3, 0, 3], 1.0),
    ([3, 3, 0], 1.0),
    ([1, 1, 1], 1.0),
    ([1, 2, 2], -1.0),
    ([2, 1, 2], -1.0),
    ([2, 2, 1], -1.0),
];

const THIRD: f64 = 1.0 / 3.0;
const TWO_THIRDS: f64 = 2.0 / 3.0;

const W_TABLE: [([u8; 3], f64); 20] = [
    ([0, 0, 0], 1.0),
    ([0, 0, 3], THIRD),
    ([0, 3, 0], THIRD),
    ([3, 0, 0], THIRD),
    ([0, 1, 1], TWO_THIRDS),
    ([0, 2, 2], TWO_THIRDS),
    ([0, 3, 3], -THIRD),
    ([1, 0, 1], TWO_THIRDS),
    ([2, 0, 2], TWO_THIRDS),
    ([3, 0, 3], -THIRD),
    ([1, 1, 0], TWO_THIRDS),
    ([2, 2, 0], TWO_THIRDS),
    ([3, 3, 0], -THIRD),
    ([1, 1, 3], TWO_THIRDS),
    ([1, 3, 1], TWO_THIRDS),
    ([3, 1, 1], TWO_THIRDS),
    ([2, 2, 3], TWO_THIRDS),
    ([2, 3, 2], TWO_THIRDS),
    ([3, 2, 2], TWO_THIRDS),
    ([3, 3, 3], -1.0),
];

fn build_verified(which: ReferenceState) -> Result<PauliCoefficients, WitnessError> {
    let table: &[([u8; 3], f64)] = match which {
        ReferenceState::Ghz => &GHZ_TABLE,
        ReferenceState::W => &W_TABLE,
    };
    let mut entries: Vec<(usize, f64)> = table
        .iter()
        .map(|(idx, c)| (lex_index(&PauliString::new(idx).expect("valid indices")), *c))
        .collect();
    entries.sort_by_key(|(j, _)| *j);

    // oracle: the full correlation vector of the projector
    let rho = DensityMatrix::from_pure(&which.state());
    let oracle = correlation_vector(&rho).map_err(|e| match e {
        tomography::TomographyError::Core(c) => WitnessError::Core(c),
        other => WitnessError::BadPair(other.to_string()),
    })?;
    for j in 0..64 {
        let table_val = entries
            .iter()
            .find(|(idx, _)| *idx == j)
            .map(|(_, c)| *c)
            .unwrap_or(0.0);
        let trace_val = oracle.get(j);
        if (table_val - trace_val).abs() > TABLE_TOL {
            return Err(WitnessError::CoefficientMismatch {
                string: lex_unindex(j, 3).expect("in range").label(),
                table: table_val,
                trace: trace_val,
            });
        }
    }
    Ok(PauliCoefficients {
        num_qubits: 3,
        entries,
    })
}

/// Verified Pauli coefficients of the GHZ or W projector.
pub fn projector_pauli_coefficients(which: ReferenceState) -> &'static PauliCoefficients {
    static GHZ: OnceLock<PauliCoefficients> = OnceLock::new();
    static W: OnceLock<PauliCoefficients> = OnceLock::new();
    let cell = match which {
        ReferenceState::Ghz => &GHZ,
        ReferenceState::W => &W,
    };
    cell.get_or_init(|| build_verified(which).expect("coefficient table verified against traces"))
}

/// Lexicographic indices of the non-identity Pauli strings with nonzero
/// coefficient in the witness's projector — the measurement settings that
/// suffice to evaluate it. Computed from traces, so it works for any
/// reference state.
pub fn witness_support(w: &WitnessSpec) -> Vec<usize> {
    let rho = DensityMatrix::from_pure(w.phi());
    let t = correlation_vector(&rho).expect("projector is a valid state");
    (1..t.len()).filter(|&j| t.get(j).abs() > TABLE_TOL).collect()
}
