//! Round-trip and purity properties over randomly generated states.

use proptest::prelude::*;

use qcore::{Complex64, ComplexMatrix, DensityMatrix, PauliString};
use tomography::{correlation_vector, lex_index, lex_unindex, reconstruct_density};

/// Random full-rank density matrix built from a raw complex square matrix
/// as X X^dagger / tr. Kept local so the checks stay independent of the
/// dataset generators.
fn density_from_raw(num_qubits: usize, raw: &[f64]) -> DensityMatrix {
    let dim = 1usize << num_qubits;
    assert_eq!(raw.len(), 2 * dim * dim);
    let entries: Vec<Complex64> = raw
        .chunks(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect();
    let x = ComplexMatrix::from_rows(dim, dim, &entries).unwrap();
    let xx = x.matmul(&x.adjoint());
    let tr = xx.trace().re;
    // tr > 0 unless every entry is ~0; the strategy below keeps entries away
    // from the all-zero corner
    let rho = xx.scale(Complex64::new(1.0 / tr, 0.0));
    DensityMatrix::new(rho).expect("XX^dagger / tr is a state")
}

fn raw_entries(num_qubits: usize) -> impl Strategy<Value = Vec<f64>> {
    let dim = 1usize << num_qubits;
    prop::collection::vec(0.05f64..1.0, 2 * dim * dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lex_round_trip(j in 0usize..64) {
        let s = lex_unindex(j, 3).unwrap();
        prop_assert_eq!(lex_index(&s), j);
    }

    #[test]
    fn pauli_string_round_trip(idx in prop::collection::vec(0u8..4, 2..=3)) {
        let s = PauliString::new(&idx).unwrap();
        let j = lex_index(&s);
        prop_assert_eq!(lex_unindex(j, idx.len()).unwrap(), s);
    }

    #[test]
    fn two_qubit_round_trip(raw in raw_entries(2)) {
        let rho = density_from_raw(2, &raw);
        let t = correlation_vector(&rho).unwrap();
        let rec = reconstruct_density(&t).unwrap();
        prop_assert!(rec.physical);
        prop_assert!(rec.matrix.max_abs_diff(rho.matrix()) < 1e-10);
        // purity identity
        prop_assert!((t.purity() - rho.purity()).abs() < 1e-10);
        prop_assert!(t.purity() <= 1.0 + 1e-9);
    }

    #[test]
    fn three_qubit_round_trip(raw in raw_entries(3)) {
        let rho = density_from_raw(3, &raw);
        let t = correlation_vector(&rho).unwrap();
        let rec = reconstruct_density(&t).unwrap();
        prop_assert!(rec.matrix.max_abs_diff(rho.matrix()) < 1e-10);
    }
}
