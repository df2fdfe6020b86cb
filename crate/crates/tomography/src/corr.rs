//! Ideal correlation vectors and the lexicographic index.

use std::sync::OnceLock;

use qcore::pauli::SparsePauli;
use qcore::{Complex64, ComplexMatrix, DensityMatrix, PauliString};

use crate::TomographyError;

const IM_TOL: f64 = 1e-10;

/// The 4^N Pauli expectation values of an N-qubit state, in lexicographic
/// order. Entry 0 belongs to the identity string and is exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationVector {
    num_qubits: usize,
    values: Vec<f64>,
}

impl CorrelationVector {
    pub fn new(num_qubits: usize, values: Vec<f64>) -> Result<Self, TomographyError> {
        if num_qubits == 0 || num_qubits > 3 {
            return Err(TomographyError::BadQubitCount(num_qubits));
        }
        if values.len() != 4usize.pow(num_qubits as u32) {
            return Err(TomographyError::InvalidVector(format!(
                "expected {} entries, got {}",
                4usize.pow(num_qubits as u32),
                values.len()
            )));
        }
        if values[0] != 1.0 {
            return Err(TomographyError::InvalidVector(format!(
                "identity entry must be exactly 1, got {}",
                values[0]
            )));
        }
        for (j, &v) in values.iter().enumerate() {
            if v.abs() > 1.0 + 1e-9 || !v.is_finite() {
                return Err(TomographyError::InvalidVector(format!(
                    "entry {j} = {v} outside [-1, 1]"
                )));
            }
        }
        Ok(Self { num_qubits, values })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, j: usize) -> f64 {
        self.values[j]
    }

    /// (1/2^N) * sum T_j^2, which equals tr(rho^2) for the encoded state.
    pub fn purity(&self) -> f64 {
        let norm = 1.0 / (1usize << self.num_qubits) as f64;
        norm * self.values.iter().map(|v| v * v).sum::<f64>()
    }
}

/// Lexicographic index of a Pauli string: qubit n contributes i_n * 4^(n-1).
pub fn lex_index(s: &PauliString) -> usize {
    s.indices()
        .iter()
        .enumerate()
        .map(|(n, &i)| (i as usize) << (2 * n))
        .sum()
}

/// Inverse of [`lex_index`].
pub fn lex_unindex(j: usize, num_qubits: usize) -> Result<PauliString, TomographyError> {
    if num_qubits == 0 || num_qubits > 3 {
        return Err(TomographyError::BadQubitCount(num_qubits));
    }
    if j >= 4usize.pow(num_qubits as u32) {
        return Err(TomographyError::IndexOutOfRange {
            index: j,
            qubits: num_qubits,
        });
    }
    let idx: Vec<u8> = (0..num_qubits).map(|n| ((j >> (2 * n)) & 3) as u8).collect();
    Ok(PauliString::new(&idx)?)
}

/// All 4^N Pauli strings in sparse form, indexed lexicographically. Cached
/// per qubit count.
pub fn sparse_pauli_table(num_qubits: usize) -> &'static [SparsePauli] {
    static TABLES: [OnceLock<Vec<SparsePauli>>; 3] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    assert!((1..=3).contains(&num_qubits));
    TABLES[num_qubits - 1].get_or_init(|| {
        (0..4usize.pow(num_qubits as u32))
            .map(|j| {
                let s = lex_unindex(j, num_qubits).expect("in-range index");
                SparsePauli::from_string(&s)
            })
            .collect()
    })
}

/// tr(sigma_s * m) for any square matrix of matching dimension.
pub fn pauli_expectation(m: &ComplexMatrix, s: &PauliString) -> Complex64 {
    SparsePauli::from_string(s).trace_with(m)
}

/// Ideal correlation vector T_j = tr(sigma_j rho). The identity entry is
/// pinned to exactly 1; an imaginary part above 1e-10 in any expectation is
/// rejected.
pub fn correlation_vector(rho: &DensityMatrix) -> Result<CorrelationVector, TomographyError> {
    let n = rho
        .num_qubits()
        .ok_or(TomographyError::BadQubitCount(rho.dim()))?;
    if n == 0 || n > 3 {
        return Err(TomographyError::BadQubitCount(n));
    }
    let table = sparse_pauli_table(n);
    let mut values = Vec::with_capacity(table.len());
    values.push(1.0);
    for sp in &table[1..] {
        let t = sp.trace_with(rho.matrix());
        if t.im.abs() > IM_TOL {
            return Err(TomographyError::ImaginaryExpectation(t.im));
        }
        // valid states keep |T| <= 1; shave off round-off
        values.push(t.re.clamp(-1.0, 1.0));
    }
    CorrelationVector::new(n, values)
}

/// Result of inverting a correlation vector back to an operator. Finite-shot
/// vectors may produce a non-positive matrix; that case is flagged rather
/// than rejected.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub matrix: ComplexMatrix,
    /// true when all eigenvalues are >= -1e-10
    pub physical: bool,
    pub min_eigenvalue: f64,
}

impl Reconstruction {
    pub fn into_density_matrix(self) -> Result<DensityMatrix, TomographyError> {
        Ok(DensityMatrix::new(self.matrix)?)
    }
}

/// rho = (1/2^N) sum_j T_j sigma_j.
pub fn reconstruct_density(t: &CorrelationVector) -> Result<Reconstruction, TomographyError> {
    let n = t.num_qubits();
    let dim = 1usize << n;
    let table = sparse_pauli_table(n);
    let mut mat = ComplexMatrix::zeros(dim, dim);
    let scale = 1.0 / dim as f64;
    for (j, sp) in table.iter().enumerate() {
        let w = t.get(j) * scale;
        if w == 0.0 {
            continue;
        }
        for (r, (&c, &v)) in sp.cols.iter().zip(&sp.vals).enumerate() {
            mat.add_assign_at(r, c, v * w);
        }
    }
    let eigs = qcore::hermitian_eigenvalues(&mat, 1e-9)?;
    Ok(Reconstruction {
        matrix: mat,
        physical: eigs[0] >= -qcore::PSD_TOL,
        min_eigenvalue: eigs[0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcore::{basis_state, bell_state, pauli_matrix};

    #[test]
    fn lex_index_examples() {
        assert_eq!(lex_index(&PauliString::new(&[0, 0]).unwrap()), 0);
        // (i1, i2) = (3, 2) -> 3 + 4*2 = 11
        assert_eq!(lex_index(&PauliString::new(&[3, 2]).unwrap()), 11);
        assert!(lex_unindex(16, 2).is_err());
    }

    #[test]
    fn lex_round_trip_exhaustive() {
        for n in 1..=3 {
            for j in 0..4usize.pow(n as u32) {
                let s = lex_unindex(j, n).unwrap();
                assert_eq!(lex_index(&s), j);
            }
        }
    }

    #[test]
    fn maximally_mixed_correlations() {
        let t = correlation_vector(&DensityMatrix::maximally_mixed(4)).unwrap();
        assert_eq!(t.get(0), 1.0);
        assert!(t.values()[1..].iter().all(|&v| v.abs() < 1e-14));
    }

    #[test]
    fn bell_state_correlations() {
        let t = correlation_vector(&DensityMatrix::from_pure(&bell_state())).unwrap();
        let xx = lex_index(&PauliString::new(&[1, 1]).unwrap());
        let yy = lex_index(&PauliString::new(&[2, 2]).unwrap());
        let zz = lex_index(&PauliString::new(&[3, 3]).unwrap());
        assert!((t.get(xx) - 1.0).abs() < 1e-12);
        assert!((t.get(yy) + 1.0).abs() < 1e-12);
        assert!((t.get(zz) - 1.0).abs() < 1e-12);
        let nonzero: Vec<usize> = (0..16).filter(|&j| t.get(j).abs() > 1e-12).collect();
        assert_eq!(nonzero, vec![0, xx, yy, zz]);
        // oracle: dense trace against pauli_matrix
        let proj = bell_state().projector();
        for j in 0..16 {
            let s = lex_unindex(j, 2).unwrap();
            let dense = pauli_matrix(&s).matmul(&proj).trace();
            assert!((dense.re - t.get(j)).abs() < 1e-12);
        }
    }

    #[test]
    fn product_basis_state_correlations() {
        let t = correlation_vector(&DensityMatrix::from_pure(&basis_state(4, 0))).unwrap();
        let z0 = lex_index(&PauliString::new(&[3, 0]).unwrap());
        let iz = lex_index(&PauliString::new(&[0, 3]).unwrap());
        let zz = lex_index(&PauliString::new(&[3, 3]).unwrap());
        for j in 0..16 {
            let want = if j == 0 || j == z0 || j == iz || j == zz {
                1.0
            } else {
                0.0
            };
            assert!((t.get(j) - want).abs() < 1e-12, "entry {j}");
        }
    }

    #[test]
    fn reconstruction_round_trip() {
        let rho = DensityMatrix::from_pure(&bell_state());
        let t = correlation_vector(&rho).unwrap();
        let rec = reconstruct_density(&t).unwrap();
        assert!(rec.physical);
        assert!(rec.matrix.max_abs_diff(rho.matrix()) < 1e-12);

        let trivial = CorrelationVector::new(2, {
            let mut v = vec![0.0; 16];
            v[0] = 1.0;
            v
        })
        .unwrap();
        let rec = reconstruct_density(&trivial).unwrap();
        assert!(
            rec.matrix
                .max_abs_diff(DensityMatrix::maximally_mixed(4).matrix())
                < 1e-15
        );
    }

    #[test]
    fn pure_state_purity_identity() {
        let t = correlation_vector(&DensityMatrix::from_pure(&bell_state())).unwrap();
        assert!((t.purity() - 1.0).abs() < 1e-12);
        let mixed = correlation_vector(&DensityMatrix::maximally_mixed(8)).unwrap();
        assert!((mixed.purity() - 0.125).abs() < 1e-12);
    }
}

