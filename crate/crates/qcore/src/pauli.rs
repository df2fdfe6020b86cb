//! Pauli strings and their matrix representations.

use crate::{Complex64, ComplexMatrix, QcoreError};

/// Multi-qubit Pauli string. Index 0 is the identity, 1..=3 are X, Y, Z.
/// Qubit 1 comes first and is the most significant tensor factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    indices: Vec<u8>,
}

impl PauliString {
    pub fn new(indices: &[u8]) -> Result<Self, QcoreError> {
        if indices.is_empty() || indices.len() > 3 {
            return Err(QcoreError::BadQubitCount(indices.len()));
        }
        for &i in indices {
            if i > 3 {
                return Err(QcoreError::BadPauliIndex { index: i as usize });
            }
        }
        Ok(Self {
            indices: indices.to_vec(),
        })
    }

    pub fn indices(&self) -> &[u8] {
        &self.indices
    }

    pub fn num_qubits(&self) -> usize {
        self.indices.len()
    }

    pub fn is_identity(&self) -> bool {
        self.indices.iter().all(|&i| i == 0)
    }

    /// Renders like "IX", "ZZ", "XYZ".
    pub fn label(&self) -> String {
        self.indices
            .iter()
            .map(|&i| ['I', 'X', 'Y', 'Z'][i as usize])
            .collect()
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

/// Single-qubit Pauli matrix entries as (col, value) per row; every Pauli has
/// exactly one nonzero entry per row.
const SINGLE_SPARSE: [[(usize, Complex64); 2]; 4] = [
    // identity
    [
        (0, Complex64::new(1.0, 0.0)),
        (1, Complex64::new(1.0, 0.0)),
    ],
    // X
    [
        (1, Complex64::new(1.0, 0.0)),
        (0, Complex64::new(1.0, 0.0)),
    ],
    // Y
    [
        (1, Complex64::new(0.0, -1.0)),
        (0, Complex64::new(0.0, 1.0)),
    ],
    // Z
    [
        (0, Complex64::new(1.0, 0.0)),
        (1, Complex64::new(-1.0, 0.0)),
    ],
];

/// Sparse form of a Pauli string: one nonzero per row.
#[derive(Debug, Clone)]
pub struct SparsePauli {
    /// col[r] is the column of the single nonzero entry in row r.
    pub cols: Vec<usize>,
    /// val[r] is that entry.
    pub vals: Vec<Complex64>,
}

impl SparsePauli {
    pub fn from_string(s: &PauliString) -> Self {
        let n = s.num_qubits();
        let dim = 1usize << n;
        let mut cols = Vec::with_capacity(dim);
        let mut vals = Vec::with_capacity(dim);
        for row in 0..dim {
            let mut col = 0usize;
            let mut val = Complex64::new(1.0, 0.0);
            for (q, &p) in s.indices().iter().enumerate() {
                // qubit 1 occupies the most significant bit
                let bit = (row >> (n - 1 - q)) & 1;
                let (c, v) = SINGLE_SPARSE[p as usize][bit];
                col = (col << 1) | c;
                val *= v;
            }
            cols.push(col);
            vals.push(val);
        }
        Self { cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    /// tr(P * m) using the single-nonzero-per-row structure.
    pub fn trace_with(&self, m: &ComplexMatrix) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, (&c, &v)) in self.cols.iter().zip(&self.vals).enumerate() {
            acc += v * m.get(c, r);
        }
        acc
    }
}

/// Dense tensor-product matrix of a Pauli string. Hermitian and squares to
/// the identity.
pub fn pauli_matrix(s: &PauliString) -> ComplexMatrix {
    let sparse = SparsePauli::from_string(s);
    let dim = sparse.dim();
    let mut m = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        m.set(r, sparse.cols[r], sparse.vals[r]);
    }
    m
}
