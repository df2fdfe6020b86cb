//! Pure states, density matrices, and the separability primitives built on
//! them (partial transpose, PPT test, reduced purities).

use crate::eigen::hermitian_eigenvalues;
use crate::{Complex64, ComplexMatrix, QcoreError, HERM_TOL, PSD_TOL};

/// Normalized pure state on C^d. For qubit systems d is a power of two with
/// qubit 1 on the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    /// Validates normalization within 1e-12.
    pub fn new(amps: Vec<Complex64>) -> Result<Self, QcoreError> {
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-12 {
            return Err(QcoreError::NotNormalized((norm_sqr - 1.0).abs()));
        }
        Ok(Self { amps })
    }

    /// Normalizes the given amplitudes; errors on (near-)zero vectors.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self, QcoreError> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(QcoreError::NotNormalized(1.0));
        }
        let inv = 1.0 / norm;
        Ok(Self {
            amps: amps.into_iter().map(|a| a * inv).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn num_qubits(&self) -> Option<usize> {
        let d = self.dim();
        (d.is_power_of_two()).then(|| d.trailing_zeros() as usize)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// <self|other>
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |self><self|
    pub fn projector(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                m.set(r, c, self.amps[r] * self.amps[c].conj());
            }
        }
        m
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        PureState { amps }
    }
}

/// Computational basis state |index> on C^dim.
pub fn basis_state(dim: usize, index: usize) -> PureState {
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[index] = Complex64::new(1.0, 0.0);
    PureState { amps }
}

/// (|00> + |11>)/sqrt(2)
pub fn bell_state() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![Complex64::new(0.0, 0.0); 4];
    amps[0] = Complex64::new(s, 0.0);
    amps[3] = Complex64::new(s, 0.0);
    PureState { amps }
}

/// (|000> + |111>)/sqrt(2)
pub fn ghz_state() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0] = Complex64::new(s, 0.0);
    amps[7] = Complex64::new(s, 0.0);
    PureState { amps }
}

/// (|001> + |010> + |100>)/sqrt(3)
pub fn w_state() -> PureState {
    let s = 1.0 / 3f64.sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[1] = Complex64::new(s, 0.0);
    amps[2] = Complex64::new(s, 0.0);
    amps[4] = Complex64::new(s, 0.0);
    PureState { amps }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Full validation: Hermitian within 1e-12, unit trace within 1e-12,
    /// eigenvalues >= -1e-10.
    pub fn new(mat: ComplexMatrix) -> Result<Self, QcoreError> {
        if mat.rows() != mat.cols() {
            return Err(QcoreError::InvalidDensityMatrix(format!(
                "{}x{} is not square",
                mat.rows(),
                mat.cols()
            )));
        }
        if !mat.is_hermitian(HERM_TOL) {
            return Err(QcoreError::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {:.3e})",
                mat.hermiticity_deviation()
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > HERM_TOL || tr.im.abs() > HERM_TOL {
            return Err(QcoreError::InvalidDensityMatrix(format!(
                "trace {} is not 1",
                tr
            )));
        }
        let eigs = hermitian_eigenvalues(&mat, 1e-9)?;
        if eigs[0] < -PSD_TOL {
            return Err(QcoreError::InvalidDensityMatrix(format!(
                "negative eigenvalue {:.3e}",
                eigs[0]
            )));
        }
        Ok(Self {
            dim: mat.rows(),
            mat,
        })
    }

    /// Skips the eigenvalue check; for operators that are PSD by
    /// construction (projectors, convex mixtures of valid states).
    pub fn new_psd_by_construction(mat: ComplexMatrix) -> Result<Self, QcoreError> {
        if mat.rows() != mat.cols() || !mat.is_hermitian(HERM_TOL) {
            return Err(QcoreError::InvalidDensityMatrix("not Hermitian".into()));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > HERM_TOL || tr.im.abs() > HERM_TOL {
            return Err(QcoreError::InvalidDensityMatrix(format!(
                "trace {} is not 1",
                tr
            )));
        }
        Ok(Self {
            dim: mat.rows(),
            mat,
        })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            dim: psi.dim(),
            mat: psi.projector(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let mat = ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0));
        Self { dim, mat }
    }

    /// (beta/d) I + (1-beta) |psi><psi|
    pub fn depolarized(psi: &PureState, beta: f64) -> Self {
        let d = psi.dim();
        let white = ComplexMatrix::identity(d).scale(Complex64::new(beta / d as f64, 0.0));
        let mat = white.add(&psi.projector().scale(Complex64::new(1.0 - beta, 0.0)));
        Self { dim: d, mat }
    }

    /// Convex mixture; weights must sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self, QcoreError> {
        let dim = parts
            .first()
            .ok_or_else(|| QcoreError::InvalidDensityMatrix("empty mixture".into()))?
            .1
            .dim;
        let mut mat = ComplexMatrix::zeros(dim, dim);
        for (w, rho) in parts {
            mat = mat.add(&rho.mat.scale(Complex64::new(*w, 0.0)));
        }
        Self::new_psd_by_construction(mat)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qubits(&self) -> Option<usize> {
        self.dim
            .is_power_of_two()
            .then(|| self.dim.trailing_zeros() as usize)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn purity(&self) -> f64 {
        let d = self.dim;
        let mut s = 0.0;
        for r in 0..d {
            for c in 0..d {
                s += (self.mat.get(r, c) * self.mat.get(c, r)).re;
            }
        }
        s
    }

    /// <phi|rho|phi>
    pub fn overlap(&self, phi: &PureState) -> Result<f64, QcoreError> {
        if phi.dim() != self.dim {
            return Err(QcoreError::BadDimensions(format!(
                "state dim {} vs operator dim {}",
                phi.dim(),
                self.dim
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..self.dim {
            let mut row = Complex64::new(0.0, 0.0);
            for c in 0..self.dim {
                row += self.mat.get(r, c) * phi.amplitudes()[c];
            }
            acc += phi.amplitudes()[r].conj() * row;
        }
        Ok(acc.re)
    }
}

/// Partial transpose of a two-qubit state; `subsystem` selects the qubit
/// being transposed (0 = first). Trace and Hermiticity are preserved.
pub fn partial_transpose(
    rho: &DensityMatrix,
    subsystem: usize,
) -> Result<ComplexMatrix, QcoreError> {
    if rho.dim() != 4 {
        return Err(QcoreError::BadDimensions(format!(
            "partial transpose needs a two-qubit state, got dim {}",
            rho.dim()
        )));
    }
    if subsystem > 1 {
        return Err(QcoreError::BadSubsystem {
            index: subsystem,
            qubits: 2,
        });
    }
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(4, 4);
    for a1 in 0..2usize {
        for a2 in 0..2usize {
            for b1 in 0..2usize {
                for b2 in 0..2usize {
                    let (r, c) = (2 * a1 + a2, 2 * b1 + b2);
                    // swap the chosen qubit's row/col bits
                    let (sr, sc) = if subsystem == 0 {
                        (2 * b1 + a2, 2 * a1 + b2)
                    } else {
                        (2 * a1 + b2, 2 * b1 + a2)
                    };
                    out.set(r, c, m.get(sr, sc));
                }
            }
        }
    }
    Ok(out)
}

/// PPT separability test for two qubits: true iff the partial transpose has
/// no eigenvalue below -1e-10. For two qubits PPT is equivalent to
/// separability.
pub fn is_ppt(rho: &DensityMatrix) -> Result<bool, QcoreError> {
    let pt = partial_transpose(rho, 1)?;
    let eigs = hermitian_eigenvalues(&pt, 1e-9)?;
    Ok(eigs[0] >= -PSD_TOL)
}

/// tr(rho_keep^2) of the reduced single-qubit state of a two-qubit pure
/// state; lies in [1/2, 1] and equals 1 exactly for product states.
pub fn reduced_purity(psi: &PureState, keep: usize) -> Result<f64, QcoreError> {
    if psi.dim() != 4 {
        return Err(QcoreError::BadDimensions(format!(
            "reduced purity needs a two-qubit pure state, got dim {}",
            psi.dim()
        )));
    }
    single_qubit_purity(psi, keep)
}

/// tr(rho_q^2) for one qubit of an N-qubit pure state (N <= 3).
pub fn single_qubit_purity(psi: &PureState, qubit: usize) -> Result<f64, QcoreError> {
    let n = psi
        .num_qubits()
        .ok_or_else(|| QcoreError::BadDimensions(format!("dim {} is not 2^N", psi.dim())))?;
    if qubit >= n {
        return Err(QcoreError::BadSubsystem {
            index: qubit,
            qubits: n,
        });
    }
    let shift = n - 1 - qubit;
    let amps = psi.amplitudes();
    let mut red = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, ai) in amps.iter().enumerate() {
        let a = (i >> shift) & 1;
        let rest_i = i & !(1 << shift);
        for b in 0..2usize {
            let j = rest_i | (b << shift);
            red[a][b] += ai * amps[j].conj();
        }
    }
    let mut purity = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            purity += (red[a][b] * red[b][a]).re;
        }
    }
    Ok(purity)
}

/// Orthonormal basis of the orthogonal complement of `phi`, built by
/// Gram-Schmidt over the canonical basis. Directions whose residual norm
/// falls below `tol` after projection are skipped.
pub fn orthonormal_complement(phi: &PureState, tol: f64) -> Vec<PureState> {
    let d = phi.dim();
    let mut basis: Vec<Vec<Complex64>> = vec![phi.amplitudes().to_vec()];
    let mut out = Vec::with_capacity(d - 1);
    for k in 0..d {
        if basis.len() == d {
            break;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[k] = Complex64::new(1.0, 0.0);
        for b in &basis {
            let overlap: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= overlap * bi;
            }
        }
        let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < tol {
            continue;
        }
        let inv = 1.0 / norm;
        let unit: Vec<Complex64> = v.into_iter().map(|x| x * inv).collect();
        basis.push(unit.clone());
        out.push(PureState { amps: unit });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximally_mixed_is_ppt_invariant() {
        let rho = DensityMatrix::maximally_mixed(4);
        let pt = partial_transpose(&rho, 1).unwrap();
        assert!(pt.max_abs_diff(rho.matrix()) < 1e-15);
        assert!(is_ppt(&rho).unwrap());
    }

    #[test]
    fn bell_projector_partial_transpose_spectrum() {
        let rho = DensityMatrix::from_pure(&bell_state());
        let pt = partial_transpose(&rho, 1).unwrap();
        let eigs = hermitian_eigenvalues(&pt, 1e-12).unwrap();
        for (got, want) in eigs.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        }
        assert!(!is_ppt(&rho).unwrap());
        // trace preserved
        assert!((pt.trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn partial_transpose_is_involution_both_subsystems() {
        let rho = DensityMatrix::from_pure(&bell_state());
        for sub in 0..2 {
            let once = partial_transpose(&rho, sub).unwrap();
            let rho_pt = DensityMatrix {
                dim: 4,
                mat: once.clone(),
            };
            let twice = partial_transpose(&rho_pt, sub).unwrap();
            assert_eq!(twice, rho.matrix().clone());
        }
    }

    #[test]
    fn reduced_purity_cases() {
        assert!((reduced_purity(&basis_state(4, 0), 0).unwrap() - 1.0).abs() < 1e-14);
        assert!((reduced_purity(&bell_state(), 0).unwrap() - 0.5).abs() < 1e-14);
        assert!((reduced_purity(&bell_state(), 1).unwrap() - 0.5).abs() < 1e-14);
        // (2|00> + |11>)/sqrt(5): Schmidt weights 4/5 and 1/5
        let amps = vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let psi = PureState::normalized(amps).unwrap();
        assert!((reduced_purity(&psi, 0).unwrap() - 17.0 / 25.0).abs() < 1e-12);
    }

    #[test]
    fn ghz_and_w_single_qubit_purities() {
        for q in 0..3 {
            assert!((single_qubit_purity(&ghz_state(), q).unwrap() - 0.5).abs() < 1e-12);
            // W marginals are diag(2/3, 1/3): purity 5/9
            assert!((single_qubit_purity(&w_state(), q).unwrap() - 5.0 / 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn complement_basis_is_orthonormal() {
        let phi = w_state();
        let basis = orthonormal_complement(&phi, 1e-8);
        assert_eq!(basis.len(), 7);
        for (i, b) in basis.iter().enumerate() {
            assert!(phi.inner(b).norm() < 1e-12);
            for other in &basis[i + 1..] {
                assert!(b.inner(other).norm() < 1e-12);
            }
            assert!((b.inner(b).re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn density_matrix_rejects_garbage() {
        let c = Complex64::new;
        let not_herm =
            ComplexMatrix::from_rows(2, 2, &[c(0.5, 0.0), c(0.4, 0.0), c(0.0, 0.0), c(0.5, 0.0)])
                .unwrap();
        assert!(DensityMatrix::new(not_herm).is_err());
        let not_psd = ComplexMatrix::from_real(2, 2, &[1.5, 0.0, 0.0, -0.5]).unwrap();
        assert!(DensityMatrix::new(not_psd).is_err());
        let bad_trace = ComplexMatrix::identity(2);
        assert!(DensityMatrix::new(bad_trace).is_err());
    }
}
