//! Two-qubit mixed states from X X^dagger / tr(X X^dagger) and their PPT
//! labels.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use qcore::{is_ppt, Complex64, ComplexMatrix, DensityMatrix};

use crate::config::{ElementDist, Scenario, SloccClass};
use crate::DatagenError;

/// Random full-rank two-qubit density matrix. Normal entries (unit variance
/// per real component) give the Ginibre construction whose induced measure
/// is Hilbert-Schmidt at square X; uniform entries in [-1, 1] are the
/// alternative ensemble.
pub fn sample_density_2q(
    dist: ElementDist,
    rng: &mut impl Rng,
) -> Result<DensityMatrix, DatagenError> {
    let normal = Normal::new(0.0, 1.0).expect("valid sigma");
    let mut entries = [Complex64::new(0.0, 0.0); 16];
    for e in &mut entries {
        *e = match dist {
            ElementDist::Normal => Complex64::new(normal.sample(rng), normal.sample(rng)),
            ElementDist::Uniform => Complex64::new(
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
            ),
        };
    }
    let x = ComplexMatrix::from_rows(4, 4, &entries).expect("4x4");
    let xx = x.matmul(&x.adjoint());
    let tr = xx.trace().re;
    if tr <= 0.0 {
        // all-zero draw has probability zero; treat as a failed sample
        return Err(DatagenError::ResampleExhausted(1));
    }
    let rho = xx.scale(Complex64::new(1.0 / tr, 0.0));
    Ok(DensityMatrix::new(rho)?)
}

/// PPT labeling: class 0 (separable) iff the partial transpose is positive
/// semidefinite announced by the eigenvalue test; for two qubits this is
/// exact.
pub fn label_2q_mixed(rho: &DensityMatrix) -> Result<SloccClass, DatagenError> {
    let index = if is_ppt(rho)? { 0 } else { 1 };
    Ok(SloccClass::new(Scenario::TwoQubitMixed, index)?)
}
