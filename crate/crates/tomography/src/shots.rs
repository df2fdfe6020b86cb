//! Finite-shot estimation of correlation vectors.
//!
//! Every non-identity Pauli string on qubits has spectrum {-1, +1}, so the
//! per-setting outcome distribution is fully described by P(+1) = (1+T)/2.
//! Sampling that two-outcome law is exact for expectation estimation and
//! avoids an eigendecomposition per setting.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};

use qcore::DensityMatrix;

use crate::corr::{correlation_vector, CorrelationVector};
use crate::TomographyError;

/// Shot budget per measurement setting plus the RNG seed for the draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotConfig {
    pub shots_per_setting: u64,
    pub seed: u64,
}

impl ShotConfig {
    pub fn new(shots_per_setting: u64, seed: u64) -> Result<Self, TomographyError> {
        if shots_per_setting == 0 {
            return Err(TomographyError::ZeroShots);
        }
        Ok(Self {
            shots_per_setting,
            seed,
        })
    }
}

/// Correlation vector estimated from M shots per non-identity setting:
/// the sample mean of M outcomes in {-1, +1}. The identity entry stays
/// exactly 1. Bit-reproducible for a fixed seed; standard error <= 1/sqrt(M).
pub fn finite_shot_correlation(
    rho: &DensityMatrix,
    cfg: &ShotConfig,
) -> Result<CorrelationVector, TomographyError> {
    if cfg.shots_per_setting == 0 {
        return Err(TomographyError::ZeroShots);
    }
    let ideal = correlation_vector(rho)?;
    Ok(perturb_with_shots(&ideal, cfg))
}

/// Shot-noise resampling of an already computed ideal vector.
pub fn perturb_with_shots(ideal: &CorrelationVector, cfg: &ShotConfig) -> CorrelationVector {
    let m = cfg.shots_per_setting;
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut values = Vec::with_capacity(ideal.len());
    values.push(1.0);
    for &t in &ideal.values()[1..] {
        let p = ((1.0 + t) / 2.0).clamp(0.0, 1.0);
        let plus = Binomial::new(m, p).expect("p in [0,1]").sample(&mut rng);
        values.push((2.0 * plus as f64 - m as f64) / m as f64);
    }
    CorrelationVector::new(ideal.num_qubits(), values).expect("sample means stay in [-1, 1]")
}
