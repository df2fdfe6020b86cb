//! Witness-structured three-qubit mixed states.
//!
//! Building block: a depolarized state rho = (beta/8) I + (1-beta) P_psi
//! where psi has a prescribed squared overlap gamma with the witness
//! reference. Detected states need gamma > alpha and beta below
//! beta_max = (alpha - gamma)/(1/8 - gamma); anything else is undetected.
//! Dataset examples mix 2..=20 such states of the same region so the label
//! survives by convexity.

use rand::Rng;

use qcore::{orthonormal_complement, Complex64, DensityMatrix, PureState};
use witness::{detection_regime, DetectionRegime, WitnessSpec};

use crate::DatagenError;

const MAX_ATTEMPTS: usize = 1000;
const GS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapRegion {
    /// gamma > alpha
    Detected,
    /// gamma <= alpha
    Undetected,
}

/// Draws gamma with density proportional to (1-gamma)^(d-2) truncated to the
/// requested side of alpha — the overlap law of Haar-random directions,
/// inverted exactly on the truncation interval.
fn sample_gamma(d: usize, alpha: f64, region: CapRegion, rng: &mut impl Rng) -> f64 {
    let k = (d - 1) as f64;
    let cdf = |g: f64| 1.0 - (1.0 - g).powf(k);
    let inv = |u: f64| 1.0 - (1.0 - u).powf(1.0 / k);
    let (lo, hi) = match region {
        CapRegion::Detected => (cdf(alpha), 1.0),
        CapRegion::Undetected => (0.0, cdf(alpha)),
    };
    let u = rng.random_range(lo..hi);
    inv(u).clamp(0.0, 1.0)
}

/// Unit vector with a prescribed squared overlap against `phi`:
/// psi = a phi + sqrt(1-|a|^2) phi_perp with |a|^2 = gamma, the phase of a
/// uniform, and phi_perp Haar-random in the orthogonal complement (built by
/// Gram-Schmidt completion). Returns (psi, gamma).
pub fn sample_cap_state(
    phi: &PureState,
    alpha: f64,
    region: CapRegion,
    rng: &mut impl Rng,
) -> Result<(PureState, f64), DatagenError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(DatagenError::BadAlpha(alpha));
    }
    let complement = orthonormal_complement(phi, GS_TOL);
    Ok(sample_cap_state_with_basis(phi, &complement, alpha, region, rng))
}

/// Same as [`sample_cap_state`] against a precomputed complement basis
/// (callers generating many states avoid repeating the Gram-Schmidt pass).
pub(crate) fn sample_cap_state_with_basis(
    phi: &PureState,
    complement: &[PureState],
    alpha: f64,
    region: CapRegion,
    rng: &mut impl Rng,
) -> (PureState, f64) {
    let d = phi.dim();
    let gamma = sample_gamma(d, alpha, region, rng);
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    let a = Complex64::from_polar(gamma.sqrt(), theta);

    let mut coeffs: Vec<Complex64> = (0..complement.len())
        .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
        .collect();
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let ortho = (1.0 - gamma).sqrt() / norm;
    for c in &mut coeffs {
        *c *= ortho;
    }

    let mut amps: Vec<Complex64> = phi.amplitudes().iter().map(|x| x * a).collect();
    for (basis, c) in complement.iter().zip(&coeffs) {
        for (amp, b) in amps.iter_mut().zip(basis.amplitudes()) {
            *amp += b * c;
        }
    }
    let psi = PureState::normalized(amps).expect("unit norm by construction");
    (psi, gamma)
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.random_range(f64::EPSILON..=1.0);
    let v: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

/// One depolarized building block for the given witness and region.
/// Detected draws take beta uniformly below beta_max; undetected draws
/// split between the low-overlap branch (any beta) and the high-overlap,
/// over-mixed branch (beta above beta_max), keeping the same structure on
/// both sides of the dataset. Every block is verified against the witness
/// before being returned; undetected blocks must also evade `other`.
pub fn sample_rho_psi(
    w: &WitnessSpec,
    other: &WitnessSpec,
    region: CapRegion,
    rng: &mut impl Rng,
) -> Result<DensityMatrix, DatagenError> {
    let complement = orthonormal_complement(w.phi(), GS_TOL);
    sample_rho_psi_with_basis(w, other, &complement, region, rng)
}

pub(crate) fn sample_rho_psi_with_basis(
    w: &WitnessSpec,
    other: &WitnessSpec,
    complement: &[PureState],
    region: CapRegion,
    rng: &mut impl Rng,
) -> Result<DensityMatrix, DatagenError> {
    let alpha = w.alpha();
    for _ in 0..MAX_ATTEMPTS {
        let rho = match region {
            CapRegion::Detected => {
                let (psi, gamma) =
                    sample_cap_state_with_basis(w.phi(), complement, alpha, CapRegion::Detected, rng);
                let beta_max = match detection_regime(alpha, gamma) {
                    DetectionRegime::Conditional { beta_max } => beta_max,
                    // gamma > alpha by construction
                    _ => continue,
                };
                let beta = rng.random_range(0.0..beta_max);
                DensityMatrix::depolarized(&psi, beta)
            }
            CapRegion::Undetected => {
                if rng.random_bool(0.5) {
                    let (psi, _) = sample_cap_state_with_basis(
                        w.phi(),
                        complement,
                        alpha,
                        CapRegion::Undetected,
                        rng,
                    );
                    DensityMatrix::depolarized(&psi, rng.random_range(0.0..=1.0))
                } else {
                    let (psi, gamma) = sample_cap_state_with_basis(
                        w.phi(),
                        complement,
                        alpha,
                        CapRegion::Detected,
                        rng,
                    );
                    let beta_max = match detection_regime(alpha, gamma) {
                        DetectionRegime::Conditional { beta_max } => beta_max,
                        _ => continue,
                    };
                    DensityMatrix::depolarized(&psi, rng.random_range(beta_max..=1.0))
                }
            }
        };
        // construction guarantees these up to floating point; reject the
        // rare boundary case instead of mislabeling it
        let detected_here = w.detects(&rho)?;
        let detected_other = other.detects(&rho)?;
        match region {
            CapRegion::Detected if detected_here && !detected_other => return Ok(rho),
            CapRegion::Undetected if !detected_here && !detected_other => return Ok(rho),
            _ => continue,
        }
    }
    Err(DatagenError::ResampleExhausted(MAX_ATTEMPTS))
}

/// Dataset example: a random convex mixture of m in [2, 20] same-region
/// blocks (m uniform), with weights from normalized uniform draws. Detected
/// mixtures satisfy tr(W rho) < 0 by convexity; undetected mixtures evade
/// both witnesses the same way.
pub fn generate_3q_mixed(
    w: &WitnessSpec,
    other: &WitnessSpec,
    region: CapRegion,
    rng: &mut impl Rng,
) -> Result<DensityMatrix, DatagenError> {
    let complement = orthonormal_complement(w.phi(), GS_TOL);
    let m = rng.random_range(2..=20usize);
    let blocks: Vec<DensityMatrix> = (0..m)
        .map(|_| sample_rho_psi_with_basis(w, other, &complement, region, rng))
        .collect::<Result<_, _>>()?;
    let mut weights: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|p| *p /= total);
    let parts: Vec<(f64, &DensityMatrix)> = weights.iter().cloned().zip(blocks.iter()).collect();
    Ok(DensityMatrix::mixture(&parts)?)
}
