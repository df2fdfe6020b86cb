//! Monte-Carlo verification of witness redundancy and disjointness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use qcore::{orthonormal_complement, Complex64, DensityMatrix, PureState};

use crate::spec::WitnessSpec;
use crate::WitnessError;

/// Result of a sampled inclusion/exclusion check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub holds: bool,
    pub samples: usize,
    pub violations: usize,
    /// (gamma w.r.t. first witness, beta) of the first violating state.
    pub counterexample: Option<(f64, f64)>,
}

/// Depolarized state around a reference direction with a prescribed overlap.
/// gamma is drawn uniformly so every detection regime is exercised, and the
/// remainder of psi is Haar-distributed in the orthogonal complement.
fn sample_rho_psi_around(
    phi: &PureState,
    complement: &[PureState],
    rng: &mut impl Rng,
) -> (DensityMatrix, f64, f64) {
    let gamma: f64 = rng.random_range(0.0..1.0);
    let beta: f64 = rng.random_range(0.0..=1.0);
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let a = Complex64::from_polar(gamma.sqrt(), theta);

    // Haar direction in the complement: normalized complex Gaussian coefficients
    let mut coeffs: Vec<Complex64> = (0..complement.len())
        .map(|_| {
            Complex64::new(
                gaussian(rng),
                gaussian(rng),
            )
        })
        .collect();
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in &mut coeffs {
        *c /= norm;
    }

    let ortho_scale = (1.0 - gamma).sqrt();
    let mut amps: Vec<Complex64> = phi.amplitudes().iter().map(|x| x * a).collect();
    for (b, coeff) in complement.iter().zip(&coeffs) {
        for (amp, bi) in amps.iter_mut().zip(b.amplitudes()) {
            *amp += bi * coeff * ortho_scale;
        }
    }
    let psi = PureState::normalized(amps).expect("unit by construction");
    (DensityMatrix::depolarized(&psi, beta), gamma, beta)
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller; tails beyond f64 range are impossible for u in (0,1]
    let u: f64 = rng.random_range(f64::EPSILON..=1.0);
    let v: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

/// Verifies that every sampled depolarized state detected by `strong` is
/// also detected by `weak`. Both witnesses must share the reference state;
/// the weak one must have the smaller threshold.
pub fn check_redundancy(
    strong: &WitnessSpec,
    weak: &WitnessSpec,
    samples: usize,
    seed: u64,
) -> Result<CheckOutcome, WitnessError> {
    if (strong.phi().inner(weak.phi()).norm() - 1.0).abs() > 1e-12 {
        return Err(WitnessError::BadPair(
            "redundancy check needs a shared reference state".into(),
        ));
    }
    if weak.alpha() >= strong.alpha() {
        return Err(WitnessError::BadPair(format!(
            "weak alpha {} must be below strong alpha {}",
            weak.alpha(),
            strong.alpha()
        )));
    }
    let complement = orthonormal_complement(strong.phi(), 1e-8);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    let mut counterexample = None;
    for _ in 0..samples {
        let (rho, gamma, beta) = sample_rho_psi_around(strong.phi(), &complement, &mut rng);
        if strong.detects(&rho)? && !weak.detects(&rho)? {
            violations += 1;
            counterexample.get_or_insert((gamma, beta));
        }
    }
    Ok(CheckOutcome {
        holds: violations == 0,
        samples,
        violations,
        counterexample,
    })
}

/// Verifies that no sampled depolarized state is detected by both witnesses.
/// Preconditions checked programmatically: orthogonal reference states and
/// alpha + alpha' >= 1.
pub fn check_disjointness(
    w1: &WitnessSpec,
    w2: &WitnessSpec,
    samples: usize,
    seed: u64,
) -> Result<CheckOutcome, WitnessError> {
    let overlap = w1.phi().inner(w2.phi()).norm_sqr();
    if overlap > 1e-12 {
        return Err(WitnessError::BadPair(format!(
            "reference states not orthogonal (|<phi|phi'>|^2 = {overlap:.3e})"
        )));
    }
    if w1.alpha() + w2.alpha() < 1.0 {
        return Err(WitnessError::BadPair(format!(
            "alpha sum {} below 1",
            w1.alpha() + w2.alpha()
        )));
    }
    let comp1 = orthonormal_complement(w1.phi(), 1e-8);
    let comp2 = orthonormal_complement(w2.phi(), 1e-8);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    let mut counterexample = None;
    for i in 0..samples {
        // alternate the anchor so both detection regions are stressed
        let (rho, gamma, beta) = if i % 2 == 0 {
            sample_rho_psi_around(w1.phi(), &comp1, &mut rng)
        } else {
            sample_rho_psi_around(w2.phi(), &comp2, &mut rng)
        };
        if w1.detects(&rho)? && w2.detects(&rho)? {
            violations += 1;
            counterexample.get_or_insert((gamma, beta));
        }
    }
    Ok(CheckOutcome {
        holds: violations == 0,
        samples,
        violations,
        counterexample,
    })
}
