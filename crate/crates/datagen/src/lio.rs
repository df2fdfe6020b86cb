//! Pure-state sampling by random local invertible operators applied to
//! class representatives.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use qcore::{
    basis_state, bell_state, ghz_state, single_qubit_purity, w_state, Complex64, ComplexMatrix,
    PureState,
};

use crate::config::{ElementDist, Scenario, SloccClass};
use crate::DatagenError;

const MAX_ATTEMPTS: usize = 100;
const DET_FLOOR: f64 = 1e-12;
/// States this close to a class boundary are resampled to keep construction
/// labels trustworthy.
const PURITY_MARGIN: f64 = 1e-9;

/// Random invertible 2x2 operator. Normal elements follow the standard
/// complex Ginibre ensemble (variance 1/2 per real component); uniform
/// elements lie in [-1, 1] per component. Singular draws are rejected.
pub fn sample_lio(dist: ElementDist, rng: &mut impl Rng) -> Result<ComplexMatrix, DatagenError> {
    let normal = Normal::new(0.0, (0.5f64).sqrt()).expect("valid sigma");
    for _ in 0..MAX_ATTEMPTS {
        let mut entries = [Complex64::new(0.0, 0.0); 4];
        for e in &mut entries {
            *e = match dist {
                ElementDist::Normal => Complex64::new(normal.sample(rng), normal.sample(rng)),
                ElementDist::Uniform => Complex64::new(
                    rng.random_range(-1.0..=1.0),
                    rng.random_range(-1.0..=1.0),
                ),
            };
        }
        let det = entries[0] * entries[3] - entries[1] * entries[2];
        if det.norm() > DET_FLOOR {
            return Ok(ComplexMatrix::from_rows(2, 2, &entries).expect("2x2"));
        }
    }
    Err(DatagenError::ResampleExhausted(MAX_ATTEMPTS))
}

/// Canonical representative of a pure-state class.
pub fn pure_class_representative(class: &SloccClass) -> Result<PureState, DatagenError> {
    match class.scenario {
        Scenario::TwoQubitPure => Ok(match class.index {
            0 => basis_state(4, 0),
            1 => bell_state(),
            i => return Err(DatagenError::BadClass {
                scenario: class.scenario,
                index: i,
            }),
        }),
        Scenario::ThreeQubitPure => Ok(match class.index {
            0 => basis_state(8, 0),
            // biseparable: Bell pair on the named qubits, |0> on the third
            1 => bell_times_zero([0, 1]),
            2 => bell_times_zero([0, 2]),
            3 => bell_times_zero([1, 2]),
            4 => w_state(),
            5 => ghz_state(),
            i => return Err(DatagenError::BadClass {
                scenario: class.scenario,
                index: i,
            }),
        }),
        s => Err(DatagenError::BadConfig(format!(
            "no pure representative for scenario {s:?}"
        ))),
    }
}

/// (|0 0> + |1 1>)/sqrt(2) on `pair` (0-based qubit positions), |0> elsewhere.
fn bell_times_zero(pair: [usize; 2]) -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0] = Complex64::new(s, 0.0);
    let hi = 1usize << (2 - pair[0]);
    let lo = 1usize << (2 - pair[1]);
    amps[hi | lo] = Complex64::new(s, 0.0);
    PureState::new(amps).expect("normalized")
}

fn apply_single_qubit_op(amps: &mut [Complex64], num_qubits: usize, qubit: usize, op: &ComplexMatrix) {
    let shift = num_qubits - 1 - qubit;
    let bit = 1usize << shift;
    for i in 0..amps.len() {
        if i & bit == 0 {
            let a0 = amps[i];
            let a1 = amps[i | bit];
            amps[i] = op.get(0, 0) * a0 + op.get(0, 1) * a1;
            amps[i | bit] = op.get(1, 0) * a0 + op.get(1, 1) * a1;
        }
    }
}

/// Applies independent random local invertible operators to the class
/// representative and renormalizes. The result provably stays in the class;
/// numerically boundary states (single-qubit purities within 1e-9 of the
/// wrong side) are resampled.
pub fn generate_pure_state(
    class: &SloccClass,
    dist: ElementDist,
    rng: &mut impl Rng,
) -> Result<PureState, DatagenError> {
    let rep = pure_class_representative(class)?;
    let n = rep.num_qubits().expect("power-of-two representative");
    for _ in 0..MAX_ATTEMPTS {
        let mut amps = rep.amplitudes().to_vec();
        for q in 0..n {
            let op = sample_lio(dist, rng)?;
            apply_single_qubit_op(&mut amps, n, q, &op);
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        let inv = 1.0 / norm;
        let psi = PureState::new(amps.into_iter().map(|a| a * inv).collect())
            .expect("just normalized");
        if class_label_is_clear(class, &psi)? {
            return Ok(psi);
        }
    }
    Err(DatagenError::ResampleExhausted(MAX_ATTEMPTS))
}

/// Construction keeps the SLOCC class; this check only filters states so
/// close to a boundary that floating point could blur the label.
fn class_label_is_clear(class: &SloccClass, psi: &PureState) -> Result<bool, DatagenError> {
    let pure = |p: f64| p >= 1.0 - PURITY_MARGIN;
    let mixed = |p: f64| p <= 1.0 - PURITY_MARGIN;
    Ok(match (class.scenario, class.index) {
        (Scenario::TwoQubitPure, 0) => pure(single_qubit_purity(psi, 0)?),
        (Scenario::TwoQubitPure, 1) => mixed(single_qubit_purity(psi, 0)?),
        (Scenario::ThreeQubitPure, 0) => (0..3)
            .map(|q| single_qubit_purity(psi, q))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .all(pure),
        (Scenario::ThreeQubitPure, i @ 1..=3) => {
            let spectator = match i {
                1 => 2,
                2 => 1,
                _ => 0,
            };
            (0..3).try_fold(true, |ok, q| -> Result<bool, DatagenError> {
                let p = single_qubit_purity(psi, q)?;
                Ok(ok && if q == spectator { pure(p) } else { mixed(p) })
            })?
        }
        (Scenario::ThreeQubitPure, 4 | 5) => (0..3)
            .map(|q| single_qubit_purity(psi, q))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .all(mixed),
        _ => true,
    })
}
