//! Analytic detection boundaries for relative-phase families of the
//! canonical GHZ and W states.

use qcore::{Complex64, PureState};

/// A point in one of the two phase families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhasePoint {
    /// (|000> + e^{i theta} |111>)/sqrt(2) against the (1/2, GHZ) witness.
    Ghz { theta: f64 },
    /// (|001> + e^{i theta1} |010> + e^{i theta2} |100>)/sqrt(3) against the
    /// (2/3, W) witness.
    W { theta1: f64, theta2: f64 },
}

/// GHZ state with a relative phase on |111>.
pub fn ghz_phase_state(theta: f64) -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0] = Complex64::new(s, 0.0);
    amps[7] = Complex64::from_polar(s, theta);
    PureState::new(amps).expect("normalized")
}

/// W state with relative phases on |010> and |100>.
pub fn w_phase_state(theta1: f64, theta2: f64) -> PureState {
    let s = 1.0 / 3f64.sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[1] = Complex64::new(s, 0.0);
    amps[2] = Complex64::from_polar(s, theta1);
    amps[4] = Complex64::from_polar(s, theta2);
    PureState::new(amps).expect("normalized")
}

/// Whether the pure phase state (beta = 0) is detected by its family's
/// witness. GHZ at alpha = 1/2: cos(theta) > 0, i.e. theta in (-pi/2, pi/2).
/// W at alpha = 2/3: cos(t1) + cos(t2) + cos(t1 - t2) > 3/2. Both are strict;
/// margins within 1e-12 of zero count as boundary points and are classified
/// not detected (cos of the representable pi/2 is ~6e-17, not exactly zero).
pub fn phase_boundary(p: PhasePoint) -> bool {
    let margin = match p {
        PhasePoint::Ghz { theta } => theta.cos(),
        PhasePoint::W { theta1, theta2 } => {
            theta1.cos() + theta2.cos() + (theta1 - theta2).cos() - 1.5
        }
    };
    margin > 1e-12
}
