//! Witness operators and their detection behavior on depolarized states.

use qcore::{ghz_state, w_state, DensityMatrix, PureState};

use crate::WitnessError;

/// Which canonical reference state a tabulated decomposition refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReferenceState {
    Ghz,
    W,
}

impl ReferenceState {
    pub fn state(self) -> PureState {
        match self {
            ReferenceState::Ghz => ghz_state(),
            ReferenceState::W => w_state(),
        }
    }
}

/// W = alpha * I - |phi><phi|. A state rho is detected when
/// tr(W rho) = alpha - <phi|rho|phi> is strictly negative.
#[derive(Debug, Clone)]
pub struct WitnessSpec {
    alpha: f64,
    phi: PureState,
}

impl WitnessSpec {
    pub fn new(alpha: f64, phi: PureState) -> Result<Self, WitnessError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(WitnessError::BadAlpha(alpha));
        }
        Ok(Self { alpha, phi })
    }

    /// (1/2, GHZ) — the stronger of the two GHZ witnesses.
    pub fn ghz_half() -> Self {
        Self {
            alpha: 0.5,
            phi: ghz_state(),
        }
    }

    /// (3/4, GHZ) — detects a strict subset of what (1/2, GHZ) detects.
    pub fn ghz_three_quarters() -> Self {
        Self {
            alpha: 0.75,
            phi: ghz_state(),
        }
    }

    /// (2/3, W)
    pub fn w_two_thirds() -> Self {
        Self {
            alpha: 2.0 / 3.0,
            phi: w_state(),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn phi(&self) -> &PureState {
        &self.phi
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    /// Strict-inequality detection; tr(W rho) = 0 exactly counts as not
    /// detected.
    pub fn detects(&self, rho: &DensityMatrix) -> Result<bool, WitnessError> {
        Ok(witness_value(self, rho)? < 0.0)
    }
}

/// tr(W rho) = alpha - <phi|rho|phi>.
pub fn witness_value(w: &WitnessSpec, rho: &DensityMatrix) -> Result<f64, WitnessError> {
    if rho.dim() != w.dim() {
        return Err(WitnessError::DimMismatch {
            expected: w.dim(),
            got: rho.dim(),
        });
    }
    Ok(w.alpha - rho.overlap(w.phi())?)
}

/// How a witness with threshold `alpha` treats the depolarized family
/// rho = (beta/8) I + (1-beta) |psi><psi| at overlap gamma = |<phi|psi>|^2.
///
/// The three regimes assume alpha > 1/8, which holds for every witness used
/// here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetectionRegime {
    /// gamma <= 1/8: no beta is detected.
    NeverLowOverlap,
    /// 1/8 < gamma <= alpha: no beta is detected.
    NeverSubAlpha,
    /// gamma > alpha: detected exactly for beta < beta_max; at
    /// beta = beta_max the trace is zero, which is classified not-detected.
    Conditional { beta_max: f64 },
}

impl DetectionRegime {
    pub fn beta_max(&self) -> Option<f64> {
        match self {
            DetectionRegime::Conditional { beta_max } => Some(*beta_max),
            _ => None,
        }
    }
}

/// Classifies (alpha, gamma) into the detection regimes above, with
/// beta_max = (alpha - gamma) / (1/8 - gamma) in the conditional case.
pub fn detection_regime(alpha: f64, gamma: f64) -> DetectionRegime {
    if gamma <= 0.125 {
        DetectionRegime::NeverLowOverlap
    } else if gamma <= alpha {
        DetectionRegime::NeverSubAlpha
    } else {
        DetectionRegime::Conditional {
            beta_max: (alpha - gamma) / (0.125 - gamma),
        }
    }
}
