//! Scenario, class-index convention, and generation configuration.

use serde::{Deserialize, Serialize};

use crate::DatagenError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "2q-pure")]
    TwoQubitPure,
    #[serde(rename = "3q-pure")]
    ThreeQubitPure,
    #[serde(rename = "2q-mixed")]
    TwoQubitMixed,
    #[serde(rename = "3q-mixed")]
    ThreeQubitMixed,
}

impl Scenario {
    pub fn num_qubits(self) -> usize {
        match self {
            Scenario::TwoQubitPure | Scenario::TwoQubitMixed => 2,
            Scenario::ThreeQubitPure | Scenario::ThreeQubitMixed => 3,
        }
    }

    pub fn feature_dim(self) -> usize {
        4usize.pow(self.num_qubits() as u32)
    }

    /// Class count: two-qubit scenarios and three-qubit mixed are binary;
    /// three-qubit pure has the six SLOCC classes.
    pub fn num_classes(self) -> usize {
        match self {
            Scenario::ThreeQubitPure => 6,
            _ => 2,
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Scenario::TwoQubitPure => "2q-pure",
            Scenario::ThreeQubitPure => "3q-pure",
            Scenario::TwoQubitMixed => "2q-mixed",
            Scenario::ThreeQubitMixed => "3q-mixed",
        }
    }

    pub fn parse(s: &str) -> Result<Self, DatagenError> {
        match s {
            "2q-pure" => Ok(Scenario::TwoQubitPure),
            "3q-pure" => Ok(Scenario::ThreeQubitPure),
            "2q-mixed" => Ok(Scenario::TwoQubitMixed),
            "3q-mixed" => Ok(Scenario::ThreeQubitMixed),
            other => Err(DatagenError::BadConfig(format!("unknown scenario '{other}'"))),
        }
    }
}

/// Class label within a scenario.
///
/// Index convention: two-qubit (pure or mixed) — 0 separable, 1 entangled;
/// three-qubit pure — 0 fully separable, 1/2/3 biseparable with the
/// entangled pair (1,2)/(1,3)/(2,3), 4 W, 5 GHZ; three-qubit mixed —
/// 0 not detected, 1 witness-detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SloccClass {
    pub scenario: Scenario,
    pub index: usize,
}

impl SloccClass {
    pub fn new(scenario: Scenario, index: usize) -> Result<Self, DatagenError> {
        if index >= scenario.num_classes() {
            return Err(DatagenError::BadClass { scenario, index });
        }
        Ok(Self { scenario, index })
    }

    pub fn name(&self) -> &'static str {
        match (self.scenario, self.index) {
            (Scenario::TwoQubitPure | Scenario::TwoQubitMixed, 0) => "separable",
            (Scenario::TwoQubitPure | Scenario::TwoQubitMixed, 1) => "entangled",
            (Scenario::ThreeQubitPure, 0) => "fully-separable",
            (Scenario::ThreeQubitPure, 1) => "biseparable-12",
            (Scenario::ThreeQubitPure, 2) => "biseparable-13",
            (Scenario::ThreeQubitPure, 3) => "biseparable-23",
            (Scenario::ThreeQubitPure, 4) => "w",
            (Scenario::ThreeQubitPure, 5) => "ghz",
            (Scenario::ThreeQubitMixed, 0) => "not-detected",
            (Scenario::ThreeQubitMixed, 1) => "detected",
            _ => "invalid",
        }
    }
}

/// Element distribution for raw complex matrix entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementDist {
    /// Real and imaginary parts normal; variance 1/2 per component for
    /// local operators, 1 for state matrices.
    Normal,
    /// Real and imaginary parts uniform in [-1, 1].
    Uniform,
}

/// Which splits receive finite-shot noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotScope {
    Both,
    TrainOnly,
    TestOnly,
}

impl Default for ShotScope {
    fn default() -> Self {
        ShotScope::Both
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub scenario: Scenario,
    /// E_c: training examples per class. The test split holds E_c/10 per
    /// class.
    pub per_class: usize,
    pub dist: ElementDist,
    pub seed: u64,
    /// Shots per measurement setting; `None` means ideal expectation values.
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default)]
    pub shot_scope: ShotScope,
    /// Optional development split (per class); its validation companion is
    /// a tenth of it.
    #[serde(default)]
    pub dev_per_class: usize,
}

impl GenConfig {
    pub fn new(scenario: Scenario, per_class: usize, seed: u64) -> Self {
        Self {
            scenario,
            per_class,
            // uniform elements train slightly better for two-qubit mixed
            // states; local operators default to the Ginibre ensemble
            dist: match scenario {
                Scenario::TwoQubitMixed => ElementDist::Uniform,
                _ => ElementDist::Normal,
            },
            seed,
            shots: None,
            shot_scope: ShotScope::Both,
            dev_per_class: 0,
        }
    }

    pub fn validate(&self) -> Result<(), DatagenError> {
        if self.per_class < 10 {
            return Err(DatagenError::BadConfig(format!(
                "per_class must be at least 10, got {}",
                self.per_class
            )));
        }
        if self.per_class % 10 != 0 {
            return Err(DatagenError::BadConfig(format!(
                "per_class must be a multiple of 10 so the test split is a tenth, got {}",
                self.per_class
            )));
        }
        if self.dev_per_class % 10 != 0 {
            return Err(DatagenError::BadConfig(
                "dev_per_class must be a multiple of 10".into(),
            ));
        }
        if self.shots == Some(0) {
            return Err(DatagenError::BadConfig("shots must be at least 1".into()));
        }
        Ok(())
    }
}
