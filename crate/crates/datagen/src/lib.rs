//! Labeled dataset generation for the four classification scenarios:
//! two/three qubits, pure/mixed. Pure states are sampled inside their
//! entanglement class by random local invertible operators; two-qubit mixed
//! states come from the Hilbert-Schmidt (or uniform) ensemble labeled by the
//! PPT criterion; three-qubit mixed states are witness-structured
//! depolarized mixtures. Generation is deterministic per seed and
//! parallelizes across examples through derived seed streams.

mod config;
mod dataset;
mod lio;
mod mixed2q;
mod mixed3q;

pub use config::{ElementDist, GenConfig, Scenario, ShotScope, SloccClass};
pub use dataset::{build_dataset, DatasetMeta, LabeledDataset, Split};
pub use lio::{generate_pure_state, pure_class_representative, sample_lio};
pub use mixed2q::{label_2q_mixed, sample_density_2q};
pub use mixed3q::{generate_3q_mixed, sample_cap_state, sample_rho_psi, CapRegion};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error(transparent)]
    Core(#[from] qcore::QcoreError),
    #[error(transparent)]
    Tomography(#[from] tomography::TomographyError),
    #[error(transparent)]
    Witness(#[from] witness::WitnessError),
    #[error("invalid class index {index} for scenario {scenario:?}")]
    BadClass { scenario: Scenario, index: usize },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("sampler failed to produce a valid state after {0} attempts")]
    ResampleExhausted(usize),
    #[error("alpha {0} outside (0, 1)")]
    BadAlpha(f64),
    #[error("dataset file corrupt: {0}")]
    BadFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
