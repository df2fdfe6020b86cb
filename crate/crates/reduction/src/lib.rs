//! Measurement-reduction studies on trained classifiers.
//!
//! Every data point retrains a fresh model on the surviving feature subset
//! (post-hoc masking is kept only as the negative-result baseline). Per-point
//! seeds derive from the experiment seed and the subset, so curves are
//! reproducible and points are independent.

mod masking;
mod orders;
mod retrain;
mod scans;

pub use masking::mask_eval;
pub use orders::{OrderProvenance, RemovalOrder, TheoryOrder};
pub use retrain::{
    reduction_curve, random_subset_study, retrain_with_subset, CurvePoint, ReductionCurve,
    SubsetStudy,
};
pub use scans::{
    decision_region_scan, export_phase_csv, export_region_csv, phase_scan, PhaseFamily, PhaseScan,
    PhaseScanPoint, RegionPoint,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("feature subset is empty")]
    EmptySubset,
    #[error("removal order must be a permutation starting with the identity feature: {0}")]
    BadOrder(String),
    #[error("decision-region scans support 1 or 2 input features, got {0}")]
    TooManyRegionFeatures(usize),
    #[error("model expects the {expected}-feature space, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("invalid study configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Nn(#[from] nn::NnError),
    #[error(transparent)]
    Datagen(#[from] datagen::DatagenError),
    #[error(transparent)]
    Tomography(#[from] tomography::TomographyError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
