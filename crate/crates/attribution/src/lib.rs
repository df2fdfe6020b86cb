//! Shapley-value feature attributions for trained classifiers.
//!
//! Three backends share one value function: the interventional expectation
//! f_c(S) = mean over background rows b of logit_c(hybrid(x_S, b_not_S)).
//! `exact` enumerates every coalition (feasible up to 20 features),
//! `permutation` is the unbiased Monte-Carlo estimator with standard
//! errors, and `rescale` propagates reference multipliers in one backward
//! pass per background row. Attributions are computed on pre-softmax
//! logits.

mod aggregate;
mod exact;
mod permutation;
mod rescale;
mod types;

pub use aggregate::{
    aggregate_trials, export_ranking_csv, export_tensor_csv, export_tensor_json, rank_aggregate,
    rescale_for_plot, paper_params, desk_params,
};
pub use exact::{exact_shapley, exact_shapley_game};
pub use permutation::permutation_shapley;
pub use rescale::{rescale_attribution, RescaleExplainer};
pub use types::{
    Attributions, AttributionTensor, BackgroundSet, ImportanceRanking, ShapBackend, ShapConfig,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AttributionError {
    #[error("exact backend limited to 20 features, got {0}; use the permutation backend")]
    TooManyFeatures(usize),
    #[error("background set is empty")]
    EmptyBackground,
    #[error("dataset has {rows} rows but the draw needs {needed} (background + samples)")]
    DatasetTooSmall { rows: usize, needed: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Nn(#[from] nn::NnError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
