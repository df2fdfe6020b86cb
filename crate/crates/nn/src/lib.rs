//! Small feed-forward networks trained from scratch.
//!
//! The engine covers exactly what the classifiers here need: dense and 1D
//! convolution layers with ReLU, a softmax cross-entropy head, Adam with a
//! two-phase learning-rate schedule, and deterministic training for a fixed
//! seed. Batch gradients are accumulated over fixed-size row chunks that are
//! reduced in a fixed order, so results do not depend on the number of
//! worker threads.

mod error;
mod gradcheck;
mod network;
mod permute;
mod registry;
mod rescale;
mod serialize;
mod spec;
mod train;

pub use error::NnError;
pub use gradcheck::gradient_check;
pub use network::{Network, Trace};
pub use permute::{permute_columns, permute_dense_first_layer, validate_permutation};
pub use registry::{default_train_config, registry_names, registry_spec, ArchInfo};
pub use serialize::{load_model, save_model, write_history_csv, ModelHeader};
pub use spec::{Activation, LayerSpec, NetworkSpec};
pub use train::{
    evaluate, train, AdamParams, DataView, EpochStats, Phase, TrainConfig, TrainedModel, Trainer,
};
