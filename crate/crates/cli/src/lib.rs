//! Pipeline library behind the `entclass` binary: generate, train, explain,
//! reduce, report. Each stage consumes the previous stage's files from the
//! run directory, so partial reruns are cheap. All randomness derives from
//! the single configured seed.

pub mod config;
pub mod error;
pub mod paths;
pub mod stages;

pub use config::RunConfig;
pub use error::{ErrorClass, PipelineError};
pub use paths::RunPaths;
pub use stages::{run_explain, run_gen, run_reduce, run_report, run_rotation_study, run_train};
