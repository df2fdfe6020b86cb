//! Run-directory layout and atomic file writes.

use std::path::{Path, PathBuf};

use crate::error::PipelineError;

#[derive(Debug, Clone)]
pub struct RunPaths {
    out: PathBuf,
}

impl RunPaths {
    pub fn new(out: &Path) -> Self {
        Self { out: out.to_path_buf() }
    }

    pub fn root(&self) -> &Path {
        &self.out
    }

    pub fn run_config(&self) -> PathBuf {
        self.out.join("run_config.json")
    }

    pub fn dataset(&self) -> PathBuf {
        self.out.join("dataset.bin")
    }

    pub fn manifest(&self) -> PathBuf {
        self.out.join("dataset_manifest.json")
    }

    pub fn dataset_csv(&self, split: &str) -> PathBuf {
        self.out.join(format!("dataset_{split}.csv"))
    }

    pub fn model(&self, index: usize) -> PathBuf {
        self.out.join(format!("model_{index}.bin"))
    }

    pub fn history(&self, index: usize) -> PathBuf {
        self.out.join(format!("history_{index}.csv"))
    }

    pub fn attrib_dir(&self) -> PathBuf {
        self.out.join("attrib")
    }

    pub fn ranking_csv(&self, index: usize) -> PathBuf {
        self.attrib_dir().join(format!("ranking_{index}.csv"))
    }

    pub fn ranking_json(&self, index: usize) -> PathBuf {
        self.attrib_dir().join(format!("ranking_{index}.json"))
    }

    pub fn aggregated_ranking_csv(&self) -> PathBuf {
        self.attrib_dir().join("ranking_aggregated.csv")
    }

    pub fn aggregated_ranking_json(&self) -> PathBuf {
        self.attrib_dir().join("ranking_aggregated.json")
    }

    pub fn attributions_csv(&self, index: usize) -> PathBuf {
        self.attrib_dir().join(format!("attributions_{index}.csv"))
    }

    pub fn attributions_json(&self, index: usize) -> PathBuf {
        self.attrib_dir().join(format!("attributions_{index}.json"))
    }

    pub fn curves_dir(&self) -> PathBuf {
        self.out.join("curves")
    }

    pub fn curve(&self, name: &str) -> PathBuf {
        self.curves_dir().join(format!("curve_{name}.csv"))
    }

    pub fn subset_study(&self) -> PathBuf {
        self.curves_dir().join("random_subset.csv")
    }

    pub fn study_dir(&self) -> PathBuf {
        self.out.join("study")
    }

    pub fn summary(&self) -> PathBuf {
        self.out.join("summary.json")
    }
}

/// Writes bytes atomically: temp file in the same directory, then rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Runs a path-consuming writer against a temp path, then renames into
/// place.
pub fn atomic_save<E, F>(path: &Path, write: F) -> Result<(), PipelineError>
where
    E: std::fmt::Display,
    F: FnOnce(&Path) -> Result<(), E>,
{
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    write(&tmp).map_err(|e| PipelineError::validation(format!("write failed: {e}")))?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
