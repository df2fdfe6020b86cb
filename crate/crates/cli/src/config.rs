//! Versioned JSON run configuration. Unknown keys are rejected so config
//! typos fail loudly instead of silently using defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use attribution::{desk_params, paper_params, ShapBackend, ShapConfig};
use datagen::{ElementDist, GenConfig, Scenario, ShotScope};
use nn::TrainConfig;

use crate::error::PipelineError;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub scenario: Scenario,
    pub seed: u64,
    pub gen: GenSection,
    pub network: String,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub shap: ShapSection,
    #[serde(default)]
    pub reduce: ReduceSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSection {
    pub per_class: usize,
    #[serde(default)]
    pub dist: Option<ElementDist>,
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default)]
    pub shot_scope: Option<ShotScope>,
    #[serde(default)]
    pub dev_per_class: usize,
    /// Also write a CSV copy of the train and test splits.
    #[serde(default)]
    pub export_csv: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    /// (learning rate, epochs) phases; defaults to the registry schedule.
    #[serde(default)]
    pub phases: Option<Vec<(f64, usize)>>,
    #[serde(default)]
    pub batch_size: Option<usize>,
    /// Number of independently initialized models to train.
    #[serde(default)]
    pub models: Option<usize>,
    #[serde(default)]
    pub dropout: Option<f64>,
    /// Regenerate the training split every this many epochs.
    #[serde(default)]
    pub augment_every: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ShapSection {
    /// "desk" (default) or "paper" parameter preset.
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub backend: Option<ShapBackend>,
    #[serde(default)]
    pub background: Option<usize>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ReduceSection {
    /// Order names: model_increasing, model_decreasing,
    /// aggregated_increasing, aggregated_decreasing, random, theory.
    #[serde(default)]
    pub orders: Option<Vec<String>>,
    /// Removal-step subsampling; defaults to 1 for two qubits and 4 for
    /// three.
    #[serde(default)]
    pub step: Option<usize>,
    #[serde(default)]
    pub random_subset: Option<RandomSubsetSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSubsetSection {
    pub subset_size: usize,
    pub num_models: usize,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::validation(format!("cannot read config: {e}")))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| PipelineError::validation(format!("config invalid: {e}")))?;
        if cfg.version != CONFIG_VERSION {
            return Err(PipelineError::validation(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                cfg.version
            )));
        }
        Ok(cfg)
    }

    pub fn gen_config(&self) -> GenConfig {
        let mut g = GenConfig::new(self.scenario, self.gen.per_class, self.seed);
        if let Some(d) = self.gen.dist {
            g.dist = d;
        }
        g.shots = self.gen.shots;
        if let Some(s) = self.gen.shot_scope {
            g.shot_scope = s;
        }
        g.dev_per_class = self.gen.dev_per_class;
        g
    }

    /// Training configuration for model `index`, seeds derived from the
    /// global seed.
    pub fn train_config(&self, index: usize) -> Result<TrainConfig, PipelineError> {
        let mut cfg = nn::default_train_config(&self.network, 0)
            .map_err(|e| PipelineError::usage(e.to_string()))?;
        if let Some(phases) = &self.train.phases {
            cfg = TrainConfig::new(phases.clone(), cfg.batch_size, 0);
        }
        if let Some(bs) = self.train.batch_size {
            cfg.batch_size = bs;
        }
        cfg.dropout = self.train.dropout;
        cfg.seed = qcore::seed::derive_seed(self.seed, "train-model", index as u64);
        Ok(cfg)
    }

    pub fn num_models(&self) -> usize {
        self.train.models.unwrap_or(1).max(1)
    }

    pub fn shap_config(&self) -> Result<ShapConfig, PipelineError> {
        let preset = self.shap.preset.as_deref().unwrap_or("desk");
        let params = match preset {
            "desk" => desk_params(self.scenario.key()),
            "paper" => paper_params(self.scenario.key()),
            other => {
                return Err(PipelineError::usage(format!(
                    "unknown shap preset '{other}' (desk or paper)"
                )))
            }
        }
        .ok_or_else(|| PipelineError::validation("no shap preset for scenario"))?;
        let (_, l, kb, ks) = params;
        Ok(ShapConfig {
            backend: self.shap.backend.unwrap_or(ShapBackend::Rescale),
            background: self.shap.background.unwrap_or(kb),
            samples: self.shap.samples.unwrap_or(ks),
            trials: self.shap.trials.unwrap_or(l),
            seed: qcore::seed::derive_seed(self.seed, "shap", 0),
        })
    }

    pub fn reduce_step(&self) -> usize {
        self.reduce
            .step
            .unwrap_or(if self.scenario.num_qubits() == 3 { 4 } else { 1 })
    }

    pub fn reduce_orders(&self) -> Vec<String> {
        self.reduce.orders.clone().unwrap_or_else(|| {
            vec![
                "aggregated_increasing".into(),
                "aggregated_decreasing".into(),
                "random".into(),
            ]
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses() {
        let text = r#"{
            "version": 1,
            "scenario": "2q-pure",
            "seed": 7,
            "gen": {"per_class": 100},
            "network": "2q-pure-cnn"
        }"#;
        let cfg: RunConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.gen_config().per_class, 100);
        let tc = cfg.train_config(0).unwrap();
        assert_eq!(tc.phases.len(), 2);
        let sc = cfg.shap_config().unwrap();
        assert_eq!(sc.background, 1000);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{
            "version": 1,
            "scenario": "2q-pure",
            "seed": 7,
            "gen": {"per_class": 100, "typo_field": 3},
            "network": "2q-pure-cnn"
        }"#;
        assert!(serde_json::from_str::<RunConfig>(text).is_err());
    }

    #[test]
    fn paper_preset_selected() {
        let text = r#"{
            "version": 1,
            "scenario": "2q-mixed",
            "seed": 1,
            "gen": {"per_class": 100},
            "network": "2q-mixed-dnn",
            "shap": {"preset": "paper"}
        }"#;
        let cfg: RunConfig = serde_json::from_str(text).unwrap();
        let sc = cfg.shap_config().unwrap();
        assert_eq!((sc.trials, sc.background, sc.samples), (75, 3600, 400));
    }
}
