//! Shared attribution containers and configuration.

use serde::{Deserialize, Serialize};

use crate::AttributionError;

/// Per-feature, per-class attribution values for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Attributions {
    pub features: usize,
    pub classes: usize,
    values: Vec<f64>,
}

impl Attributions {
    pub fn zeros(features: usize, classes: usize) -> Self {
        Self {
            features,
            classes,
            values: vec![0.0; features * classes],
        }
    }

    pub fn from_flat(features: usize, classes: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), features * classes);
        Self {
            features,
            classes,
            values,
        }
    }

    #[inline]
    pub fn get(&self, feature: usize, class: usize) -> f64 {
        self.values[feature * self.classes + class]
    }

    #[inline]
    pub fn set(&mut self, feature: usize, class: usize, v: f64) {
        self.values[feature * self.classes + class] = v;
    }

    #[inline]
    pub fn add(&mut self, feature: usize, class: usize, v: f64) {
        self.values[feature * self.classes + class] += v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Per-class sum over features (the additivity identity side).
    pub fn class_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.classes];
        for j in 0..self.features {
            for c in 0..self.classes {
                sums[c] += self.get(j, c);
            }
        }
        sums
    }
}

/// Shapley values indexed by (trial, sample, feature, class).
#[derive(Debug, Clone)]
pub struct AttributionTensor {
    pub trials: usize,
    pub samples: usize,
    pub features: usize,
    pub classes: usize,
    values: Vec<f64>,
}

impl AttributionTensor {
    pub fn zeros(trials: usize, samples: usize, features: usize, classes: usize) -> Self {
        Self {
            trials,
            samples,
            features,
            classes,
            values: vec![0.0; trials * samples * features * classes],
        }
    }

    #[inline]
    fn offset(&self, l: usize, k: usize, j: usize, c: usize) -> usize {
        ((l * self.samples + k) * self.features + j) * self.classes + c
    }

    pub fn get(&self, l: usize, k: usize, j: usize, c: usize) -> f64 {
        self.values[self.offset(l, k, j, c)]
    }

    pub fn set(&mut self, l: usize, k: usize, j: usize, c: usize, v: f64) {
        let o = self.offset(l, k, j, c);
        self.values[o] = v;
    }

    pub(crate) fn write_sample(&mut self, l: usize, k: usize, a: &Attributions) {
        for j in 0..self.features {
            for c in 0..self.classes {
                self.set(l, k, j, c, a.get(j, c));
            }
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mean absolute value per feature across trials, samples, and classes.
    pub fn mean_abs_scores(&self) -> Vec<f64> {
        let mut scores = vec![0.0; self.features];
        for l in 0..self.trials {
            for k in 0..self.samples {
                for j in 0..self.features {
                    for c in 0..self.classes {
                        scores[j] += self.get(l, k, j, c).abs();
                    }
                }
            }
        }
        let norm = 1.0 / (self.trials * self.samples * self.classes) as f64;
        scores.iter_mut().for_each(|s| *s *= norm);
        scores
    }
}

/// Per-feature importance scores plus the descending rank order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRanking {
    /// score per feature index (non-negative)
    pub scores: Vec<f64>,
    /// feature indices, most important first; ties broken toward the lower
    /// feature index
    pub order: Vec<usize>,
}

impl ImportanceRanking {
    /// Ranks features by score, descending; equal scores order by index.
    pub fn from_scores(scores: Vec<f64>) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| {
            scores[b]
                .partial_cmp(&scores[a])
                .expect("scores are finite")
                .then(a.cmp(&b))
        });
        Self { scores, order }
    }

    /// Position of a feature in the descending order (0 = most important).
    pub fn rank_of(&self, feature: usize) -> usize {
        self.order
            .iter()
            .position(|&j| j == feature)
            .expect("feature in range")
    }

    pub fn top(&self, k: usize) -> &[usize] {
        &self.order[..k.min(self.order.len())]
    }

    pub fn bottom(&self, k: usize) -> &[usize] {
        &self.order[self.order.len() - k.min(self.order.len())..]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapBackend {
    Exact,
    Permutation { num_perms: usize },
    Rescale,
}

/// Configuration of the repeated-sampling attribution procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapConfig {
    pub backend: ShapBackend,
    /// K_b: background rows per trial
    pub background: usize,
    /// K_s: explained samples per trial
    pub samples: usize,
    /// L: independent (background, sample) draws
    pub trials: usize,
    pub seed: u64,
}

impl ShapConfig {
    pub fn validate(&self) -> Result<(), AttributionError> {
        if self.background == 0 || self.samples == 0 || self.trials == 0 {
            return Err(AttributionError::BadConfig(
                "background, samples, and trials must all be positive".into(),
            ));
        }
        if let ShapBackend::Permutation { num_perms } = self.backend {
            if num_perms == 0 {
                return Err(AttributionError::BadConfig(
                    "permutation backend needs at least one permutation".into(),
                ));
            }
        }
        Ok(())
    }
}

/// A borrowed background matrix.
#[derive(Debug, Clone, Copy)]
pub struct BackgroundSet<'a> {
    pub features: &'a [f64],
    pub dim: usize,
}

impl<'a> BackgroundSet<'a> {
    pub fn new(features: &'a [f64], dim: usize) -> Self {
        assert_eq!(features.len() % dim, 0, "ragged background");
        Self { features, dim }
    }

    pub fn rows(&self) -> usize {
        self.features.len() / self.dim
    }

    pub fn row(&self, r: usize) -> &'a [f64] {
        &self.features[r * self.dim..(r + 1) * self.dim]
    }
}
