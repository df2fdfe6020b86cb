//! Repeated-sampling aggregation and cross-model rank aggregation.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use nn::Network;
use qcore::seed::derive_seed;

use crate::exact::exact_shapley;
use crate::permutation::permutation_shapley;
use crate::rescale::RescaleExplainer;
use crate::types::{
    AttributionTensor, Attributions, BackgroundSet, ImportanceRanking, ShapBackend, ShapConfig,
};
use crate::AttributionError;

/// Published attribution-sweep parameters (M models, L trials, K_b, K_s)
/// per scenario key.
pub fn paper_params(scenario: &str) -> Option<(usize, usize, usize, usize)> {
    match scenario {
        "2q-pure" => Some((10, 10, 10_000, 1_000)),
        "2q-mixed" => Some((10, 75, 3_600, 400)),
        "3q-pure" => Some((20, 60, 1_800, 180)),
        "3q-mixed" => Some((20, 25, 5_000, 1_000)),
        _ => None,
    }
}

/// Desk-scale defaults: the published parameters shrunk roughly tenfold
/// with ratios preserved.
pub fn desk_params(scenario: &str) -> Option<(usize, usize, usize, usize)> {
    match scenario {
        "2q-pure" => Some((5, 5, 1_000, 100)),
        "2q-mixed" => Some((5, 8, 360, 40)),
        "3q-pure" => Some((5, 6, 180, 18)),
        "3q-mixed" => Some((5, 5, 500, 100)),
        _ => None,
    }
}

fn backend_attributions(
    net: &Network,
    backend: ShapBackend,
    x: &[f64],
    background: BackgroundSet,
    seed: u64,
) -> Result<Attributions, AttributionError> {
    match backend {
        ShapBackend::Exact => exact_shapley(net, x, background),
        ShapBackend::Rescale => crate::rescale::rescale_attribution(net, x, background),
        ShapBackend::Permutation { num_perms } => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            Ok(permutation_shapley(net, x, background, num_perms, &mut rng)?.0)
        }
    }
}

/// Runs L independent (background, sample) draws from the training features
/// and aggregates mean absolute Shapley values into a per-feature ranking.
/// Draws are without replacement and the two sets never overlap within a
/// trial.
pub fn aggregate_trials(
    net: &Network,
    train_features: &[f64],
    dim: usize,
    cfg: &ShapConfig,
) -> Result<(ImportanceRanking, AttributionTensor), AttributionError> {
    cfg.validate()?;
    if dim != net.input_dim() {
        return Err(AttributionError::DimMismatch {
            expected: net.input_dim(),
            got: dim,
        });
    }
    let rows = train_features.len() / dim;
    let needed = cfg.background + cfg.samples;
    if rows < needed {
        return Err(AttributionError::DatasetTooSmall { rows, needed });
    }
    let classes = net.classes();
    let mut tensor = AttributionTensor::zeros(cfg.trials, cfg.samples, dim, classes);

    for l in 0..cfg.trials {
        let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(cfg.seed, "shap-trial", l as u64));
        let picked = rand::seq::index::sample(&mut rng, rows, needed).into_vec();
        let (bg_rows, sample_rows) = picked.split_at(cfg.background);

        let mut bg_flat = Vec::with_capacity(cfg.background * dim);
        for &r in bg_rows {
            bg_flat.extend_from_slice(&train_features[r * dim..(r + 1) * dim]);
        }
        let background = BackgroundSet::new(&bg_flat, dim);

        // rescale reuses the background traces across every sample
        let explainer = match cfg.backend {
            ShapBackend::Rescale => Some(RescaleExplainer::new(net, background)?),
            _ => None,
        };

        let per_sample: Vec<Result<Attributions, AttributionError>> = sample_rows
            .par_iter()
            .enumerate()
            .map(|(k, &r)| {
                let x = &train_features[r * dim..(r + 1) * dim];
                match &explainer {
                    Some(e) => e.attributions(x),
                    None => backend_attributions(
                        net,
                        cfg.backend,
                        x,
                        background,
                        derive_seed(cfg.seed, "shap-sample", ((l as u64) << 32) | k as u64),
                    ),
                }
            })
            .collect();

        for (k, res) in per_sample.into_iter().enumerate() {
            tensor.write_sample(l, k, &res?);
        }
    }

    let scores = tensor.mean_abs_scores();
    Ok((ImportanceRanking::from_scores(scores), tensor))
}

/// Rank-based aggregation across models: within each model the best feature
/// earns n-1 points down to 0 for the worst, and features are ordered by
/// the summed points. Ties break toward the lower feature index.
pub fn rank_aggregate(per_model_scores: &[Vec<f64>]) -> Result<ImportanceRanking, AttributionError> {
    let m = per_model_scores.len();
    if m == 0 {
        return Err(AttributionError::BadConfig("no model scores given".into()));
    }
    let n = per_model_scores[0].len();
    if per_model_scores.iter().any(|s| s.len() != n) {
        return Err(AttributionError::BadConfig(
            "models disagree on feature count".into(),
        ));
    }
    let mut points = vec![0.0f64; n];
    for scores in per_model_scores {
        let ranking = ImportanceRanking::from_scores(scores.clone());
        for (pos, &feature) in ranking.order.iter().enumerate() {
            points[feature] += (n - 1 - pos) as f64;
        }
    }
    Ok(ImportanceRanking::from_scores(points))
}

/// Display rescaling for attribution matrix plots:
/// g = sqrt(1 - (|chi| - 1)^2) on normalized inputs in [0, 1]. Out-of-range
/// inputs are clamped with a warning.
pub fn rescale_for_plot(chi: f64) -> f64 {
    let x = if !(0.0..=1.0).contains(&chi) {
        log::warn!("rescale_for_plot input {chi} outside [0, 1]; clamping");
        chi.clamp(0.0, 1.0)
    } else {
        chi
    };
    (1.0 - (x - 1.0) * (x - 1.0)).sqrt()
}

/// CSV export of a ranking: feature index, label, mean |shap|, rank, score.
/// `name_fn` maps a feature index to its measurement label.
pub fn export_ranking_csv(
    path: &Path,
    ranking: &ImportanceRanking,
    mean_abs: Option<&[f64]>,
    name_fn: &dyn Fn(usize) -> String,
) -> Result<(), AttributionError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "feature_index,pauli_string,mean_abs_shap,rank,score")?;
    for j in 0..ranking.scores.len() {
        let shap = mean_abs.map(|m| m[j]).unwrap_or(ranking.scores[j]);
        writeln!(
            w,
            "{},{},{},{},{}",
            j,
            name_fn(j),
            shap,
            ranking.rank_of(j),
            ranking.scores[j]
        )?;
    }
    w.flush()?;
    Ok(())
}

/// CSV export of the full tensor: one row per (trial, sample, feature, class).
pub fn export_tensor_csv(path: &Path, t: &AttributionTensor) -> Result<(), AttributionError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "trial,sample,feature_index,class,shap")?;
    for l in 0..t.trials {
        for k in 0..t.samples {
            for j in 0..t.features {
                for c in 0..t.classes {
                    writeln!(w, "{l},{k},{j},{c},{}", t.get(l, k, j, c))?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// JSON export: dims plus the flat value array in (trial, sample, feature,
/// class) order.
pub fn export_tensor_json(path: &Path, t: &AttributionTensor) -> Result<(), AttributionError> {
    let doc = serde_json::json!({
        "dims": {
            "trials": t.trials,
            "samples": t.samples,
            "features": t.features,
            "classes": t.classes,
        },
        "layout": "trial-major: ((trial * samples + sample) * features + feature) * classes + class",
        "values": t.values(),
    });
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, &doc)?;
    w.flush()?;
    Ok(())
}
