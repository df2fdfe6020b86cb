//! Subset retraining and accuracy-vs-measurements curves.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use datagen::LabeledDataset;
use nn::{train, DataView, NetworkSpec, TrainConfig, TrainedModel};
use qcore::seed::derive_seed;

use crate::orders::RemovalOrder;
use crate::ReductionError;

/// Trains a fresh model on the dataset restricted to `keep` (feature
/// indices into the full space). The architecture is unchanged except for
/// the input width. Returns the model plus final train/test accuracies.
pub fn retrain_with_subset(
    dataset: &LabeledDataset,
    keep: &[usize],
    spec: &NetworkSpec,
    cfg: &TrainConfig,
) -> Result<(TrainedModel, f64, f64), ReductionError> {
    if keep.is_empty() {
        return Err(ReductionError::EmptySubset);
    }
    let narrow = dataset.restrict_columns(keep)?;
    let spec = spec.with_input_dim(keep.len())?;
    let train_view = DataView::new(&narrow.train.features, &narrow.train.labels, keep.len());
    let test_view = DataView::new(&narrow.test.features, &narrow.test.labels, keep.len());
    let mut model = train(&spec, train_view, test_view, cfg)?;
    model.network.input_columns = Some(keep.to_vec());
    let (tr, te) = (model.final_train_acc, model.final_test_acc);
    Ok((model, tr, te))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub num_remaining: usize,
    pub removed: Vec<usize>,
    pub train_acc: f64,
    pub test_acc: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionCurve {
    pub order_name: String,
    pub points: Vec<CurvePoint>,
}

impl ReductionCurve {
    pub fn export_csv(&self, path: &Path) -> Result<(), ReductionError> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "order_name,num_remaining,removed_indices,train_acc,test_acc,seed")?;
        for p in &self.points {
            let removed: Vec<String> = p.removed.iter().map(|j| j.to_string()).collect();
            writeln!(
                w,
                "{},{},{},{},{},{}",
                self.order_name,
                p.num_remaining,
                removed.join(";"),
                p.train_acc,
                p.test_acc,
                p.seed
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

fn subset_hash(keep: &[usize]) -> u64 {
    keep.iter()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, &j| {
            (h ^ j as u64).wrapping_mul(0x1000_0000_01b3)
        })
}

/// Removes features per the order, retraining from scratch at every kept
/// step, and reports the accuracy curve. `step` subsamples the removal
/// sequence (1 = every removal); the identity removal and the final
/// single-feature point are always included. Each point derives its own
/// seed from the experiment seed and the surviving subset.
pub fn reduction_curve(
    dataset: &LabeledDataset,
    order: &RemovalOrder,
    spec: &NetworkSpec,
    cfg: &TrainConfig,
    step: usize,
    seed: u64,
) -> Result<ReductionCurve, ReductionError> {
    if order.num_features() != dataset.feature_dim {
        return Err(ReductionError::DimMismatch {
            expected: dataset.feature_dim,
            got: order.num_features(),
        });
    }
    let step = step.max(1);
    let n = order.num_features();
    let mut points = Vec::new();
    // removal counts: identity first (1), then every `step`-th, plus the
    // final point with a single surviving feature
    let mut counts: Vec<usize> = (1..n).filter(|k| (k - 1) % step == 0).collect();
    if counts.last() != Some(&(n - 1)) {
        counts.push(n - 1);
    }
    for removed in counts {
        let keep = order.surviving(removed);
        let point_seed = derive_seed(seed, "curve-point", subset_hash(&keep));
        let mut point_cfg = cfg.clone();
        point_cfg.seed = point_seed;
        let (_, train_acc, test_acc) = retrain_with_subset(dataset, &keep, spec, &point_cfg)?;
        points.push(CurvePoint {
            num_remaining: keep.len(),
            removed: order.removal_sequence()[..removed].to_vec(),
            train_acc,
            test_acc,
            seed: point_seed,
        });
    }
    Ok(ReductionCurve {
        order_name: order.provenance.label(),
        points,
    })
}

#[derive(Debug, Clone)]
pub struct SubsetStudy {
    pub subset_size: usize,
    /// (subset, test accuracy) per independently drawn random subset
    pub runs: Vec<(Vec<usize>, f64)>,
    /// accuracy of the top-k subset from the aggregated ranking
    pub upper_reference: f64,
    /// accuracy of the bottom-k subset (model-dependent decreasing order)
    pub lower_reference: f64,
}

/// Trains `num_models` models on independent uniformly random feature
/// subsets (identity excluded) and brackets them with the reference
/// accuracies of the best-k and worst-k importance subsets.
pub fn random_subset_study(
    dataset: &LabeledDataset,
    subset_size: usize,
    num_models: usize,
    spec: &NetworkSpec,
    cfg: &TrainConfig,
    upper_keep: &[usize],
    lower_keep: &[usize],
    seed: u64,
) -> Result<SubsetStudy, ReductionError> {
    if subset_size == 0 || subset_size >= dataset.feature_dim {
        return Err(ReductionError::BadConfig(format!(
            "subset size {subset_size} out of range"
        )));
    }
    use rand::SeedableRng;
    let mut runs = Vec::with_capacity(num_models);
    for m in 0..num_models {
        let mut rng =
            rand_chacha::ChaCha12Rng::seed_from_u64(derive_seed(seed, "subset", m as u64));
        let keep: Vec<usize> = {
            let picked =
                rand::seq::index::sample(&mut rng, dataset.feature_dim - 1, subset_size);
            let mut keep: Vec<usize> = picked.into_iter().map(|j| j + 1).collect();
            keep.sort_unstable();
            keep
        };
        let mut run_cfg = cfg.clone();
        run_cfg.seed = derive_seed(seed, "subset-train", m as u64);
        let (_, _, test_acc) = retrain_with_subset(dataset, &keep, spec, &run_cfg)?;
        runs.push((keep, test_acc));
    }
    let (_, _, upper_reference) = retrain_with_subset(dataset, upper_keep, spec, cfg)?;
    let (_, _, lower_reference) = retrain_with_subset(dataset, lower_keep, spec, cfg)?;
    Ok(SubsetStudy {
        subset_size,
        runs,
        upper_reference,
        lower_reference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use attribution::ImportanceRanking;
    use datagen::{build_dataset, GenConfig, Scenario};
    use nn::{registry_spec, TrainConfig};

    fn small_2q_pure() -> LabeledDataset {
        build_dataset(&GenConfig::new(Scenario::TwoQubitPure, 300, 17)).unwrap()
    }

    fn quick_cfg(seed: u64) -> TrainConfig {
        TrainConfig::new(vec![(1e-3, 25)], 32, seed)
    }

    #[test]
    fn full_subset_matches_direct_training() {
        let ds = small_2q_pure();
        let spec = registry_spec("2q-pure-cnn", 16).unwrap();
        let cfg = quick_cfg(3);
        let keep: Vec<usize> = (0..16).collect();
        let (_, _, sub_acc) = retrain_with_subset(&ds, &keep, &spec, &cfg).unwrap();
        let direct = nn::train(
            &spec,
            DataView::new(&ds.train.features, &ds.train.labels, 16),
            DataView::new(&ds.test.features, &ds.test.labels, 16),
            &cfg,
        )
        .unwrap();
        assert!((sub_acc - direct.final_test_acc).abs() < 1e-12);
    }

    #[test]
    fn empty_subset_rejected() {
        let ds = small_2q_pure();
        let spec = registry_spec("2q-pure-cnn", 16).unwrap();
        assert!(matches!(
            retrain_with_subset(&ds, &[], &spec, &quick_cfg(1)),
            Err(ReductionError::EmptySubset)
        ));
    }

    #[test]
    fn curve_counts_decrease_and_single_feature_near_chance_when_uninformative() {
        let ds = small_2q_pure();
        let spec = registry_spec("2q-pure-cnn", 16).unwrap();
        let cfg = quick_cfg(5);
        // random order with a wide step to keep this fast
        let order = RemovalOrder::random(16, 9);
        let curve = reduction_curve(&ds, &order, &spec, &cfg, 5, 77).unwrap();
        let counts: Vec<usize> = curve.points.iter().map(|p| p.num_remaining).collect();
        assert!(counts.windows(2).all(|w| w[0] > w[1]), "{counts:?}");
        assert_eq!(*counts.last().unwrap(), 1);
        // curve is reproducible point by point
        let again = reduction_curve(&ds, &order, &spec, &cfg, 5, 77).unwrap();
        assert_eq!(curve, again);
    }

    #[test]
    fn csv_export_shape() {
        let curve = ReductionCurve {
            order_name: "test".into(),
            points: vec![CurvePoint {
                num_remaining: 15,
                removed: vec![0],
                train_acc: 0.9,
                test_acc: 0.8,
                seed: 1,
            }],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curve.csv");
        curve.export_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("order_name,num_remaining,removed_indices"));
        assert!(text.contains("test,15,0,0.9,0.8,1"));
    }

    #[test]
    fn increasing_order_keeps_informative_features_longer() {
        // with an importance ranking that favors the Schmidt-adjacent
        // features, the increasing order must retain them at the end
        let mut scores = vec![0.0; 16];
        for (j, s) in scores.iter_mut().enumerate() {
            *s = j as f64;
        }
        let ranking = ImportanceRanking::from_scores(scores);
        let order =
            RemovalOrder::increasing(&ranking, crate::OrderProvenance::AggregatedIncreasing);
        assert_eq!(order.surviving(13), vec![13, 14, 15]);
    }
}
