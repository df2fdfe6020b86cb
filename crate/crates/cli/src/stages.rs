//! The five pipeline stages plus the input-rotation study.

use std::path::Path;

use serde_json::json;

use attribution::{
    aggregate_trials, export_ranking_csv, export_tensor_csv, export_tensor_json, rank_aggregate,
    ImportanceRanking,
};
use datagen::{build_dataset, LabeledDataset, Scenario};
use nn::{
    load_model, registry_spec, save_model, write_history_csv, DataView, ModelHeader, TrainConfig,
    Trainer,
};
use qcore::seed::derive_seed;
use reduction::{
    random_subset_study, reduction_curve, RemovalOrder, TheoryOrder,
};
use tomography::lex_unindex;

use crate::config::RunConfig;
use crate::error::PipelineError;
use crate::paths::{atomic_save, atomic_write, RunPaths};

fn pauli_label(num_qubits: usize) -> impl Fn(usize) -> String {
    move |j: usize| {
        lex_unindex(j, num_qubits)
            .map(|s| s.label())
            .unwrap_or_else(|_| format!("f{j}"))
    }
}

fn write_run_config(cfg: &RunConfig, paths: &RunPaths) -> Result<(), PipelineError> {
    let bytes = serde_json::to_vec_pretty(cfg)?;
    atomic_write(&paths.run_config(), &bytes)
}

/// Generate the dataset and its manifest.
pub fn run_gen(cfg: &RunConfig, out: &Path) -> Result<serde_json::Value, PipelineError> {
    let paths = RunPaths::new(out);
    std::fs::create_dir_all(out)?;
    write_run_config(cfg, &paths)?;
    let gen_cfg = cfg.gen_config();
    let ds = build_dataset(&gen_cfg)?;
    atomic_save(&paths.dataset(), |p| ds.save(p))?;
    if cfg.gen.export_csv {
        atomic_save(&paths.dataset_csv("train"), |p| ds.export_csv(p, &ds.train))?;
        atomic_save(&paths.dataset_csv("test"), |p| ds.export_csv(p, &ds.test))?;
    }

    let mut manifest = json!({
        "scenario": cfg.scenario.key(),
        "seed": cfg.seed,
        "feature_dim": ds.feature_dim,
        "num_classes": ds.num_classes,
        "per_class": gen_cfg.per_class,
        "dist": gen_cfg.dist,
        "shots": gen_cfg.shots,
        "rows": {
            "train": ds.train.rows(),
            "test": ds.test.rows(),
            "dev": ds.dev.rows(),
            "validation": ds.validation.rows(),
        },
        "class_counts": class_counts(&ds),
        "mean_train_purity": mean_purity(&ds),
    });
    if cfg.scenario == Scenario::TwoQubitMixed {
        manifest["raw_separable_fraction"] =
            json!(raw_separable_fraction(gen_cfg.dist, cfg.seed));
    }
    atomic_write(&paths.manifest(), &serde_json::to_vec_pretty(&manifest)?)?;
    Ok(manifest)
}

fn class_counts(ds: &LabeledDataset) -> Vec<usize> {
    let mut counts = vec![0usize; ds.num_classes];
    for &l in &ds.train.labels {
        counts[l as usize] += 1;
    }
    counts
}

fn mean_purity(ds: &LabeledDataset) -> f64 {
    let norm = 1.0 / (1usize << ds.num_qubits) as f64;
    let rows = ds.train.rows();
    let mut total = 0.0;
    for r in 0..rows {
        let row = ds.train.row(ds.feature_dim, r);
        total += norm * row.iter().map(|v| v * v).sum::<f64>();
    }
    total / rows as f64
}

/// Unconditioned separable fraction of the sampling ensemble, estimated on
/// a fixed side draw.
fn raw_separable_fraction(dist: datagen::ElementDist, seed: u64) -> f64 {
    use rand::SeedableRng;
    let mut rng =
        rand_chacha::ChaCha12Rng::seed_from_u64(derive_seed(seed, "ppt-fraction", 0));
    let n = 10_000;
    let mut sep = 0usize;
    for _ in 0..n {
        if let Ok(rho) = datagen::sample_density_2q(dist, &mut rng) {
            if datagen::label_2q_mixed(&rho).map(|c| c.index == 0).unwrap_or(false) {
                sep += 1;
            }
        }
    }
    sep as f64 / n as f64
}

/// Train the configured number of models on the stored dataset.
pub fn run_train(cfg: &RunConfig, out: &Path) -> Result<serde_json::Value, PipelineError> {
    let paths = RunPaths::new(out);
    write_run_config(cfg, &paths)?;
    let ds = LabeledDataset::load(&paths.dataset())
        .map_err(|e| PipelineError::validation(format!("dataset missing or unreadable: {e}")))?;
    let spec = registry_spec(&cfg.network, ds.feature_dim)?;
    let info = nn::registry_names();
    debug_assert!(info.contains(&cfg.network.as_str()));

    let mut reports = Vec::new();
    for m in 0..cfg.num_models() {
        let train_cfg = cfg.train_config(m)?;
        let model = train_one(cfg, &ds, &spec, &train_cfg)?;
        atomic_save(&paths.model(m), |p| {
            save_model(
                p,
                &model.network,
                ModelHeader {
                    spec: spec.clone(),
                    input_columns: None,
                    order_invariant_first: false,
                    registry_name: Some(cfg.network.clone()),
                    variant_note: registry_variant_note(&cfg.network),
                    train_seed: Some(train_cfg.seed),
                    final_train_acc: Some(model.final_train_acc),
                    final_test_acc: Some(model.final_test_acc),
                },
            )
        })?;
        atomic_save(&paths.history(m), |p| write_history_csv(p, &model.history))?;
        println!(
            "model {m}: train acc {:.4}, test acc {:.4}",
            model.final_train_acc, model.final_test_acc
        );
        reports.push(json!({
            "model": m,
            "train_acc": model.final_train_acc,
            "test_acc": model.final_test_acc,
            "epochs": model.history.len(),
        }));
    }
    Ok(json!({ "models": reports }))
}

fn registry_variant_note(name: &str) -> Option<String> {
    nn::registry_names()
        .iter()
        .find(|&&n| n == name)
        .and_then(|_| {
            // the registry records which published variant a name resolves to
            match name {
                "3q-pure-cnn" => {
                    Some("default three-qubit pure architecture; deep variant: 3q-pure-cnn-deep")
                }
                "3q-mixed-dnn" => {
                    Some("default three-qubit mixed architecture; wide variant: 3q-mixed-dnn-wide")
                }
                _ => None,
            }
            .map(String::from)
        })
}

fn train_one(
    cfg: &RunConfig,
    ds: &LabeledDataset,
    spec: &nn::NetworkSpec,
    train_cfg: &TrainConfig,
) -> Result<nn::TrainedModel, PipelineError> {
    match cfg.train.augment_every {
        None => {
            let dim = ds.feature_dim;
            let train = DataView::new(&ds.train.features, &ds.train.labels, dim);
            let test = DataView::new(&ds.test.features, &ds.test.labels, dim);
            Ok(nn::train(spec, train, test, train_cfg)?)
        }
        Some(0) => Err(PipelineError::validation("augment_every must be positive")),
        Some(every) => train_augmented(spec, &cfg.gen_config(), None, train_cfg, every, cfg.seed),
    }
}

/// Fresh-sample augmentation: trains through the configured phases,
/// regenerating the training split from derived seeds every `every` epochs.
/// The test split of the round-0 dataset stays fixed throughout. When
/// `columns` is given, every regenerated dataset is restricted to those
/// feature columns first.
pub fn train_augmented(
    spec: &nn::NetworkSpec,
    gen_cfg: &datagen::GenConfig,
    columns: Option<&[usize]>,
    train_cfg: &TrainConfig,
    every: usize,
    seed: u64,
) -> Result<nn::TrainedModel, PipelineError> {
    if every == 0 {
        return Err(PipelineError::validation("augment_every must be positive"));
    }
    let restrict = |ds: LabeledDataset| -> Result<LabeledDataset, PipelineError> {
        match columns {
            Some(keep) => Ok(ds.restrict_columns(keep)?),
            None => Ok(ds),
        }
    };
    let base = restrict(build_dataset(gen_cfg)?)?;
    let dim = base.feature_dim;
    let test = DataView::new(&base.test.features, &base.test.labels, dim);

    let mut trainer = Trainer::new(spec, train_cfg)?;
    let mut round = 0u64;
    let mut current = base.clone();
    for phase in train_cfg.phases.clone() {
        let mut remaining = phase.epochs;
        while remaining > 0 {
            let chunk = remaining.min(every);
            let train_view = DataView::new(&current.train.features, &current.train.labels, dim);
            trainer.train_epochs(train_view, test, phase.learning_rate, chunk)?;
            remaining -= chunk;
            if remaining > 0 {
                round += 1;
                let mut fresh_cfg = gen_cfg.clone();
                fresh_cfg.seed = derive_seed(seed, "augment", round);
                // the refresh only needs the training split; dev stays off
                fresh_cfg.dev_per_class = 0;
                current = restrict(build_dataset(&fresh_cfg)?)?;
            }
        }
    }
    let train_view = DataView::new(&current.train.features, &current.train.labels, dim);
    let mut model = trainer.finish(train_view, test)?;
    model.network.input_columns = columns.map(<[usize]>::to_vec);
    Ok(model)
}

/// Shapley attribution for every stored model plus the cross-model rank
/// aggregation.
pub fn run_explain(cfg: &RunConfig, out: &Path) -> Result<serde_json::Value, PipelineError> {
    let paths = RunPaths::new(out);
    write_run_config(cfg, &paths)?;
    let ds = LabeledDataset::load(&paths.dataset())
        .map_err(|e| PipelineError::validation(format!("dataset missing or unreadable: {e}")))?;
    std::fs::create_dir_all(paths.attrib_dir())?;
    let name = pauli_label(ds.num_qubits);

    let mut per_model_scores = Vec::new();
    let mut reports = Vec::new();
    for m in 0..cfg.num_models() {
        let model_path = paths.model(m);
        if !model_path.exists() {
            return Err(PipelineError::validation(format!(
                "model file {} missing; run the train stage first",
                model_path.display()
            )));
        }
        let (net, _) = load_model(&model_path)?;
        let mut shap_cfg = cfg.shap_config()?;
        shap_cfg.seed = derive_seed(shap_cfg.seed, "model", m as u64);
        let (ranking, tensor) =
            aggregate_trials(&net, &ds.train.features, ds.feature_dim, &shap_cfg)?;
        let mean_abs = tensor.mean_abs_scores();
        atomic_save(&paths.ranking_csv(m), |p| {
            export_ranking_csv(p, &ranking, Some(&mean_abs), &name)
        })?;
        atomic_write(&paths.ranking_json(m), &serde_json::to_vec_pretty(&ranking)?)?;
        atomic_save(&paths.attributions_csv(m), |p| export_tensor_csv(p, &tensor))?;
        atomic_save(&paths.attributions_json(m), |p| export_tensor_json(p, &tensor))?;
        reports.push(json!({
            "model": m,
            "top": ranking.order.iter().take(8).cloned().collect::<Vec<_>>(),
        }));
        per_model_scores.push(ranking.scores);
    }

    let aggregated = rank_aggregate(&per_model_scores)?;
    atomic_save(&paths.aggregated_ranking_csv(), |p| {
        export_ranking_csv(p, &aggregated, None, &name)
    })?;
    atomic_write(
        &paths.aggregated_ranking_json(),
        &serde_json::to_vec_pretty(&aggregated)?,
    )?;
    println!(
        "aggregated importance order (most important first): {:?}",
        aggregated.order
    );
    Ok(json!({
        "models": reports,
        "aggregated_order": aggregated.order,
    }))
}

fn load_ranking(path: &Path) -> Result<ImportanceRanking, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        PipelineError::validation(format!(
            "ranking {} missing; run the explain stage first ({e})",
            path.display()
        ))
    })?;
    Ok(serde_json::from_str(&text)?)
}

fn theory_order_for(scenario: Scenario) -> TheoryOrder {
    match scenario {
        Scenario::TwoQubitPure | Scenario::TwoQubitMixed => TheoryOrder::TwoQubitSchmidtSecond,
        _ => TheoryOrder::ThreeQubitWitnessSupport,
    }
}

/// Measurement-reduction curves for the configured removal orders.
pub fn run_reduce(cfg: &RunConfig, out: &Path) -> Result<serde_json::Value, PipelineError> {
    let paths = RunPaths::new(out);
    write_run_config(cfg, &paths)?;
    let ds = LabeledDataset::load(&paths.dataset())
        .map_err(|e| PipelineError::validation(format!("dataset missing or unreadable: {e}")))?;
    let spec = registry_spec(&cfg.network, ds.feature_dim)?;
    let train_cfg = cfg.train_config(0)?;
    std::fs::create_dir_all(paths.curves_dir())?;

    let mut built = Vec::new();
    for order_name in cfg.reduce_orders() {
        let order = match order_name.as_str() {
            "model_increasing" => RemovalOrder::increasing(
                &load_ranking(&paths.ranking_json(0))?,
                reduction::OrderProvenance::ModelIncreasing,
            ),
            "model_decreasing" => RemovalOrder::decreasing(
                &load_ranking(&paths.ranking_json(0))?,
                reduction::OrderProvenance::ModelDecreasing,
            ),
            "aggregated_increasing" => RemovalOrder::increasing(
                &load_ranking(&paths.aggregated_ranking_json())?,
                reduction::OrderProvenance::AggregatedIncreasing,
            ),
            "aggregated_decreasing" => RemovalOrder::decreasing(
                &load_ranking(&paths.aggregated_ranking_json())?,
                reduction::OrderProvenance::AggregatedDecreasing,
            ),
            "random" => RemovalOrder::random(
                ds.feature_dim,
                derive_seed(cfg.seed, "random-order", 0),
            ),
            "theory" => RemovalOrder::theory_informed(theory_order_for(cfg.scenario)),
            other => {
                return Err(PipelineError::usage(format!(
                    "unknown removal order '{other}'"
                )))
            }
        };
        let curve = reduction_curve(
            &ds,
            &order,
            &spec,
            &train_cfg,
            cfg.reduce_step(),
            derive_seed(cfg.seed, "curve", 0),
        )?;
        let label = curve.order_name.clone();
        atomic_save(&paths.curve(&label), |p| curve.export_csv(p))?;
        println!(
            "curve {label}: {} points, final point acc {:.4}",
            curve.points.len(),
            curve.points.last().map(|p| p.test_acc).unwrap_or(0.0)
        );
        built.push(json!({
            "order": label,
            "points": curve.points.len(),
        }));
    }

    if let Some(rs) = &cfg.reduce.random_subset {
        let aggregated = load_ranking(&paths.aggregated_ranking_json())?;
        let model0 = load_ranking(&paths.ranking_json(0))?;
        let upper: Vec<usize> = aggregated
            .order
            .iter()
            .filter(|&&j| j != 0)
            .take(rs.subset_size)
            .cloned()
            .collect();
        let lower: Vec<usize> = model0
            .order
            .iter()
            .rev()
            .filter(|&&j| j != 0)
            .take(rs.subset_size)
            .cloned()
            .collect();
        let study = random_subset_study(
            &ds,
            rs.subset_size,
            rs.num_models,
            &spec,
            &train_cfg,
            &upper,
            &lower,
            derive_seed(cfg.seed, "subset-study", 0),
        )?;
        let mut csv = String::from("kind,subset,test_acc\n");
        for (keep, acc) in &study.runs {
            let subset: Vec<String> = keep.iter().map(|j| j.to_string()).collect();
            csv.push_str(&format!("random,{},{}\n", subset.join(";"), acc));
        }
        csv.push_str(&format!(
            "upper_reference,{},{}\n",
            upper.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(";"),
            study.upper_reference
        ));
        csv.push_str(&format!(
            "lower_reference,{},{}\n",
            lower.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(";"),
            study.lower_reference
        ));
        atomic_write(&paths.subset_study(), csv.as_bytes())?;
        built.push(json!({"order": "random_subset", "points": study.runs.len()}));
    }
    Ok(json!({ "curves": built }))
}

/// Collates every artifact in the run directory into one summary document.
pub fn run_report(out: &Path) -> Result<serde_json::Value, PipelineError> {
    let paths = RunPaths::new(out);
    if !out.exists() || std::fs::read_dir(out)?.next().is_none() {
        return Err(PipelineError::validation(format!(
            "run directory {} is empty",
            out.display()
        )));
    }
    let mut warnings: Vec<String> = Vec::new();
    let mut summary = json!({});

    match std::fs::read_to_string(paths.run_config()) {
        Ok(text) => summary["run_config"] = serde_json::from_str(&text)?,
        Err(_) => warnings.push("run_config.json missing".into()),
    }
    match std::fs::read_to_string(paths.manifest()) {
        Ok(text) => summary["dataset"] = serde_json::from_str(&text)?,
        Err(_) => warnings.push("dataset manifest missing".into()),
    }

    let mut models = Vec::new();
    let mut m = 0usize;
    while paths.model(m).exists() {
        let (_, header) = load_model(&paths.model(m))?;
        models.push(json!({
            "index": m,
            "registry": header.registry_name,
            "variant_note": header.variant_note,
            "train_acc": header.final_train_acc,
            "test_acc": header.final_test_acc,
        }));
        m += 1;
    }
    if models.is_empty() {
        warnings.push("no trained models found".into());
    }
    summary["models"] = json!(models);

    match std::fs::read_to_string(paths.aggregated_ranking_json()) {
        Ok(text) => {
            let ranking: ImportanceRanking = serde_json::from_str(&text)?;
            summary["aggregated_ranking"] = json!({
                "order": ranking.order,
                "scores": ranking.scores,
            });
        }
        Err(_) => warnings.push("aggregated ranking missing".into()),
    }

    let mut curves = Vec::new();
    if paths.curves_dir().exists() {
        let mut entries: Vec<_> = std::fs::read_dir(paths.curves_dir())?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .collect();
        entries.sort();
        for path in entries {
            if path.extension().and_then(|x| x.to_str()) == Some("csv") {
                curves.push(json!({
                    "file": path.file_name().and_then(|n| n.to_str()).unwrap_or(""),
                    "rows": std::fs::read_to_string(&path)?.lines().count().saturating_sub(1),
                }));
            }
        }
    }
    if curves.is_empty() {
        warnings.push("no reduction curves found".into());
    }
    summary["curves"] = json!(curves);
    summary["warnings"] = json!(warnings);

    for w in summary["warnings"].as_array().into_iter().flatten() {
        eprintln!("warning: {}", w.as_str().unwrap_or(""));
    }
    atomic_write(&paths.summary(), &serde_json::to_vec_pretty(&summary)?)?;
    Ok(summary)
}

/// Input-rotation study: hold the dataset, feature order, and weight
/// initialization fixed; relabel the non-identity measurements by a random
/// permutation; rerun training and attribution; report how the importance
/// ranks moved relative to the permutation. Dense models are expected to
/// track the relabeling closely; this is an empirical study, not an exact
/// invariant.
pub fn run_rotation_study(cfg: &RunConfig, out: &Path) -> Result<serde_json::Value, PipelineError> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    let paths = RunPaths::new(out);
    write_run_config(cfg, &paths)?;
    let ds = LabeledDataset::load(&paths.dataset())
        .map_err(|e| PipelineError::validation(format!("dataset missing or unreadable: {e}")))?;
    let dim = ds.feature_dim;
    let spec = registry_spec(&cfg.network, dim)?;
    let train_cfg = cfg.train_config(0)?;

    // permutation fixing the identity slot
    let mut pi: Vec<usize> = (0..dim).collect();
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(derive_seed(cfg.seed, "rotation", 0));
    pi[1..].shuffle(&mut rng);

    let test = DataView::new(&ds.test.features, &ds.test.labels, dim);
    let train = DataView::new(&ds.train.features, &ds.train.labels, dim);
    let base = nn::train(&spec, train, test, &train_cfg)?;

    let permuted_train = nn::permute_columns(&ds.train.features, dim, &pi)?;
    let permuted_test = nn::permute_columns(&ds.test.features, dim, &pi)?;
    let rotated = nn::train(
        &spec,
        DataView::new(&permuted_train, &ds.train.labels, dim),
        DataView::new(&permuted_test, &ds.test.labels, dim),
        &train_cfg,
    )?;

    let shap_cfg = cfg.shap_config()?;
    let (rank_base, _) = aggregate_trials(&base.network, &ds.train.features, dim, &shap_cfg)?;
    let (rank_rot, _) = aggregate_trials(&rotated.network, &permuted_train, dim, &shap_cfg)?;

    std::fs::create_dir_all(paths.study_dir())?;
    let mut csv = String::from("feature,permuted_to,rank_base,rank_rotated_at_image,rank_shift\n");
    let mut total_shift = 0usize;
    for j in 0..dim {
        let rb = rank_base.rank_of(j);
        let rr = rank_rot.rank_of(pi[j]);
        total_shift += rb.abs_diff(rr);
        csv.push_str(&format!("{j},{},{rb},{rr},{}\n", pi[j], rb.abs_diff(rr)));
    }
    atomic_write(&paths.study_dir().join("rotation.csv"), csv.as_bytes())?;
    let mean_shift = total_shift as f64 / dim as f64;
    println!(
        "rotation study: base test acc {:.4}, rotated test acc {:.4}, mean rank shift {:.2}",
        base.final_test_acc, rotated.final_test_acc, mean_shift
    );
    Ok(json!({
        "base_test_acc": base.final_test_acc,
        "rotated_test_acc": rotated.final_test_acc,
        "mean_rank_shift": mean_shift,
    }))
}
