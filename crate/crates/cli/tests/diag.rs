//! Temporary diagnostics (not part of the suite).

use datagen::{build_dataset, generate_pure_state, ElementDist, GenConfig, Scenario, SloccClass};
use nn::{registry_spec, train, DataView, LayerSpec, NetworkSpec, TrainConfig};
use qcore::reduced_purity;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

#[test]
#[ignore]
fn purity_tail() {
    let mut rng = ChaCha12Rng::seed_from_u64(1);
    let class = SloccClass::new(Scenario::TwoQubitPure, 1).unwrap();
    let n = 200_000;
    let mut purities: Vec<f64> = (0..n)
        .map(|_| {
            let psi = generate_pure_state(&class, ElementDist::Normal, &mut rng).unwrap();
            reduced_purity(&psi, 0).unwrap()
        })
        .collect();
    purities.sort_by(f64::total_cmp);
    let frac_above = |t: f64| {
        let idx = purities.partition_point(|&p| p < t);
        (n - idx) as f64 / n as f64
    };
    println!("median purity: {}", purities[n / 2]);
    for t in [0.9, 0.95, 0.99, 0.995, 0.999, 0.9999, 0.99999] {
        println!("P(purity > {t}) = {:.5}", frac_above(t));
    }
}

#[test]
#[ignore]
fn history_full16() {
    let ds = build_dataset(&GenConfig::new(Scenario::TwoQubitPure, 10_000, 123)).unwrap();
    let spec = registry_spec("2q-pure-cnn", 16).unwrap();
    let cfg = TrainConfig::new(vec![(1e-3, 100), (1e-4, 50)], 64, 5);
    let model = train(
        &spec,
        DataView::new(&ds.train.features, &ds.train.labels, 16),
        DataView::new(&ds.test.features, &ds.test.labels, 16),
        &cfg,
    )
    .unwrap();
    for s in model.history.iter().step_by(10) {
        println!(
            "epoch {:3}  train {:.4} test {:.4}  loss {:.4}/{:.4}",
            s.epoch, s.train_acc, s.test_acc, s.train_loss, s.test_loss
        );
    }
    println!("final: train {} test {}", model.final_train_acc, model.final_test_acc);
}

#[test]
#[ignore]
fn dnn_comparison_full16() {
    let ds = build_dataset(&GenConfig::new(Scenario::TwoQubitPure, 10_000, 123)).unwrap();
    let spec = NetworkSpec::new(
        16,
        vec![
            LayerSpec::dense_relu(256),
            LayerSpec::dense_relu(64),
            LayerSpec::head(2),
        ],
        2,
    )
    .unwrap();
    let cfg = TrainConfig::new(vec![(1e-3, 60), (1e-4, 15)], 64, 5);
    let model = train(
        &spec,
        DataView::new(&ds.train.features, &ds.train.labels, 16),
        DataView::new(&ds.test.features, &ds.test.labels, 16),
        &cfg,
    )
    .unwrap();
    println!("DNN final: train {} test {}", model.final_train_acc, model.final_test_acc);
}

#[test]
#[ignore]
fn bayes_estimate_pairs() {
    // 2D histogram Bayes bound for features {IX, IY}
    let mut rng = ChaCha12Rng::seed_from_u64(3);
    let n = 400_000usize;
    let bins = 60usize;
    let mut sep = vec![0u32; bins * bins];
    let mut ent = vec![0u32; bins * bins];
    for c in 0..2 {
        let class = SloccClass::new(Scenario::TwoQubitPure, c).unwrap();
        for _ in 0..n {
            let psi = generate_pure_state(&class, ElementDist::Normal, &mut rng).unwrap();
            let rho = qcore::DensityMatrix::from_pure(&psi);
            let t = tomography::correlation_vector(&rho).unwrap();
            let bx = ((t.get(4) + 1.0) / 2.0 * bins as f64) as usize;
            let by = ((t.get(8) + 1.0) / 2.0 * bins as f64) as usize;
            let idx = bx.min(bins - 1) * bins + by.min(bins - 1);
            if c == 0 {
                sep[idx] += 1;
            } else {
                ent[idx] += 1;
            }
        }
    }
    let correct: u64 = sep
        .iter()
        .zip(&ent)
        .map(|(&s, &e)| s.max(e) as u64)
        .sum();
    println!("pair Bayes-accuracy estimate: {:.4}", correct as f64 / (2 * n) as f64);

    // 1D histogram Bayes bound for |b|^2 with the full Schmidt set
    let mut sep1 = vec![0u32; 4000];
    let mut ent1 = vec![0u32; 4000];
    for c in 0..2 {
        let class = SloccClass::new(Scenario::TwoQubitPure, c).unwrap();
        for _ in 0..n {
            let psi = generate_pure_state(&class, ElementDist::Normal, &mut rng).unwrap();
            let rho = qcore::DensityMatrix::from_pure(&psi);
            let t = tomography::correlation_vector(&rho).unwrap();
            let b2 = t.get(4).powi(2) + t.get(8).powi(2) + t.get(12).powi(2);
            let idx = ((b2 * 3999.0) as usize).min(3999);
            if c == 0 {
                sep1[idx] += 1;
            } else {
                ent1[idx] += 1;
            }
        }
    }
    let correct: u64 = sep1
        .iter()
        .zip(&ent1)
        .map(|(&s, &e)| s.max(e) as u64)
        .sum();
    println!(
        "Schmidt-3 histogram Bayes-accuracy estimate: {:.4}",
        correct as f64 / (2 * n) as f64
    );
}
