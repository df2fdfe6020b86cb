//! Acceptance suite: every release criterion, one test each, printing a
//! pass/fail line per criterion. Expensive artifacts (datasets, trained
//! models, rankings) are shared between criteria through lazy fixtures.
//!
//! Run with `cargo test --release -p entclass --test acceptance`.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use attribution::{
    aggregate_trials, exact_shapley, exact_shapley_game, permutation_shapley, rank_aggregate,
    rescale_attribution, BackgroundSet, ImportanceRanking, ShapBackend, ShapConfig,
};
use datagen::{build_dataset, GenConfig, LabeledDataset, Scenario};
use nn::{
    evaluate, gradient_check, registry_spec, train, DataView, LayerSpec, Network, NetworkSpec,
    TrainConfig, Trainer,
};
use qcore::seed::derive_seed;
use reduction::{mask_eval, phase_scan, retrain_with_subset, PhaseFamily};
use witness::{
    check_disjointness, check_redundancy, detection_regime, witness_value, DetectionRegime,
    WitnessSpec,
};

const GLOBAL_SEED: u64 = 20260810;

fn criterion(n: usize, name: &str, checks: Vec<(bool, String)>) {
    let ok = checks.iter().all(|c| c.0);
    println!("criterion {n} [{name}]: {}", if ok { "PASS" } else { "FAIL" });
    for (pass, msg) in &checks {
        println!("    {} {msg}", if *pass { "ok  " } else { "FAIL" });
    }
    assert!(ok, "criterion {n} [{name}] failed");
}

fn view<'a>(split: &'a datagen::Split, dim: usize) -> DataView<'a> {
    DataView::new(&split.features, &split.labels, dim)
}

// ---------------------------------------------------------------------
// fixtures
// ---------------------------------------------------------------------

struct TrainedFixture {
    model: nn::TrainedModel,
    train_time: Duration,
}

fn pure2q_dataset() -> &'static LabeledDataset {
    static DS: OnceLock<LabeledDataset> = OnceLock::new();
    DS.get_or_init(|| {
        build_dataset(&GenConfig::new(
            Scenario::TwoQubitPure,
            10_000,
            derive_seed(GLOBAL_SEED, "ds-2q-pure", 0),
        ))
        .expect("dataset")
    })
}

fn pure2q_model() -> &'static TrainedFixture {
    static MODEL: OnceLock<TrainedFixture> = OnceLock::new();
    MODEL.get_or_init(|| {
        let ds = pure2q_dataset();
        let spec = registry_spec("2q-pure-cnn", 16).expect("registry");
        let cfg = TrainConfig::new(
            vec![(1e-3, 100), (1e-4, 50)],
            64,
            derive_seed(GLOBAL_SEED, "train-2q-pure", 0),
        );
        let start = Instant::now();
        let model = train(&spec, view(&ds.train, 16), view(&ds.test, 16), &cfg).expect("train");
        TrainedFixture {
            model,
            train_time: start.elapsed(),
        }
    })
}

fn pure2q_ranking() -> &'static ImportanceRanking {
    static RANKING: OnceLock<ImportanceRanking> = OnceLock::new();
    RANKING.get_or_init(|| {
        let ds = pure2q_dataset();
        let model = &pure2q_model().model;
        let cfg = ShapConfig {
            backend: ShapBackend::Rescale,
            background: 1_000,
            samples: 100,
            trials: 5,
            seed: derive_seed(GLOBAL_SEED, "shap-2q-pure", 0),
        };
        aggregate_trials(&model.network, &ds.train.features, 16, &cfg)
            .expect("attribution")
            .0
    })
}

fn mixed2q_dataset() -> &'static LabeledDataset {
    static DS: OnceLock<LabeledDataset> = OnceLock::new();
    DS.get_or_init(|| {
        build_dataset(&GenConfig::new(
            Scenario::TwoQubitMixed,
            200_000,
            derive_seed(GLOBAL_SEED, "ds-2q-mixed", 0),
        ))
        .expect("dataset")
    })
}

fn mixed2q_model() -> &'static TrainedFixture {
    static MODEL: OnceLock<TrainedFixture> = OnceLock::new();
    MODEL.get_or_init(|| {
        let ds = mixed2q_dataset();
        let spec = registry_spec("2q-mixed-dnn", 16).expect("registry");
        let cfg = TrainConfig::new(
            vec![(1e-3, 50), (1e-4, 10)],
            64,
            derive_seed(GLOBAL_SEED, "train-2q-mixed", 0),
        );
        let start = Instant::now();
        let model = train(&spec, view(&ds.train, 16), view(&ds.test, 16), &cfg).expect("train");
        TrainedFixture {
            model,
            train_time: start.elapsed(),
        }
    })
}

/// Aggregated importance over five independently initialized desk-scale
/// models (smaller dataset and schedule than the headline model).
fn mixed2q_aggregated_ranking() -> &'static ImportanceRanking {
    static RANKING: OnceLock<ImportanceRanking> = OnceLock::new();
    RANKING.get_or_init(|| {
        let ds = build_dataset(&GenConfig::new(
            Scenario::TwoQubitMixed,
            25_000,
            derive_seed(GLOBAL_SEED, "ds-2q-mixed-rank", 0),
        ))
        .expect("dataset");
        let spec = registry_spec("2q-mixed-dnn", 16).expect("registry");
        let mut per_model = Vec::new();
        for m in 0..5u64 {
            let cfg = TrainConfig::new(
                vec![(1e-3, 30), (1e-4, 5)],
                64,
                derive_seed(GLOBAL_SEED, "train-2q-mixed-rank", m),
            );
            let model = train(&spec, view(&ds.train, 16), view(&ds.test, 16), &cfg)
                .expect("ranking model");
            let shap = ShapConfig {
                backend: ShapBackend::Rescale,
                background: 360,
                samples: 40,
                trials: 8,
                seed: derive_seed(GLOBAL_SEED, "shap-2q-mixed", m),
            };
            let (ranking, _) = aggregate_trials(&model.network, &ds.train.features, 16, &shap)
                .expect("attribution");
            per_model.push(ranking.scores);
        }
        rank_aggregate(&per_model).expect("aggregate")
    })
}

fn mixed3q_dataset() -> &'static LabeledDataset {
    static DS: OnceLock<LabeledDataset> = OnceLock::new();
    DS.get_or_init(|| {
        build_dataset(&GenConfig::new(
            Scenario::ThreeQubitMixed,
            25_000,
            derive_seed(GLOBAL_SEED, "ds-3q-mixed", 0),
        ))
        .expect("dataset")
    })
}

fn mixed3q_model() -> &'static TrainedFixture {
    static MODEL: OnceLock<TrainedFixture> = OnceLock::new();
    MODEL.get_or_init(|| {
        let ds = mixed3q_dataset();
        let spec = registry_spec("3q-mixed-dnn", 64).expect("registry");
        let cfg = TrainConfig::new(
            vec![(1e-3, 50), (1e-4, 10)],
            64,
            derive_seed(GLOBAL_SEED, "train-3q-mixed", 0),
        );
        let start = Instant::now();
        let model = train(&spec, view(&ds.train, 64), view(&ds.test, 64), &cfg).expect("train");
        TrainedFixture {
            model,
            train_time: start.elapsed(),
        }
    })
}

fn mixed3q_ranking() -> &'static ImportanceRanking {
    static RANKING: OnceLock<ImportanceRanking> = OnceLock::new();
    RANKING.get_or_init(|| {
        let ds = mixed3q_dataset();
        let model = &mixed3q_model().model;
        let cfg = ShapConfig {
            backend: ShapBackend::Rescale,
            background: 500,
            samples: 100,
            trials: 5,
            seed: derive_seed(GLOBAL_SEED, "shap-3q-mixed", 0),
        };
        aggregate_trials(&model.network, &ds.train.features, 64, &cfg)
            .expect("attribution")
            .0
    })
}

// ---------------------------------------------------------------------
// criteria
// ---------------------------------------------------------------------

#[test]
fn criterion_01_two_qubit_pure_classification() {
    let fixture = pure2q_model();
    let acc = fixture.model.final_test_acc;
    let secs = fixture.train_time.as_secs_f64();
    criterion(
        1,
        "2q-pure CNN accuracy",
        vec![
            (acc >= 0.98, format!("test accuracy {acc:.4} >= 0.98")),
            (secs < 600.0, format!("training time {secs:.1}s < 600s")),
        ],
    );
}

#[test]
fn criterion_02_schmidt_set_sufficiency() {
    let ds = pure2q_dataset();
    let spec = registry_spec("2q-pure-cnn", 16).unwrap();
    let cfg = TrainConfig::new(
        vec![(1e-3, 100), (1e-4, 50)],
        64,
        derive_seed(GLOBAL_SEED, "schmidt", 0),
    );
    let (_, _, acc3) = retrain_with_subset(ds, &[4, 8, 12], &spec, &cfg).unwrap();
    let mut checks = vec![(
        acc3 >= 0.98,
        format!("Schmidt set {{IX, IY, IZ}} accuracy {acc3:.4} >= 0.98"),
    )];
    for (i, pair) in [[4usize, 8], [4, 12], [8, 12]].iter().enumerate() {
        let mut pair_cfg = cfg.clone();
        pair_cfg.seed = derive_seed(GLOBAL_SEED, "schmidt-pair", i as u64);
        let (_, _, acc2) = retrain_with_subset(ds, pair, &spec, &pair_cfg).unwrap();
        checks.push((
            acc2 >= 0.90,
            format!("pair {pair:?} accuracy {acc2:.4} >= 0.90"),
        ));
        checks.push((
            acc2 <= acc3 - 0.005,
            format!("pair {pair:?} visibly degraded: {acc2:.4} <= {acc3:.4} - 0.005"),
        ));
    }
    criterion(2, "Schmidt-set sufficiency", checks);
}

#[test]
fn criterion_03_two_qubit_mixed() {
    let fixture = mixed2q_model();
    let acc = fixture.model.final_test_acc;
    let secs = fixture.train_time.as_secs_f64();

    let ranking = mixed2q_aggregated_ranking();
    let top9: Vec<usize> = ranking
        .order
        .iter()
        .filter(|&&j| j != 0)
        .take(9)
        .cloned()
        .collect();
    let ds = mixed2q_dataset();
    let spec = registry_spec("2q-mixed-dnn", 16).unwrap();
    let cfg = TrainConfig::new(
        vec![(1e-3, 50), (1e-4, 10)],
        64,
        derive_seed(GLOBAL_SEED, "top9", 0),
    );
    let (_, _, acc9) = retrain_with_subset(ds, &top9, &spec, &cfg).unwrap();
    criterion(
        3,
        "2q-mixed DNN and top-9 reduction",
        vec![
            (acc >= 0.92, format!("test accuracy {acc:.4} >= 0.92")),
            (
                acc9 >= 0.88,
                format!("top-9 {top9:?} retrained accuracy {acc9:.4} >= 0.88"),
            ),
            (secs < 1800.0, format!("training time {secs:.1}s < 1800s")),
        ],
    );
}

#[test]
fn criterion_04_three_qubit_mixed() {
    let fixture = mixed3q_model();
    let acc = fixture.model.final_test_acc;
    let ranking = mixed3q_ranking();
    let top4: Vec<usize> = ranking
        .order
        .iter()
        .filter(|&&j| j != 0)
        .take(4)
        .cloned()
        .collect();
    let ds = mixed3q_dataset();
    let spec = registry_spec("3q-mixed-dnn", 64).unwrap();
    let cfg = TrainConfig::new(
        vec![(1e-3, 50), (1e-4, 10)],
        64,
        derive_seed(GLOBAL_SEED, "top4", 0),
    );
    let (_, _, acc4) = retrain_with_subset(ds, &top4, &spec, &cfg).unwrap();
    criterion(
        4,
        "3q-mixed DNN and top-4 reduction",
        vec![
            (acc >= 0.98, format!("test accuracy {acc:.4} >= 0.98")),
            (
                acc4 >= 0.97,
                format!("top-4 {top4:?} retrained accuracy {acc4:.4} >= 0.97"),
            ),
        ],
    );
}

#[test]
fn criterion_05_ppt_oracle_equivalence() {
    // model vs PPT criterion on fresh Hilbert-Schmidt states
    let model = &mixed2q_model().model.network;
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(GLOBAL_SEED, "hs-agreement", 0));
    let n = 10_000;
    let mut agree = 0usize;
    for _ in 0..n {
        let rho = datagen::sample_density_2q(datagen::ElementDist::Normal, &mut rng).unwrap();
        let label = datagen::label_2q_mixed(&rho).unwrap().index;
        let t = tomography::correlation_vector(&rho).unwrap();
        let pred = model.predict(t.values()).unwrap();
        agree += usize::from(pred == label);
    }
    let agreement = agree as f64 / n as f64;

    // PPT itself against hand-checkable families
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(GLOBAL_SEED, "ppt-cases", 0));
    let mut errors = 0usize;
    for _ in 0..500 {
        // random product state: separable, must be PPT
        let a = random_single_qubit_state(&mut rng);
        let b = random_single_qubit_state(&mut rng);
        let rho = qcore::DensityMatrix::new(a.kron(&b)).unwrap();
        if !qcore::is_ppt(&rho).unwrap() {
            errors += 1;
        }
    }
    let bell = qcore::DensityMatrix::from_pure(&qcore::bell_state());
    let white = qcore::DensityMatrix::maximally_mixed(4);
    for i in 0..500 {
        // Werner state above the 1/3 threshold: entangled, must not be PPT
        let p = 1.0 / 3.0 + 1e-3 + (1.0 - 1.0 / 3.0 - 1e-3) * (i as f64 / 499.0);
        let rho = qcore::DensityMatrix::mixture(&[(p, &bell), (1.0 - p, &white)]).unwrap();
        if qcore::is_ppt(&rho).unwrap() {
            errors += 1;
        }
    }
    criterion(
        5,
        "PPT oracle equivalence",
        vec![
            (
                agreement >= 0.92,
                format!("model vs PPT agreement on Hilbert-Schmidt states {agreement:.4} >= 0.92"),
            ),
            (
                errors == 0,
                format!("hand-checkable PPT cases: {errors} errors out of 1000"),
            ),
        ],
    );
}

fn random_single_qubit_state(rng: &mut impl Rng) -> qcore::ComplexMatrix {
    let g: Vec<qcore::Complex64> = (0..4)
        .map(|_| {
            let u: f64 = rng.random_range(f64::EPSILON..=1.0);
            let v: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let r = (-2.0 * u.ln()).sqrt();
            qcore::Complex64::new(r * v.cos(), r * v.sin())
        })
        .collect();
    let x = qcore::ComplexMatrix::from_rows(2, 2, &g).unwrap();
    let xx = x.matmul(&x.adjoint());
    let tr = xx.trace().re;
    xx.scale(qcore::Complex64::new(1.0 / tr, 0.0))
}

#[test]
fn criterion_06_shapley_correctness_suite() {
    let mut checks = Vec::new();

    // (a) tabulated 3-player game, hand-computed values (5/3, 8/3, 11/3)
    let game = |mask: u32| -> f64 {
        [0.0, 1.0, 2.0, 4.0, 3.0, 5.0, 6.0, 8.0][mask as usize]
    };
    let chi = exact_shapley_game(3, &game).unwrap();
    let want = [5.0 / 3.0, 8.0 / 3.0, 11.0 / 3.0];
    let game_ok = chi
        .iter()
        .zip(&want)
        .all(|(a, b)| (a - b).abs() < 1e-12);
    checks.push((
        game_ok,
        format!("exact backend reproduces the 3-player game: {chi:?}"),
    ));

    // a small trained model on 16 features shared by (b)-(d)
    let ds = build_dataset(&GenConfig::new(
        Scenario::TwoQubitPure,
        500,
        derive_seed(GLOBAL_SEED, "shap-suite-ds", 0),
    ))
    .unwrap();
    let spec = NetworkSpec::new(
        16,
        vec![LayerSpec::dense_relu(16), LayerSpec::head(2)],
        2,
    )
    .unwrap();
    let cfg = TrainConfig::new(vec![(1e-3, 20)], 32, derive_seed(GLOBAL_SEED, "shap-suite", 0));
    let model = train(&spec, view(&ds.train, 16), view(&ds.test, 16), &cfg).unwrap();
    let net = &model.network;
    let bg_rows = 8usize;
    let background = BackgroundSet::new(&ds.train.features[..bg_rows * 16], 16);
    let x = ds.train.row(16, 100);

    // (b) null player: the identity feature is constant everywhere
    let exact = exact_shapley(net, x, background).unwrap();
    let rescale = rescale_attribution(net, x, background).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(GLOBAL_SEED, "shap-suite-perm", 0));
    let (perm, se) = permutation_shapley(net, x, background, 400, &mut rng).unwrap();
    let null_ok = (0..2).all(|c| {
        exact.get(0, c) == 0.0 && rescale.get(0, c) == 0.0 && perm.get(0, c) == 0.0
    });
    checks.push((null_ok, "null player gets exactly zero in all backends".into()));

    // (c) additivity to 1e-9 for the exact and rescale backends
    let fx = net.logits(x).unwrap();
    let mut mean_f = vec![0.0; 2];
    for b in 0..bg_rows {
        let l = net.logits(background.row(b)).unwrap();
        for c in 0..2 {
            mean_f[c] += l[c] / bg_rows as f64;
        }
    }
    let add_ok = |a: &attribution::Attributions| {
        a.class_sums()
            .iter()
            .zip(&mean_f)
            .zip(&fx)
            .all(|((s, m), f)| (s - (f - m)).abs() < 1e-9)
    };
    checks.push((
        add_ok(&exact) && add_ok(&rescale),
        "additivity identity within 1e-9 (exact, rescale)".into(),
    ));

    // (d) permutation backend converges to exact within 3 standard errors
    let mut worst = 0.0f64;
    let perm_ok = (0..16).all(|j| {
        (0..2).all(|c| {
            let err = (perm.get(j, c) - exact.get(j, c)).abs();
            let bound = 3.0 * se.get(j, c) + 1e-12;
            worst = worst.max(err / bound.max(1e-300));
            err <= bound
        })
    });
    checks.push((
        perm_ok,
        format!("permutation vs exact within 3 SE on 16 features (worst ratio {worst:.2})"),
    ));

    // (e) rescale equals exact on a linear model to 1e-10
    let lin_spec = NetworkSpec::new(16, vec![LayerSpec::head(2)], 2).unwrap();
    let lin = Network::from_spec(&lin_spec, derive_seed(GLOBAL_SEED, "linear", 0)).unwrap();
    let le = exact_shapley(&lin, x, background).unwrap();
    let lr = rescale_attribution(&lin, x, background).unwrap();
    let lin_ok = (0..16).all(|j| {
        (0..2).all(|c| (le.get(j, c) - lr.get(j, c)).abs() < 1e-10)
    });
    checks.push((lin_ok, "rescale equals exact on linear models to 1e-10".into()));

    criterion(6, "Shapley correctness suite", checks);
}

#[test]
fn criterion_07_witness_math() {
    let samples = 100_000;
    let red = check_redundancy(
        &WitnessSpec::ghz_three_quarters(),
        &WitnessSpec::ghz_half(),
        samples,
        derive_seed(GLOBAL_SEED, "redundancy", 0),
    )
    .unwrap();
    let dis = check_disjointness(
        &WitnessSpec::w_two_thirds(),
        &WitnessSpec::ghz_half(),
        samples,
        derive_seed(GLOBAL_SEED, "disjointness", 0),
    )
    .unwrap();

    // coefficient tables against the trace oracle on all 64 strings
    let rho_ghz = qcore::DensityMatrix::from_pure(&qcore::ghz_state());
    let rho_w = qcore::DensityMatrix::from_pure(&qcore::w_state());
    let t_ghz = tomography::correlation_vector(&rho_ghz).unwrap();
    let t_w = tomography::correlation_vector(&rho_w).unwrap();
    let ghz_table = witness::projector_pauli_coefficients(witness::ReferenceState::Ghz);
    let w_table = witness::projector_pauli_coefficients(witness::ReferenceState::W);
    let tables_ok = (0..64).all(|j| {
        (ghz_table.coefficient(j) - t_ghz.get(j)).abs() < 1e-10
            && (w_table.coefficient(j) - t_w.get(j)).abs() < 1e-10
    });

    // regime boundary by bisection on the witness value
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(GLOBAL_SEED, "beta-bracket", 0));
    let phi = qcore::ghz_state();
    let complement = qcore::orthonormal_complement(&phi, 1e-8);
    let mut worst = 0.0f64;
    for _ in 0..1_000 {
        let alpha: f64 = rng.random_range(0.2..0.95);
        let gamma: f64 = rng.random_range((alpha + 0.01).min(0.99)..1.0);
        let w = WitnessSpec::new(alpha, phi.clone()).unwrap();
        // deterministic state with exact overlap gamma
        let amps: Vec<qcore::Complex64> = phi
            .amplitudes()
            .iter()
            .zip(complement[0].amplitudes())
            .map(|(a, b)| a * gamma.sqrt() + b * (1.0 - gamma).sqrt())
            .collect();
        let psi = qcore::PureState::new(amps).unwrap();
        let beta_max = match detection_regime(alpha, gamma) {
            DetectionRegime::Conditional { beta_max } => beta_max,
            other => panic!("gamma > alpha must be conditional, got {other:?}"),
        };
        let f = |beta: f64| {
            witness_value(&w, &qcore::DensityMatrix::depolarized(&psi, beta)).unwrap()
        };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        assert!(f(lo) < 0.0 && f(hi) > 0.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        worst = worst.max((0.5 * (lo + hi) - beta_max).abs());
    }

    criterion(
        7,
        "witness math",
        vec![
            (
                red.holds,
                format!("redundancy holds over {samples} samples ({} violations)", red.violations),
            ),
            (
                dis.holds,
                format!(
                    "disjointness holds over {samples} samples ({} violations)",
                    dis.violations
                ),
            ),
            (tables_ok, "Pauli tables match the trace oracle on all 64 strings".into()),
            (
                worst < 1e-6,
                format!("beta_max bracketing error {worst:.2e} < 1e-6"),
            ),
        ],
    );
}

#[test]
fn criterion_08_relative_phase_boundaries() {
    use std::f64::consts::PI;
    let model = &mixed3q_model().model.network;
    let ghz = phase_scan(model, PhaseFamily::Ghz { points: 721 }).unwrap();
    let near_half_pi = |t: f64| (t.abs() - PI / 2.0).abs() <= 0.1;
    let crossings_ok = !ghz.crossings.is_empty() && ghz.crossings.iter().all(|&t| near_half_pi(t));
    let has_both_sides = ghz.crossings.iter().any(|&t| t > 0.0)
        && ghz.crossings.iter().any(|&t| t < 0.0);

    let w = phase_scan(model, PhaseFamily::W { points_per_axis: 101 }).unwrap();
    criterion(
        8,
        "relative-phase boundaries",
        vec![
            (
                crossings_ok && has_both_sides,
                format!("GHZ crossings {:?} within 0.1 of +-pi/2", ghz.crossings),
            ),
            (
                w.agreement >= 0.95,
                format!("W-phase grid agreement {:.4} >= 0.95", w.agreement),
            ),
        ],
    );
}

#[test]
fn criterion_09_gradient_checks() {
    let dense = NetworkSpec::new(
        6,
        vec![
            LayerSpec::dense_relu(10),
            LayerSpec::dense_relu(5),
            LayerSpec::head(3),
        ],
        3,
    )
    .unwrap();
    let conv = NetworkSpec::new(
        12,
        vec![
            LayerSpec::conv(4),
            LayerSpec::conv(3),
            LayerSpec::Flatten,
            LayerSpec::dense_relu(8),
            LayerSpec::head(2),
        ],
        2,
    )
    .unwrap();
    let dense_err = gradient_check(&dense, 8, derive_seed(GLOBAL_SEED, "gc-dense", 0)).unwrap();
    let conv_err = gradient_check(&conv, 6, derive_seed(GLOBAL_SEED, "gc-conv", 0)).unwrap();
    criterion(
        9,
        "gradient checks",
        vec![
            (
                dense_err < 1e-4,
                format!("dense max relative error {dense_err:.2e} < 1e-4"),
            ),
            (
                conv_err < 1e-4,
                format!("conv max relative error {conv_err:.2e} < 1e-4"),
            ),
        ],
    );
}

#[test]
fn criterion_10_permutation_equivariance() {
    let ds = build_dataset(&GenConfig::new(
        Scenario::TwoQubitPure,
        500,
        derive_seed(GLOBAL_SEED, "equivariance-ds", 0),
    ))
    .unwrap();
    let dim = 16usize;
    let spec = NetworkSpec::new(
        dim,
        vec![
            LayerSpec::dense_relu(32),
            LayerSpec::dense_relu(16),
            LayerSpec::head(2),
        ],
        2,
    )
    .unwrap();
    let mut cfg = TrainConfig::new(
        vec![(1e-3, 15)],
        32,
        derive_seed(GLOBAL_SEED, "equivariance", 0),
    );
    cfg.order_invariant_first = true;

    // a fixed non-trivial permutation
    let pi: Vec<usize> = {
        let mut pi: Vec<usize> = (0..dim).collect();
        let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(GLOBAL_SEED, "equivariance-pi", 0));
        use rand::seq::SliceRandom;
        pi.shuffle(&mut rng);
        pi
    };

    // base run
    let mut base_trainer = Trainer::new(&spec, &cfg).unwrap();
    base_trainer
        .run(view(&ds.train, dim), view(&ds.test, dim))
        .unwrap();
    let base = base_trainer
        .finish(view(&ds.train, dim), view(&ds.test, dim))
        .unwrap();

    // joint permutation of data and initial weights
    let mut init = Network::from_spec(&spec, derive_seed(cfg.seed, "weight-init", 0)).unwrap();
    nn::permute_dense_first_layer(&mut init, &pi).unwrap();
    let ptrain = nn::permute_columns(&ds.train.features, dim, &pi).unwrap();
    let ptest = nn::permute_columns(&ds.test.features, dim, &pi).unwrap();
    let ptrain_view = DataView::new(&ptrain, &ds.train.labels, dim);
    let ptest_view = DataView::new(&ptest, &ds.test.labels, dim);
    let mut perm_trainer = Trainer::from_network(init, &cfg);
    perm_trainer.run(ptrain_view, ptest_view).unwrap();
    let permuted = perm_trainer.finish(ptrain_view, ptest_view).unwrap();

    let history_ok = base.history.len() == permuted.history.len()
        && base.history.iter().zip(&permuted.history).all(|(a, b)| {
            a.train_acc.to_bits() == b.train_acc.to_bits()
                && a.test_acc.to_bits() == b.test_acc.to_bits()
                && a.train_loss.to_bits() == b.train_loss.to_bits()
                && a.test_loss.to_bits() == b.test_loss.to_bits()
        });

    // attributions permute with pi, bitwise, under the rescale backend
    let kb = 32usize;
    let background = BackgroundSet::new(&ds.train.features[..kb * dim], dim);
    let pbackground_flat = nn::permute_columns(&ds.train.features[..kb * dim], dim, &pi).unwrap();
    let pbackground = BackgroundSet::new(&pbackground_flat, dim);
    let mut attr_ok = true;
    for r in 0..10 {
        let x = ds.test.row(dim, r);
        let xp = nn::permute_columns(x, dim, &pi).unwrap();
        let a = rescale_attribution(&base.network, x, background).unwrap();
        let b = rescale_attribution(&permuted.network, &xp, pbackground).unwrap();
        for j in 0..dim {
            for c in 0..2 {
                attr_ok &= a.get(j, c).to_bits() == b.get(pi[j], c).to_bits();
            }
        }
    }

    criterion(
        10,
        "joint permutation equivariance",
        vec![
            (history_ok, "training curves bit-identical under joint permutation".into()),
            (attr_ok, "attributions permute with pi bitwise (rescale backend)".into()),
        ],
    );
}

#[test]
fn criterion_11_masking_negative_result() {
    let ds = pure2q_dataset();
    let model = &pure2q_model().model;
    let ranking = pure2q_ranking();
    let top3: Vec<usize> = ranking
        .order
        .iter()
        .filter(|&&j| j != 0)
        .take(3)
        .cloned()
        .collect();
    let masked_acc = mask_eval(
        &model.network,
        &ds.test.features,
        &ds.test.labels,
        &top3,
        0.0,
    )
    .unwrap();

    let keep: Vec<usize> = (0..16).filter(|j| !top3.contains(j) && *j != 0).collect();
    let spec = registry_spec("2q-pure-cnn", 16).unwrap();
    let cfg = TrainConfig::new(
        vec![(1e-3, 100), (1e-4, 50)],
        64,
        derive_seed(GLOBAL_SEED, "mask-retrain", 0),
    );
    let (_, _, retrained_acc) = retrain_with_subset(ds, &keep, &spec, &cfg).unwrap();
    criterion(
        11,
        "masking negative result",
        vec![
            (
                masked_acc < 0.60,
                format!("masking top-3 {top3:?} drops accuracy to {masked_acc:.4} < 0.60"),
            ),
            (
                retrained_acc > 0.95,
                format!("retraining on the other 13 features keeps {retrained_acc:.4} > 0.95"),
            ),
        ],
    );
}

#[test]
fn criterion_12_block_structure() {
    let ranking = mixed2q_aggregated_ranking();
    // sigma_1 x sigma_3 -> 13, sigma_2 x sigma_3 -> 14,
    // sigma_3 x sigma_1 -> 7, sigma_3 x sigma_2 -> 11
    let z_correlations = [13usize, 14, 7, 11];
    let top5 = ranking.top(5);
    let block_ok = z_correlations.iter().all(|j| top5.contains(j));
    let identity_last = *ranking.order.last().unwrap() == 0;
    criterion(
        12,
        "2q-mixed block structure",
        vec![
            (
                block_ok,
                format!("Z-correlation block {z_correlations:?} inside top-5 {top5:?}"),
            ),
            (
                identity_last,
                format!("identity ranked last (order: {:?})", ranking.order),
            ),
        ],
    );
}
