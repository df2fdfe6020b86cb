//! Dataset assembly, binary container, and CSV export.
//!
//! Layout: balanced classes, shuffled rows, train/test split with
//! test = train/10 per class (and optional dev/validation with the same
//! tenth rule). Features are correlation vectors in lexicographic order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qcore::seed::derive_seed;
use qcore::DensityMatrix;
use tomography::{correlation_vector, perturb_with_shots, CorrelationVector, ShotConfig};
use witness::WitnessSpec;

use crate::config::{GenConfig, Scenario, ShotScope, SloccClass};
use crate::lio::generate_pure_state;
use crate::mixed2q::{label_2q_mixed, sample_density_2q};
use crate::mixed3q::{generate_3q_mixed, CapRegion};
use crate::DatagenError;

const MAGIC: &[u8; 8] = b"ENTDSET1";
const FORMAT_VERSION: u32 = 1;

/// One split: row-major features plus integer labels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Split {
    pub features: Vec<f64>,
    pub labels: Vec<i32>,
}

impl Split {
    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn row(&self, dim: usize, r: usize) -> &[f64] {
        &self.features[r * dim..(r + 1) * dim]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub scenario: Scenario,
    pub per_class: usize,
    pub dist: crate::config::ElementDist,
    pub seed: u64,
    pub shots: Option<u64>,
    pub shot_scope: ShotScope,
    pub dev_per_class: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub num_qubits: usize,
    pub num_classes: usize,
    pub feature_dim: usize,
    pub train: Split,
    pub test: Split,
    pub dev: Split,
    pub validation: Split,
    pub meta: DatasetMeta,
}

impl LabeledDataset {
    pub fn train_rows(&self) -> usize {
        self.train.rows()
    }

    /// Restricts every split to the given feature columns, in the given
    /// order. The result remembers nothing about dropped columns; models
    /// trained on it carry the column list separately.
    pub fn restrict_columns(&self, keep: &[usize]) -> Result<LabeledDataset, DatagenError> {
        if keep.is_empty() {
            return Err(DatagenError::BadConfig("empty column set".into()));
        }
        if keep.iter().any(|&j| j >= self.feature_dim) {
            return Err(DatagenError::BadConfig(format!(
                "column out of range for dim {}",
                self.feature_dim
            )));
        }
        let narrow = |s: &Split| -> Split {
            let rows = s.rows();
            let mut features = Vec::with_capacity(rows * keep.len());
            for r in 0..rows {
                let row = s.row(self.feature_dim, r);
                features.extend(keep.iter().map(|&j| row[j]));
            }
            Split {
                features,
                labels: s.labels.clone(),
            }
        };
        Ok(LabeledDataset {
            num_qubits: self.num_qubits,
            num_classes: self.num_classes,
            feature_dim: keep.len(),
            train: narrow(&self.train),
            test: narrow(&self.test),
            dev: narrow(&self.dev),
            validation: narrow(&self.validation),
            meta: self.meta.clone(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), DatagenError> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(self.num_qubits as u32).to_le_bytes())?;
        w.write_all(&(self.num_classes as u32).to_le_bytes())?;
        w.write_all(&(self.feature_dim as u32).to_le_bytes())?;
        let meta = serde_json::to_vec(&self.meta)?;
        w.write_all(&(meta.len() as u64).to_le_bytes())?;
        w.write_all(&meta)?;
        for split in [&self.train, &self.test, &self.dev, &self.validation] {
            w.write_all(&(split.rows() as u64).to_le_bytes())?;
            for v in &split.features {
                w.write_all(&v.to_le_bytes())?;
            }
            for l in &split.labels {
                w.write_all(&l.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<LabeledDataset, DatagenError> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(DatagenError::BadFile("bad magic".into()));
        }
        let version = read_u32(&mut r)?;
        if version != FORMAT_VERSION {
            return Err(DatagenError::BadFile(format!(
                "unsupported version {version}"
            )));
        }
        let num_qubits = read_u32(&mut r)? as usize;
        let num_classes = read_u32(&mut r)? as usize;
        let feature_dim = read_u32(&mut r)? as usize;
        let meta_len = read_u64(&mut r)? as usize;
        let mut meta_buf = vec![0u8; meta_len];
        r.read_exact(&mut meta_buf)?;
        let meta: DatasetMeta = serde_json::from_slice(&meta_buf)?;
        let mut splits = Vec::with_capacity(4);
        for _ in 0..4 {
            let rows = read_u64(&mut r)? as usize;
            let mut features = vec![0.0f64; rows * feature_dim];
            let mut buf = [0u8; 8];
            for v in &mut features {
                r.read_exact(&mut buf)?;
                *v = f64::from_le_bytes(buf);
            }
            let mut labels = vec![0i32; rows];
            let mut lbuf = [0u8; 4];
            for l in &mut labels {
                r.read_exact(&mut lbuf)?;
                *l = i32::from_le_bytes(lbuf);
            }
            splits.push(Split { features, labels });
        }
        let validation = splits.pop().expect("four splits");
        let dev = splits.pop().expect("four splits");
        let test = splits.pop().expect("four splits");
        let train = splits.pop().expect("four splits");
        Ok(LabeledDataset {
            num_qubits,
            num_classes,
            feature_dim,
            train,
            test,
            dev,
            validation,
            meta,
        })
    }

    /// CSV export of one split with header T_0,...,T_{4^N-1},label.
    pub fn export_csv(&self, path: &Path, split: &Split) -> Result<(), DatagenError> {
        let mut w = BufWriter::new(File::create(path)?);
        let header: Vec<String> = (0..self.feature_dim).map(|j| format!("T_{j}")).collect();
        writeln!(w, "{},label", header.join(","))?;
        for r in 0..split.rows() {
            let row = split.row(self.feature_dim, r);
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            writeln!(w, "{},{}", cells.join(","), split.labels[r])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32, DatagenError> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(r: &mut impl Read) -> Result<u64, DatagenError> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

/// One example: the state for (class c, example i) under the stage label,
/// as an ideal correlation vector.
fn example_vector(
    cfg: &GenConfig,
    stage: &str,
    class: usize,
    index: usize,
) -> Result<CorrelationVector, DatagenError> {
    let seed = derive_seed(
        derive_seed(cfg.seed, stage, class as u64),
        "example",
        index as u64,
    );
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let rho: DensityMatrix = match cfg.scenario {
        Scenario::TwoQubitPure | Scenario::ThreeQubitPure => {
            let slocc = SloccClass::new(cfg.scenario, class)?;
            let psi = generate_pure_state(&slocc, cfg.dist, &mut rng)?;
            DensityMatrix::from_pure(&psi)
        }
        Scenario::TwoQubitMixed => {
            // rejection-sample until the PPT label matches the quota class
            loop {
                let rho = sample_density_2q(cfg.dist, &mut rng)?;
                if label_2q_mixed(&rho)?.index == class {
                    break rho;
                }
            }
        }
        Scenario::ThreeQubitMixed => {
            let w_wit = WitnessSpec::w_two_thirds();
            let g_wit = WitnessSpec::ghz_half();
            // alternate the structure witness across examples
            let (anchor, other) = if index % 2 == 0 {
                (&w_wit, &g_wit)
            } else {
                (&g_wit, &w_wit)
            };
            let region = if class == 1 {
                CapRegion::Detected
            } else {
                CapRegion::Undetected
            };
            generate_3q_mixed(anchor, other, region, &mut rng)?
        }
    };
    Ok(correlation_vector(&rho)?)
}

fn shots_apply(scope: ShotScope, stage: &str) -> bool {
    match scope {
        ShotScope::Both => true,
        ShotScope::TrainOnly => stage == "train" || stage == "dev",
        ShotScope::TestOnly => stage == "test" || stage == "validation",
    }
}

fn build_split(cfg: &GenConfig, stage: &str, per_class: usize) -> Result<Split, DatagenError> {
    let classes = cfg.scenario.num_classes();
    let dim = cfg.scenario.feature_dim();
    let total = classes * per_class;
    let mut features = vec![0.0f64; total * dim];
    let mut labels = vec![0i32; total];

    let rows: Vec<(usize, Result<CorrelationVector, DatagenError>)> = (0..total)
        .into_par_iter()
        .map(|g| {
            let class = g / per_class;
            let index = g % per_class;
            let mut t = example_vector(cfg, stage, class, index);
            if let (Ok(vec), Some(m)) = (&mut t, cfg.shots) {
                if shots_apply(cfg.shot_scope, stage) {
                    let shot_seed = derive_seed(
                        derive_seed(cfg.seed, "shots", class as u64),
                        stage,
                        index as u64,
                    );
                    *vec = perturb_with_shots(
                        vec,
                        &ShotConfig {
                            shots_per_setting: m,
                            seed: shot_seed,
                        },
                    );
                }
            }
            (g, t)
        })
        .collect();

    for (g, t) in rows {
        let t = t?;
        let class = g / per_class;
        features[g * dim..(g + 1) * dim].copy_from_slice(t.values());
        labels[g] = class as i32;
    }

    // shuffle rows so batches mix classes
    let mut order: Vec<usize> = (0..total).collect();
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(cfg.seed, "shuffle-split", hash(stage)));
    order.shuffle(&mut rng);
    let mut shuffled = Split {
        features: vec![0.0; total * dim],
        labels: vec![0; total],
    };
    for (new_r, &old_r) in order.iter().enumerate() {
        shuffled.features[new_r * dim..(new_r + 1) * dim]
            .copy_from_slice(&features[old_r * dim..(old_r + 1) * dim]);
        shuffled.labels[new_r] = labels[old_r];
    }
    Ok(shuffled)
}

fn hash(s: &str) -> u64 {
    s.bytes().fold(0u64, |h, b| h.wrapping_mul(131).wrapping_add(b as u64))
}

/// Builds the balanced, shuffled, split dataset. Deterministic per seed:
/// two runs produce byte-identical files.
pub fn build_dataset(cfg: &GenConfig) -> Result<LabeledDataset, DatagenError> {
    cfg.validate()?;
    let train = build_split(cfg, "train", cfg.per_class)?;
    let test = build_split(cfg, "test", cfg.per_class / 10)?;
    let (dev, validation) = if cfg.dev_per_class > 0 {
        (
            build_split(cfg, "dev", cfg.dev_per_class)?,
            build_split(cfg, "validation", cfg.dev_per_class / 10)?,
        )
    } else {
        (Split::default(), Split::default())
    };
    Ok(LabeledDataset {
        num_qubits: cfg.scenario.num_qubits(),
        num_classes: cfg.scenario.num_classes(),
        feature_dim: cfg.scenario.feature_dim(),
        train,
        test,
        dev,
        validation,
        meta: DatasetMeta {
            scenario: cfg.scenario,
            per_class: cfg.per_class,
            dist: cfg.dist,
            seed: cfg.seed,
            shots: cfg.shots,
            shot_scope: cfg.shot_scope,
            dev_per_class: cfg.dev_per_class,
        },
    })
}
