//! Mini-batch training with Adam and a phased learning-rate schedule.
//!
//! Determinism contract: for a fixed seed the full training trajectory is
//! bit-identical regardless of worker-thread count. Batch gradients are
//! summed per fixed-size row chunk and the chunk partials are reduced in
//! chunk order.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qcore::seed::derive_seed;

use crate::network::{argmax, softmax_in_place, Layer, Network, Trace};
use crate::spec::NetworkSpec;
use crate::NnError;

/// Rows processed per gradient chunk; fixed so the reduction order never
/// depends on thread count.
const CHUNK_ROWS: usize = 8;

/// Borrowed view of a feature matrix with integer labels.
#[derive(Debug, Clone, Copy)]
pub struct DataView<'a> {
    pub features: &'a [f64],
    pub labels: &'a [i32],
    pub dim: usize,
}

impl<'a> DataView<'a> {
    pub fn new(features: &'a [f64], labels: &'a [i32], dim: usize) -> Self {
        assert_eq!(features.len(), labels.len() * dim, "ragged data view");
        Self {
            features,
            labels,
            dim,
        }
    }

    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn row(&self, r: usize) -> &'a [f64] {
        &self.features[r * self.dim..(r + 1) * self.dim]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamParams {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// One learning-rate phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub learning_rate: f64,
    pub epochs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub phases: Vec<Phase>,
    pub batch_size: usize,
    pub seed: u64,
    #[serde(default)]
    pub adam: AdamParams,
    /// Dropout probability applied after every hidden dense layer during
    /// training. Kept for the hyperparameter sweeps; final models train
    /// without it.
    #[serde(default)]
    pub dropout: Option<f64>,
    /// Order-invariant first-layer sums (see `Network::order_invariant_first`).
    #[serde(default)]
    pub order_invariant_first: bool,
}

impl TrainConfig {
    pub fn new(phases: Vec<(f64, usize)>, batch_size: usize, seed: u64) -> Self {
        Self {
            phases: phases
                .into_iter()
                .map(|(learning_rate, epochs)| Phase {
                    learning_rate,
                    epochs,
                })
                .collect(),
            batch_size,
            seed,
            adam: AdamParams::default(),
            dropout: None,
            order_invariant_first: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_acc: f64,
    pub test_acc: f64,
    pub train_loss: f64,
    pub test_loss: f64,
}

#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub network: Network,
    pub history: Vec<EpochStats>,
    pub final_train_acc: f64,
    pub final_test_acc: f64,
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    params: AdamParams,
}

impl Adam {
    fn new(n: usize, params: AdamParams) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
            params,
        }
    }

    fn step(&mut self, theta: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let AdamParams {
            beta1,
            beta2,
            epsilon,
        } = self.params;
        let bc1 = 1.0 - beta1.powi(self.t as i32);
        let bc2 = 1.0 - beta2.powi(self.t as i32);
        for i in 0..theta.len() {
            let g = grad[i];
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
            let mhat = self.m[i] / bc1;
            let vhat = self.v[i] / bc2;
            theta[i] -= lr * mhat / (vhat.sqrt() + epsilon);
        }
    }
}

/// Incremental trainer. Owns the network and optimizer state so callers can
/// interleave phases with dataset refreshes (fresh-sample augmentation).
pub struct Trainer {
    net: Network,
    adam: Adam,
    cfg: TrainConfig,
    epoch: usize,
    history: Vec<EpochStats>,
}

impl Trainer {
    pub fn new(spec: &NetworkSpec, cfg: &TrainConfig) -> Result<Self, NnError> {
        let mut net = Network::from_spec(spec, derive_seed(cfg.seed, "weight-init", 0))?;
        net.order_invariant_first = cfg.order_invariant_first;
        Ok(Self::from_network(net, cfg))
    }

    /// Starts from an externally prepared network (e.g. permuted initial
    /// weights). Adam state starts fresh.
    pub fn from_network(mut net: Network, cfg: &TrainConfig) -> Self {
        net.order_invariant_first = cfg.order_invariant_first;
        let n = net.num_params();
        Self {
            net,
            adam: Adam::new(n, cfg.adam),
            cfg: cfg.clone(),
            epoch: 0,
            history: Vec::new(),
        }
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn history(&self) -> &[EpochStats] {
        &self.history
    }

    /// Runs `epochs` epochs at the given rate, recording per-epoch stats.
    /// Train accuracy/loss are aggregated from the pre-update forward passes
    /// of each batch; test metrics come from a full pass after the epoch.
    pub fn train_epochs(
        &mut self,
        train: DataView,
        test: DataView,
        lr: f64,
        epochs: usize,
    ) -> Result<(), NnError> {
        if train.dim != self.net.input_dim() {
            return Err(NnError::DimMismatch {
                expected: self.net.input_dim(),
                got: train.dim,
            });
        }
        let rows = train.rows();
        if rows == 0 {
            return Err(NnError::BadSpec("empty training set".into()));
        }
        if self.cfg.dropout.is_some() {
            // mask backprop folds through the scaled output, which is only
            // valid for ReLU hidden layers
            use crate::spec::{Activation, LayerSpec};
            let bad = self.net.spec().layers.iter().rev().skip(1).any(|l| {
                matches!(l, LayerSpec::Dense { activation, .. } if *activation != Activation::Relu)
            });
            if bad {
                return Err(NnError::BadSpec(
                    "dropout supports ReLU hidden dense layers only".into(),
                ));
            }
        }
        let mut order: Vec<usize> = (0..rows).collect();
        let mut grad = vec![0.0; self.net.num_params()];

        for _ in 0..epochs {
            let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(
                self.cfg.seed,
                "shuffle",
                self.epoch as u64,
            ));
            order.shuffle(&mut rng);

            let mut seen = 0usize;
            let mut correct = 0usize;
            let mut loss_sum = 0.0f64;

            for (batch_idx, batch) in order.chunks(self.cfg.batch_size).enumerate() {
                let scale = 1.0 / batch.len() as f64;
                let partials: Vec<(Vec<f64>, f64, usize)> = batch
                    .par_chunks(CHUNK_ROWS)
                    .map(|chunk| {
                        let mut local = vec![0.0; self.net.num_params()];
                        let mut trace = self.net.make_trace();
                        let mut back = Backward::new(&self.net);
                        let mut closs = 0.0;
                        let mut ccorrect = 0usize;
                        for &r in chunk {
                            let x = train.row(r);
                            let y = train.labels[r] as usize;
                            match self.cfg.dropout {
                                Some(p) => self.net.forward_trace_dropout(
                                    x,
                                    &mut trace,
                                    &crate::network::DropoutCtx {
                                        p,
                                        seed: self.cfg.seed,
                                        epoch: self.epoch,
                                        row: r,
                                    },
                                ),
                                None => self.net.forward_trace(x, &mut trace),
                            }
                            let (loss, pred) = loss_and_pred(trace.logits(), y);
                            closs += loss;
                            ccorrect += (pred == y) as usize;
                            back.accumulate(&self.net, x, &trace, y, scale, &mut local);
                        }
                        (local, closs, ccorrect)
                    })
                    .collect();

                grad.iter_mut().for_each(|g| *g = 0.0);
                let mut batch_loss = 0.0;
                for (local, closs, ccorrect) in partials {
                    for (g, l) in grad.iter_mut().zip(&local) {
                        *g += l;
                    }
                    batch_loss += closs;
                    correct += ccorrect;
                }
                batch_loss /= batch.len() as f64;
                loss_sum += batch_loss * batch.len() as f64;
                seen += batch.len();
                if !batch_loss.is_finite() {
                    return Err(NnError::NonFiniteLoss {
                        epoch: self.epoch,
                        batch: batch_idx,
                        lr,
                    });
                }
                self.adam.step(&mut self.net.params, &grad, lr);
            }

            let (test_acc, test_loss) = evaluate(&self.net, test)?;
            self.history.push(EpochStats {
                epoch: self.epoch,
                train_acc: correct as f64 / seen as f64,
                test_acc,
                train_loss: loss_sum / seen as f64,
                test_loss,
            });
            self.epoch += 1;
        }
        Ok(())
    }

    /// Runs every configured phase on a fixed dataset.
    pub fn run(&mut self, train: DataView, test: DataView) -> Result<(), NnError> {
        for phase in self.cfg.phases.clone() {
            self.train_epochs(train, test, phase.learning_rate, phase.epochs)?;
        }
        Ok(())
    }

    pub fn finish(self, train: DataView, test: DataView) -> Result<TrainedModel, NnError> {
        let (final_train_acc, _) = evaluate(&self.net, train)?;
        let (final_test_acc, _) = evaluate(&self.net, test)?;
        Ok(TrainedModel {
            network: self.net,
            history: self.history,
            final_train_acc,
            final_test_acc,
        })
    }
}

/// Trains a fresh network through all configured phases.
pub fn train(
    spec: &NetworkSpec,
    train_data: DataView,
    test_data: DataView,
    cfg: &TrainConfig,
) -> Result<TrainedModel, NnError> {
    let mut trainer = Trainer::new(spec, cfg)?;
    trainer.run(train_data, test_data)?;
    trainer.finish(train_data, test_data)
}

/// Accuracy (argmax, ties to the lowest class index) and mean cross-entropy.
pub fn evaluate(net: &Network, data: DataView) -> Result<(f64, f64), NnError> {
    if data.dim != net.input_dim() {
        return Err(NnError::DimMismatch {
            expected: net.input_dim(),
            got: data.dim,
        });
    }
    let rows = data.rows();
    if rows == 0 {
        return Ok((0.0, 0.0));
    }
    let idx: Vec<usize> = (0..rows).collect();
    let partials: Vec<(usize, f64)> = idx
        .par_chunks(256)
        .map(|chunk| {
            let mut trace = net.make_trace();
            let mut correct = 0usize;
            let mut loss = 0.0;
            for &r in chunk {
                net.forward_trace(data.row(r), &mut trace);
                let (l, pred) = loss_and_pred(trace.logits(), data.labels[r] as usize);
                loss += l;
                correct += (pred == data.labels[r] as usize) as usize;
            }
            (correct, loss)
        })
        .collect();
    let correct: usize = partials.iter().map(|p| p.0).sum();
    let loss: f64 = partials.iter().map(|p| p.1).sum();
    Ok((correct as f64 / rows as f64, loss / rows as f64))
}

fn loss_and_pred(logits: &[f64], target: usize) -> (f64, usize) {
    let mut probs = logits.to_vec();
    softmax_in_place(&mut probs);
    let loss = -probs[target].max(1e-300).ln();
    (loss, argmax(logits))
}

/// Backward pass scratch: per-layer deltas.
pub(crate) struct Backward {
    deltas: Vec<Vec<f64>>,
    input_delta: Vec<f64>,
}

impl Backward {
    pub(crate) fn new(net: &Network) -> Self {
        Self {
            deltas: net.sizes[1..].iter().map(|&n| vec![0.0; n]).collect(),
            input_delta: vec![0.0; net.sizes[0]],
        }
    }

    /// Adds the gradient of `scale * CE(softmax(logits), target)` for one
    /// row into `grad`.
    pub(crate) fn accumulate(
        &mut self,
        net: &Network,
        x: &[f64],
        trace: &Trace,
        target: usize,
        scale: f64,
        grad: &mut [f64],
    ) {
        let last = net.layers.len() - 1;
        {
            // softmax cross-entropy head: delta = p - onehot
            let logits = trace.logits();
            let out = &mut self.deltas[last];
            out.copy_from_slice(logits);
            softmax_in_place(out);
            out[target] -= 1.0;
            for v in out.iter_mut() {
                *v *= scale;
            }
        }

        for li in (0..net.layers.len()).rev() {
            // own the current delta to sidestep aliasing with the next one
            let mut delta = std::mem::take(&mut self.deltas[li]);
            let input: &[f64] = if li == 0 { x } else { &trace.post[li - 1] };
            match net.layers[li] {
                Layer::Dense {
                    in_dim,
                    out_dim,
                    w,
                    b,
                    act,
                } => {
                    // fold dropout mask and activation derivative; the head
                    // has act = None and never carries dropout
                    if li != last {
                        if let Some(scales) = trace.dropout_scale.get(li) {
                            for (d, &s) in delta.iter_mut().zip(scales.iter()) {
                                *d *= s;
                            }
                        }
                        for (d, &y) in delta.iter_mut().zip(&trace.post[li]) {
                            *d *= act.derivative_from_output(y);
                        }
                    }
                    for o in 0..out_dim {
                        let dz = delta[o];
                        grad[b + o] += dz;
                        if dz != 0.0 {
                            let row = &mut grad[w + o * in_dim..w + (o + 1) * in_dim];
                            for (g, &xi) in row.iter_mut().zip(input) {
                                *g += dz * xi;
                            }
                        }
                    }
                    if li > 0 {
                        let prev = &mut self.deltas[li - 1];
                        debug_assert_eq!(prev.len(), in_dim);
                        prev.iter_mut().for_each(|v| *v = 0.0);
                        for o in 0..out_dim {
                            let dz = delta[o];
                            if dz != 0.0 {
                                let row = &net.params[w + o * in_dim..w + (o + 1) * in_dim];
                                for (p, &wi) in prev.iter_mut().zip(row) {
                                    *p += dz * wi;
                                }
                            }
                        }
                    } else {
                        self.input_delta.iter_mut().for_each(|v| *v = 0.0);
                    }
                }
                Layer::Conv1d {
                    in_ch,
                    in_len,
                    out_ch,
                    out_len,
                    kernel,
                    stride,
                    pad,
                    w,
                    b,
                    act,
                } => {
                    for (d, &y) in delta.iter_mut().zip(&trace.post[li]) {
                        *d *= act.derivative_from_output(y);
                    }
                    let prev: &mut [f64] = if li > 0 {
                        &mut self.deltas[li - 1]
                    } else {
                        &mut self.input_delta
                    };
                    prev.iter_mut().for_each(|v| *v = 0.0);
                    for oc in 0..out_ch {
                        for ox in 0..out_len {
                            let dz = delta[oc * out_len + ox];
                            if dz == 0.0 {
                                continue;
                            }
                            grad[b + oc] += dz;
                            let start = (ox * stride) as isize - pad as isize;
                            for ic in 0..in_ch {
                                let wbase = w + (oc * in_ch + ic) * kernel;
                                let ibase = ic * in_len;
                                for k in 0..kernel {
                                    let ix = start + k as isize;
                                    if ix >= 0 && (ix as usize) < in_len {
                                        let ii = ibase + ix as usize;
                                        grad[wbase + k] += dz * input[ii];
                                        if li > 0 {
                                            prev[ii] += dz * net.params[wbase + k];
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                Layer::MaxPool {
                    ch,
                    in_len: _,
                    size: _,
                    out_len,
                } => {
                    let prev = &mut self.deltas[li - 1];
                    prev.iter_mut().for_each(|v| *v = 0.0);
                    let idxs = &trace.pool_idx[li];
                    for oi in 0..ch * out_len {
                        prev[idxs[oi]] += delta[oi];
                    }
                }
                Layer::AvgPool {
                    ch,
                    in_len,
                    size,
                    out_len,
                } => {
                    let prev = &mut self.deltas[li - 1];
                    prev.iter_mut().for_each(|v| *v = 0.0);
                    let inv = 1.0 / size as f64;
                    for c in 0..ch {
                        for ox in 0..out_len {
                            let d = delta[c * out_len + ox] * inv;
                            let base = c * in_len + ox * size;
                            for k in 0..size {
                                prev[base + k] += d;
                            }
                        }
                    }
                }

            }
            self.deltas[li] = delta;
        }
    }
}

/// Mean loss and full parameter gradient over a batch; used by the
/// finite-difference gradient checks.
pub(crate) fn loss_and_gradient(net: &Network, data: DataView) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; net.num_params()];
    let mut trace = net.make_trace();
    let mut back = Backward::new(net);
    let scale = 1.0 / data.rows() as f64;
    let mut loss = 0.0;
    for r in 0..data.rows() {
        let x = data.row(r);
        let y = data.labels[r] as usize;
        net.forward_trace(x, &mut trace);
        let (l, _) = loss_and_pred(trace.logits(), y);
        loss += l * scale;
        back.accumulate(net, x, &trace, y, scale, &mut grad);
    }
    (loss, grad)
}

pub(crate) fn batch_loss(net: &Network, data: DataView) -> f64 {
    let mut trace = net.make_trace();
    let mut loss = 0.0;
    for r in 0..data.rows() {
        net.forward_trace(data.row(r), &mut trace);
        let (l, _) = loss_and_pred(trace.logits(), data.labels[r] as usize);
        loss += l;
    }
    loss / data.rows() as f64
}
