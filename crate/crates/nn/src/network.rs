//! Resolved networks: parameter layout, initialization, forward passes.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use qcore::seed::derive_seed;

use crate::spec::{Activation, LayerSpec, NetworkSpec};
use crate::NnError;

/// A layer with shapes and parameter offsets resolved against the input.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Layer {
    Dense {
        in_dim: usize,
        out_dim: usize,
        w: usize,
        b: usize,
        act: Activation,
    },
    Conv1d {
        in_ch: usize,
        in_len: usize,
        out_ch: usize,
        out_len: usize,
        kernel: usize,
        stride: usize,
        pad: usize,
        w: usize,
        b: usize,
        act: Activation,
    },
    MaxPool {
        ch: usize,
        in_len: usize,
        size: usize,
        out_len: usize,
    },
    AvgPool {
        ch: usize,
        in_len: usize,
        size: usize,
        out_len: usize,
    },
}

/// A network with its flat parameter vector.
#[derive(Debug, Clone)]
pub struct Network {
    spec: NetworkSpec,
    pub(crate) layers: Vec<Layer>,
    /// activation sizes: sizes[0] = input_dim, sizes[i+1] = output of layer i
    pub(crate) sizes: Vec<usize>,
    pub params: Vec<f64>,
    /// When the model was trained on a column subset of a wider feature
    /// space, the original column indices, in input order.
    pub input_columns: Option<Vec<usize>>,
    /// Sum first-layer dense products in value order so results are
    /// invariant under joint input/weight permutations (slower; off by
    /// default).
    pub order_invariant_first: bool,
}

fn resolve_layers(spec: &NetworkSpec) -> Result<(Vec<Layer>, Vec<usize>, usize), NnError> {
    let mut layers = Vec::new();
    let mut sizes = vec![spec.input_dim];
    // convolution stage tracks (channels, length)
    let mut ch = 1usize;
    let mut len = spec.input_dim;
    let mut flat = false; // becomes true once the signal is 1-D feature-only
    let mut offset = 0usize;

    for ls in &spec.layers {
        match *ls {
            LayerSpec::Conv1d {
                filters,
                kernel,
                stride,
                padding,
                activation,
            } => {
                let padded = len + 2 * padding;
                if padded < kernel {
                    return Err(NnError::BadSpec(format!(
                        "conv kernel {kernel} larger than padded length {padded}"
                    )));
                }
                if (padded - kernel) % stride != 0 {
                    return Err(NnError::BadSpec(format!(
                        "conv stride {stride} does not divide padded length {padded} - kernel {kernel}"
                    )));
                }
                let out_len = (padded - kernel) / stride + 1;
                let w = offset;
                offset += filters * ch * kernel;
                let b = offset;
                offset += filters;
                layers.push(Layer::Conv1d {
                    in_ch: ch,
                    in_len: len,
                    out_ch: filters,
                    out_len,
                    kernel,
                    stride,
                    pad: padding,
                    w,
                    b,
                    act: activation,
                });
                ch = filters;
                len = out_len;
                sizes.push(ch * len);
            }
            LayerSpec::MaxPool1d { size } | LayerSpec::AvgPool1d { size } => {
                if len % size != 0 {
                    return Err(NnError::BadSpec(format!(
                        "pool size {size} does not divide length {len}"
                    )));
                }
                let out_len = len / size;
                let layer = if matches!(ls, LayerSpec::MaxPool1d { .. }) {
                    Layer::MaxPool {
                        ch,
                        in_len: len,
                        size,
                        out_len,
                    }
                } else {
                    Layer::AvgPool {
                        ch,
                        in_len: len,
                        size,
                        out_len,
                    }
                };
                layers.push(layer);
                len = out_len;
                sizes.push(ch * len);
            }
            LayerSpec::Flatten => {
                // layout is already channel-major flat; nothing to do
                flat = true;
            }
            LayerSpec::Dense { units, activation } => {
                flat = true;
                let in_dim = ch * len;
                let w = offset;
                offset += units * in_dim;
                let b = offset;
                offset += units;
                layers.push(Layer::Dense {
                    in_dim,
                    out_dim: units,
                    w,
                    b,
                    act: activation,
                });
                ch = 1;
                len = units;
                sizes.push(units);
            }
        }
    }
    let _ = flat;
    Ok((layers, sizes, offset))
}

impl Network {
    /// Builds the network with He-initialized weights (variance 2/fan_in)
    /// and zero biases, reproducible from the seed.
    pub fn from_spec(spec: &NetworkSpec, seed: u64) -> Result<Self, NnError> {
        spec.validate()?;
        let (layers, sizes, num_params) = resolve_layers(spec)?;
        let mut params = vec![0.0; num_params];
        for (li, layer) in layers.iter().enumerate() {
            let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, "init", li as u64));
            match *layer {
                Layer::Dense {
                    in_dim,
                    out_dim,
                    w,
                    ..
                } => {
                    let dist = Normal::new(0.0, (2.0 / in_dim as f64).sqrt()).expect("valid sigma");
                    for p in &mut params[w..w + out_dim * in_dim] {
                        *p = dist.sample(&mut rng);
                    }
                }
                Layer::Conv1d {
                    in_ch,
                    out_ch,
                    kernel,
                    w,
                    ..
                } => {
                    let fan_in = in_ch * kernel;
                    let dist = Normal::new(0.0, (2.0 / fan_in as f64).sqrt()).expect("valid sigma");
                    for p in &mut params[w..w + out_ch * in_ch * kernel] {
                        *p = dist.sample(&mut rng);
                    }
                }
                _ => {}
            }
        }
        Ok(Self {
            spec: spec.clone(),
            layers,
            sizes,
            params,
            input_columns: None,
            order_invariant_first: false,
        })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn input_dim(&self) -> usize {
        self.spec.input_dim
    }

    pub fn classes(&self) -> usize {
        self.spec.classes
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn make_trace(&self) -> Trace {
        Trace {
            pre: self.sizes[1..].iter().map(|&n| vec![0.0; n]).collect(),
            post: self.sizes[1..].iter().map(|&n| vec![0.0; n]).collect(),
            pool_idx: self
                .layers
                .iter()
                .map(|l| match l {
                    Layer::MaxPool { ch, out_len, .. } => vec![0usize; ch * out_len],
                    _ => Vec::new(),
                })
                .collect(),
            dropout_scale: Vec::new(),
            sort_buf: Vec::new(),
        }
    }

    /// Forward pass storing pre- and post-activations of every layer.
    /// Returns nothing; logits end up in `trace.post.last()`.
    pub fn forward_trace(&self, x: &[f64], trace: &mut Trace) {
        self.forward_trace_impl(x, trace, None);
    }

    /// Forward with inverted dropout on hidden dense activations. Mask
    /// scales are recorded in the trace for the backward pass.
    pub(crate) fn forward_trace_dropout(&self, x: &[f64], trace: &mut Trace, ctx: &DropoutCtx) {
        self.forward_trace_impl(x, trace, Some(ctx));
    }

    fn forward_trace_impl(&self, x: &[f64], trace: &mut Trace, dropout: Option<&DropoutCtx>) {
        debug_assert_eq!(x.len(), self.spec.input_dim);
        if dropout.is_some() && trace.dropout_scale.len() != self.layers.len() {
            trace.dropout_scale = self.layers.iter().map(|_| Vec::new()).collect();
        }
        let last = self.layers.len() - 1;
        for (li, layer) in self.layers.iter().enumerate() {
            // split so we can borrow the previous activation while writing this one
            let (done, rest) = trace.post.split_at_mut(li);
            let input: &[f64] = if li == 0 { x } else { &done[li - 1] };
            let pre = &mut trace.pre[li];
            let post = &mut rest[0];
            match *layer {
                Layer::Dense {
                    in_dim,
                    out_dim,
                    w,
                    b,
                    act,
                } => {
                    let order_invariant = self.order_invariant_first && li == 0;
                    for o in 0..out_dim {
                        let row = &self.params[w + o * in_dim..w + (o + 1) * in_dim];
                        let z = if order_invariant {
                            dot_sorted(row, input, &mut trace.sort_buf)
                        } else {
                            dot(row, input)
                        } + self.params[b + o];
                        pre[o] = z;
                        post[o] = act.apply(z);
                    }
                    if let Some(ctx) = dropout {
                        if li != last {
                            let scales = &mut trace.dropout_scale[li];
                            ctx.fill_scales(li, out_dim, scales);
                            for (v, &s) in post.iter_mut().zip(scales.iter()) {
                                *v *= s;
                            }
                        }
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
                    for oc in 0..out_ch {
                        let bias = self.params[b + oc];
                        for ox in 0..out_len {
                            let start = (ox * stride) as isize - pad as isize;
                            let mut z = bias;
                            for ic in 0..in_ch {
                                let wbase = w + (oc * in_ch + ic) * kernel;
                                let ibase = ic * in_len;
                                for k in 0..kernel {
                                    let ix = start + k as isize;
                                    if ix >= 0 && (ix as usize) < in_len {
                                        z += self.params[wbase + k] * input[ibase + ix as usize];
                                    }
                                }
                            }
                            let idx = oc * out_len + ox;
                            pre[idx] = z;
                            post[idx] = act.apply(z);
                        }
                    }
                }
                Layer::MaxPool {
                    ch,
                    in_len,
                    size,
                    out_len,
                } => {
                    let idxs = &mut trace.pool_idx[li];
                    for c in 0..ch {
                        for ox in 0..out_len {
                            let base = c * in_len + ox * size;
                            let mut best = input[base];
                            let mut best_i = base;
                            for k in 1..size {
                                if input[base + k] > best {
                                    best = input[base + k];
                                    best_i = base + k;
                                }
                            }
                            let oi = c * out_len + ox;
                            pre[oi] = best;
                            post[oi] = best;
                            idxs[oi] = best_i;
                        }
                    }
                }
                Layer::AvgPool {
                    ch,
                    in_len,
                    size,
                    out_len,
                } => {
                    let inv = 1.0 / size as f64;
                    for c in 0..ch {
                        for ox in 0..out_len {
                            let base = c * in_len + ox * size;
                            let mut s = 0.0;
                            for k in 0..size {
                                s += input[base + k];
                            }
                            let oi = c * out_len + ox;
                            pre[oi] = s * inv;
                            post[oi] = s * inv;
                        }
                    }
                }

            }
        }
    }

    /// Logits for one input row (allocates a trace; fine outside hot loops).
    pub fn logits(&self, x: &[f64]) -> Result<Vec<f64>, NnError> {
        if x.len() != self.spec.input_dim {
            return Err(NnError::DimMismatch {
                expected: self.spec.input_dim,
                got: x.len(),
            });
        }
        let mut trace = self.make_trace();
        self.forward_trace(x, &mut trace);
        Ok(trace.post.last().expect("at least one layer").clone())
    }

    /// Softmax class probabilities; they sum to 1 within 1e-9.
    pub fn probabilities(&self, x: &[f64]) -> Result<Vec<f64>, NnError> {
        let mut logits = self.logits(x)?;
        softmax_in_place(&mut logits);
        Ok(logits)
    }

    /// Argmax with ties broken toward the lowest class index.
    pub fn predict(&self, x: &[f64]) -> Result<usize, NnError> {
        Ok(argmax(&self.logits(x)?))
    }
}

/// Per-row forward storage, reusable across rows.
#[derive(Debug, Clone)]
pub struct Trace {
    pub pre: Vec<Vec<f64>>,
    pub post: Vec<Vec<f64>>,
    pub(crate) pool_idx: Vec<Vec<usize>>,
    /// Per-layer inverted-dropout scales (empty when dropout is off).
    pub(crate) dropout_scale: Vec<Vec<f64>>,
    sort_buf: Vec<f64>,
}

impl Trace {
    pub fn logits(&self) -> &[f64] {
        self.post.last().expect("nonempty network")
    }
}

/// Deterministic dropout stream for one (row, epoch) pair.
pub(crate) struct DropoutCtx {
    pub p: f64,
    pub seed: u64,
    pub epoch: usize,
    pub row: usize,
}

impl DropoutCtx {
    fn fill_scales(&self, layer: usize, n: usize, scales: &mut Vec<f64>) {
        use qcore::seed::derive_seed;
        use rand::Rng;
        use rand::SeedableRng;
        let stream = derive_seed(
            self.seed,
            "dropout",
            ((self.epoch as u64) << 40) ^ ((self.row as u64) << 8) ^ layer as u64,
        );
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(stream);
        let keep = 1.0 - self.p;
        scales.clear();
        scales.extend((0..n).map(|_| {
            if rng.random::<f64>() < self.p {
                0.0
            } else {
                1.0 / keep
            }
        }));
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let mut s3 = 0.0;
    let mut i = 0;
    while i + 4 <= n {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
        i += 4;
    }
    let mut tail = 0.0;
    while i < n {
        tail += a[i] * b[i];
        i += 1;
    }
    (s0 + s1) + (s2 + s3) + tail
}

/// Sum of products in sorted value order: the result depends only on the
/// multiset of products, not on index order.
#[inline]
pub(crate) fn dot_sorted(a: &[f64], b: &[f64], buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    buf.extend(a.iter().zip(b).map(|(x, y)| x * y));
    buf.sort_unstable_by(f64::total_cmp);
    buf.iter().sum()
}

pub(crate) fn softmax_in_place(logits: &mut [f64]) {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in logits.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in logits.iter_mut() {
        *v /= sum;
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{LayerSpec, NetworkSpec};

    fn toy_spec() -> NetworkSpec {
        NetworkSpec::new(
            4,
            vec![LayerSpec::dense_relu(6), LayerSpec::head(3)],
            3,
        )
        .unwrap()
    }

    #[test]
    fn init_is_reproducible_and_sized() {
        let spec = toy_spec();
        let a = Network::from_spec(&spec, 9).unwrap();
        let b = Network::from_spec(&spec, 9).unwrap();
        assert_eq!(a.params, b.params);
        // dense(4->6): 24 + 6, head(6->3): 18 + 3
        assert_eq!(a.num_params(), 24 + 6 + 18 + 3);
        let c = Network::from_spec(&spec, 10).unwrap();
        assert_ne!(a.params, c.params);
    }

    #[test]
    fn dense_param_count_example() {
        let spec =
            NetworkSpec::new(4, vec![LayerSpec::head(2)], 2).unwrap();
        let net = Network::from_spec(&spec, 1).unwrap();
        assert_eq!(net.num_params(), 10);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let net = Network::from_spec(&toy_spec(), 3).unwrap();
        let p = net.probabilities(&[0.3, -0.2, 0.9, 0.0]).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(p.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn zero_head_weights_give_uniform_probabilities() {
        let mut net = Network::from_spec(&toy_spec(), 3).unwrap();
        let n = net.num_params();
        for p in &mut net.params[n - (6 * 3 + 3)..] {
            *p = 0.0;
        }
        let p = net.probabilities(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        for v in p {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn conv_preserves_length_with_default_shape() {
        let spec = NetworkSpec::new(
            16,
            vec![
                LayerSpec::conv(4),
                LayerSpec::Flatten,
                LayerSpec::head(2),
            ],
            2,
        )
        .unwrap();
        let net = Network::from_spec(&spec, 0).unwrap();
        // conv output is 4 channels x 16 positions
        assert_eq!(net.sizes, vec![16, 64, 2]);
    }

    #[test]
    fn pooling_shapes() {
        let spec = NetworkSpec::new(
            16,
            vec![
                LayerSpec::conv(4),
                LayerSpec::MaxPool1d { size: 2 },
                LayerSpec::AvgPool1d { size: 2 },
                LayerSpec::head(2),
            ],
            2,
        )
        .unwrap();
        let net = Network::from_spec(&spec, 0).unwrap();
        assert_eq!(net.sizes, vec![16, 64, 32, 16, 2]);
        let spec_bad = NetworkSpec::new(
            15,
            vec![LayerSpec::conv(4), LayerSpec::MaxPool1d { size: 2 }, LayerSpec::head(2)],
            2,
        )
        .unwrap();
        assert!(Network::from_spec(&spec_bad, 0).is_err());
    }

    #[test]
    fn dim_mismatch_rejected() {
        let net = Network::from_spec(&toy_spec(), 3).unwrap();
        assert!(net.logits(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn order_invariant_dot_matches_multiset() {
        let a = [0.1, -0.7, 0.3, 1e-9, 4.0];
        let b = [1.0, 2.0, -0.5, 3.0, 0.25];
        let mut buf = Vec::new();
        let fwd = dot_sorted(&a, &b, &mut buf);
        let rev: Vec<f64> = a.iter().rev().cloned().collect();
        let rev_b: Vec<f64> = b.iter().rev().cloned().collect();
        let bwd = dot_sorted(&rev, &rev_b, &mut buf);
        assert_eq!(fwd.to_bits(), bwd.to_bits());
    }
}
