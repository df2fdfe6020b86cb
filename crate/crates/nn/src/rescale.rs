//! Reference-based multiplier backpropagation.
//!
//! Given forward traces of an input and of a reference row, propagates
//! per-unit multipliers delta_out/delta_in backward: linear layers use their
//! weights exactly, elementwise nonlinearities use the finite slope between
//! the two pre-activations. The returned input multipliers m satisfy
//! sum_j m[j][c] * (x[j] - ref[j]) = logit_c(x) - logit_c(ref) up to the
//! zero-slope guard.

use crate::network::{Layer, Network, Trace};
use crate::NnError;

/// Below this pre-activation difference the slope falls back to the
/// activation derivative at the reference point.
const SLOPE_GUARD: f64 = 1e-9;

impl Network {
    /// Input multipliers as a flat [input_dim x classes] matrix
    /// (row-major by input index).
    pub fn multipliers_from_reference(
        &self,
        trace_x: &Trace,
        trace_ref: &Trace,
    ) -> Result<Vec<f64>, NnError> {
        let classes = self.classes();
        // m[unit][class] at the output boundary of the current layer
        let mut m: Vec<f64> = (0..classes * classes)
            .map(|i| if i % classes == i / classes { 1.0 } else { 0.0 })
            .collect();

        for li in (0..self.layers.len()).rev() {
            let units = self.sizes[li + 1];
            debug_assert_eq!(m.len(), units * classes);
            match self.layers[li] {
                Layer::Dense {
                    in_dim,
                    out_dim,
                    w,
                    act,
                    ..
                } => {
                    fold_nonlinearity(
                        &mut m,
                        classes,
                        act,
                        &trace_x.pre[li],
                        &trace_ref.pre[li],
                        &trace_x.post[li],
                        &trace_ref.post[li],
                    );
                    let mut prev = vec![0.0; in_dim * classes];
                    for o in 0..out_dim {
                        let row = &self.params[w + o * in_dim..w + (o + 1) * in_dim];
                        for j in 0..in_dim {
                            let wij = row[j];
                            if wij == 0.0 {
                                continue;
                            }
                            for c in 0..classes {
                                prev[j * classes + c] += wij * m[o * classes + c];
                            }
                        }
                    }
                    m = prev;
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
                    act,
                    ..
                } => {
                    fold_nonlinearity(
                        &mut m,
                        classes,
                        act,
                        &trace_x.pre[li],
                        &trace_ref.pre[li],
                        &trace_x.post[li],
                        &trace_ref.post[li],
                    );
                    let mut prev = vec![0.0; in_ch * in_len * classes];
                    for oc in 0..out_ch {
                        for ox in 0..out_len {
                            let mbase = (oc * out_len + ox) * classes;
                            let start = (ox * stride) as isize - pad as isize;
                            for ic in 0..in_ch {
                                let wbase = w + (oc * in_ch + ic) * kernel;
                                for k in 0..kernel {
                                    let ix = start + k as isize;
                                    if ix >= 0 && (ix as usize) < in_len {
                                        let pbase = (ic * in_len + ix as usize) * classes;
                                        let wv = self.params[wbase + k];
                                        for c in 0..classes {
                                            prev[pbase + c] += wv * m[mbase + c];
                                        }
                                    }
                                }
                            }
                        }
                    }
                    m = prev;
                }
                Layer::AvgPool {
                    ch,
                    in_len,
                    size,
                    out_len,
                } => {
                    let inv = 1.0 / size as f64;
                    let mut prev = vec![0.0; ch * in_len * classes];
                    for c0 in 0..ch {
                        for ox in 0..out_len {
                            let mbase = (c0 * out_len + ox) * classes;
                            for k in 0..size {
                                let pbase = (c0 * in_len + ox * size + k) * classes;
                                for c in 0..classes {
                                    prev[pbase + c] = m[mbase + c] * inv;
                                }
                            }
                        }
                    }
                    m = prev;
                }
                Layer::MaxPool { .. } => {
                    return Err(NnError::BadSpec(
                        "max pooling is not supported by the rescale rule".into(),
                    ));
                }

            }
        }
        Ok(m)
    }
}

#[allow(clippy::too_many_arguments)]
fn fold_nonlinearity(
    m: &mut [f64],
    classes: usize,
    act: crate::spec::Activation,
    pre_x: &[f64],
    pre_ref: &[f64],
    post_x: &[f64],
    post_ref: &[f64],
) {
    if act == crate::spec::Activation::None {
        return;
    }
    for u in 0..pre_x.len() {
        let dz = pre_x[u] - pre_ref[u];
        let slope = if dz.abs() < SLOPE_GUARD {
            act.derivative_at(pre_ref[u])
        } else {
            (post_x[u] - post_ref[u]) / dz
        };
        for c in 0..classes {
            m[u * classes + c] *= slope;
        }
    }
}
