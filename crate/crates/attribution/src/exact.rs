//! Exact Shapley values by coalition enumeration.

use rayon::prelude::*;

use nn::Network;

use crate::types::{Attributions, BackgroundSet};
use crate::AttributionError;

pub(crate) const EXACT_FEATURE_CAP: usize = 20;

/// Exact Shapley values of an arbitrary coalition game given by `value` on
/// bitmask subsets of n players. Terms are summed in sorted value order so
/// the result depends only on the multiset of marginal contributions.
pub fn exact_shapley_game(
    n: usize,
    value: &dyn Fn(u32) -> f64,
) -> Result<Vec<f64>, AttributionError> {
    if n > EXACT_FEATURE_CAP {
        return Err(AttributionError::TooManyFeatures(n));
    }
    let weights = subset_weights(n);
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut out = vec![0.0; n];
    let mut terms: Vec<f64> = Vec::with_capacity(1 << n.saturating_sub(1));
    for (j, slot) in out.iter_mut().enumerate() {
        let bit = 1u32 << j;
        terms.clear();
        let mut mask: u32 = 0;
        loop {
            if mask & bit == 0 {
                let s = mask.count_ones() as usize;
                terms.push(weights[s] * (value(mask | bit) - value(mask)));
            }
            if mask == full {
                break;
            }
            mask += 1;
        }
        terms.sort_unstable_by(f64::total_cmp);
        *slot = terms.iter().sum();
    }
    Ok(out)
}

/// w_s = s! (n-s-1)! / n! = 1 / (n * C(n-1, s))
fn subset_weights(n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    for s in 0..n {
        let mut binom = 1.0f64;
        for i in 0..s {
            binom *= (n - 1 - i) as f64 / (i + 1) as f64;
        }
        w[s] = 1.0 / (n as f64 * binom);
    }
    w
}

/// Interventional coalition values for every subset: v[mask][c] is the mean
/// over background rows of logit_c on the hybrid input that takes masked-in
/// features from `x` and the rest from the background row.
pub(crate) fn coalition_values(
    net: &Network,
    x: &[f64],
    background: BackgroundSet,
) -> Result<Vec<f64>, AttributionError> {
    let n = x.len();
    let classes = net.classes();
    let n_masks = 1usize << n;
    let kb = background.rows();
    if kb == 0 {
        return Err(AttributionError::EmptyBackground);
    }
    let inv_kb = 1.0 / kb as f64;
    let mut values = vec![0.0; n_masks * classes];
    values
        .par_chunks_mut(classes * 1024)
        .enumerate()
        .for_each(|(block, chunk)| {
            let mut trace = net.make_trace();
            let mut hybrid = vec![0.0; n];
            for (i, slot) in chunk.chunks_mut(classes).enumerate() {
                let mask = block * 1024 + i;
                for b in 0..kb {
                    let row = background.row(b);
                    for j in 0..n {
                        hybrid[j] = if mask & (1 << j) != 0 { x[j] } else { row[j] };
                    }
                    net.forward_trace(&hybrid, &mut trace);
                    for (c, s) in slot.iter_mut().enumerate() {
                        *s += trace.logits()[c];
                    }
                }
                for s in slot.iter_mut() {
                    *s *= inv_kb;
                }
            }
        });
    Ok(values)
}

/// Exact per-class Shapley attributions of the interventional value
/// function. Capped at 20 features; larger models use the permutation
/// backend.
pub fn exact_shapley(
    net: &Network,
    x: &[f64],
    background: BackgroundSet,
) -> Result<Attributions, AttributionError> {
    let n = x.len();
    if n != net.input_dim() || background.dim != n {
        return Err(AttributionError::DimMismatch {
            expected: net.input_dim(),
            got: n,
        });
    }
    if n > EXACT_FEATURE_CAP {
        return Err(AttributionError::TooManyFeatures(n));
    }
    let classes = net.classes();
    let values = coalition_values(net, x, background)?;
    let weights = subset_weights(n);
    let mut out = Attributions::zeros(n, classes);
    let mut terms: Vec<f64> = Vec::with_capacity(1 << n.saturating_sub(1));
    for j in 0..n {
        let bit = 1usize << j;
        for c in 0..classes {
            terms.clear();
            for mask in 0..(1usize << n) {
                if mask & bit == 0 {
                    let s = mask.count_ones() as usize;
                    terms.push(
                        weights[s] * (values[(mask | bit) * classes + c] - values[mask * classes + c]),
                    );
                }
            }
            terms.sort_unstable_by(f64::total_cmp);
            out.set(j, c, terms.iter().sum());
        }
    }
    Ok(out)
}
