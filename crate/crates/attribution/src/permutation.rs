//! Monte-Carlo Shapley estimation by permutation sampling.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use nn::Network;

use crate::types::{Attributions, BackgroundSet};
use crate::AttributionError;

/// Unbiased Shapley estimator: walks `num_perms` random feature orders,
/// assigning each feature its marginal contribution when added to the
/// growing prefix. Per permutation the contributions telescope to
/// f(full) - f(empty), so efficiency holds by construction. Returns
/// (attributions, per-feature standard errors).
pub fn permutation_shapley(
    net: &Network,
    x: &[f64],
    background: BackgroundSet,
    num_perms: usize,
    rng: &mut impl Rng,
) -> Result<(Attributions, Attributions), AttributionError> {
    let n = x.len();
    if n != net.input_dim() || background.dim != n {
        return Err(AttributionError::DimMismatch {
            expected: net.input_dim(),
            got: n,
        });
    }
    if background.rows() == 0 {
        return Err(AttributionError::EmptyBackground);
    }
    if num_perms == 0 {
        return Err(AttributionError::BadConfig(
            "permutation backend needs at least one permutation".into(),
        ));
    }
    let classes = net.classes();

    // draw all orders up front so parallel evaluation stays deterministic
    let mut orders: Vec<Vec<usize>> = Vec::with_capacity(num_perms);
    let base: Vec<usize> = (0..n).collect();
    for _ in 0..num_perms {
        let mut o = base.clone();
        o.shuffle(rng);
        orders.push(o);
    }

    // per permutation: marginal contribution of each feature, per class
    let per_perm: Vec<Vec<f64>> = orders
        .par_iter()
        .map(|order| {
            let kb = background.rows();
            let inv_kb = 1.0 / kb as f64;
            let mut trace = net.make_trace();
            let mut marginals = vec![0.0; n * classes];
            // one hybrid per background row, walked from empty to full
            let mut hybrids: Vec<Vec<f64>> =
                (0..kb).map(|b| background.row(b).to_vec()).collect();
            let mut prev = vec![0.0; classes];
            for h in &hybrids {
                net.forward_trace(h, &mut trace);
                for c in 0..classes {
                    prev[c] += trace.logits()[c] * inv_kb;
                }
            }
            let mut now = vec![0.0; classes];
            for &j in order {
                now.iter_mut().for_each(|v| *v = 0.0);
                for h in hybrids.iter_mut() {
                    h[j] = x[j];
                    net.forward_trace(h, &mut trace);
                    for c in 0..classes {
                        now[c] += trace.logits()[c] * inv_kb;
                    }
                }
                for c in 0..classes {
                    marginals[j * classes + c] = now[c] - prev[c];
                }
                prev.copy_from_slice(&now);
            }
            marginals
        })
        .collect();

    let mut mean = Attributions::zeros(n, classes);
    let mut se = Attributions::zeros(n, classes);
    let np = num_perms as f64;
    for perm in &per_perm {
        for j in 0..n {
            for c in 0..classes {
                mean.add(j, c, perm[j * classes + c] / np);
            }
        }
    }
    if num_perms > 1 {
        for j in 0..n {
            for c in 0..classes {
                let m = mean.get(j, c);
                let var: f64 = per_perm
                    .iter()
                    .map(|p| {
                        let d = p[j * classes + c] - m;
                        d * d
                    })
                    .sum::<f64>()
                    / (np - 1.0);
                se.set(j, c, (var / np).sqrt());
            }
        }
    }
    Ok((mean, se))
}
