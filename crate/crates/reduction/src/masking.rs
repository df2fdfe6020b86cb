//! Post-hoc input masking. This is the approach that does NOT work for
//! measurement reduction; it exists to reproduce that negative result
//! against the retraining harness.

use nn::{evaluate, DataView, Network};

use crate::ReductionError;

/// Evaluates a trained full-feature model with the masked features
/// overwritten by `mask_value` (0 by default elsewhere; an outlier like
/// +-10 probes the out-of-distribution failure mode instead). The model is
/// untouched; no retraining happens.
pub fn mask_eval(
    model: &Network,
    features: &[f64],
    labels: &[i32],
    masked: &[usize],
    mask_value: f64,
) -> Result<f64, ReductionError> {
    let dim = model.input_dim();
    if features.len() != labels.len() * dim {
        return Err(ReductionError::DimMismatch {
            expected: labels.len() * dim,
            got: features.len(),
        });
    }
    if masked.iter().any(|&j| j >= dim) {
        return Err(ReductionError::BadConfig(format!(
            "masked index out of range for dim {dim}"
        )));
    }
    let mut patched = features.to_vec();
    for r in 0..labels.len() {
        for &j in masked {
            patched[r * dim + j] = mask_value;
        }
    }
    let (acc, _) = evaluate(model, DataView::new(&patched, labels, dim))?;
    Ok(acc)
}
