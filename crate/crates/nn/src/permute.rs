//! Feature-order permutations and the matching first-layer weight
//! relabeling. A dense network whose first-layer incoming weights are
//! permuted together with the dataset columns computes exactly the same
//! function.

use crate::network::{Layer, Network};
use crate::NnError;

pub fn validate_permutation(pi: &[usize]) -> Result<(), NnError> {
    let n = pi.len();
    let mut seen = vec![false; n];
    for &p in pi {
        if p >= n || seen[p] {
            return Err(NnError::BadPermutation(format!(
                "not a bijection on 0..{n}"
            )));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Reorders columns: output column pi[j] holds input column j.
pub fn permute_columns(features: &[f64], dim: usize, pi: &[usize]) -> Result<Vec<f64>, NnError> {
    if pi.len() != dim {
        return Err(NnError::BadPermutation(format!(
            "permutation length {} vs dim {dim}",
            pi.len()
        )));
    }
    validate_permutation(pi)?;
    let rows = features.len() / dim;
    let mut out = vec![0.0; features.len()];
    for r in 0..rows {
        let src = &features[r * dim..(r + 1) * dim];
        let dst = &mut out[r * dim..(r + 1) * dim];
        for (j, &v) in src.iter().enumerate() {
            dst[pi[j]] = v;
        }
    }
    Ok(out)
}

/// Applies the same relabeling to the incoming weights of a dense first
/// layer, so (permuted data, permuted weights) reproduces the original
/// outputs.
pub fn permute_dense_first_layer(net: &mut Network, pi: &[usize]) -> Result<(), NnError> {
    if pi.len() != net.input_dim() {
        return Err(NnError::BadPermutation(format!(
            "permutation length {} vs input dim {}",
            pi.len(),
            net.input_dim()
        )));
    }
    validate_permutation(pi)?;
    match net.layers.first().cloned() {
        Some(Layer::Dense {
            in_dim,
            out_dim,
            w,
            ..
        }) => {
            let mut rows = vec![0.0; in_dim];
            for o in 0..out_dim {
                let base = w + o * in_dim;
                rows.copy_from_slice(&net.params[base..base + in_dim]);
                for (j, &v) in rows.iter().enumerate() {
                    net.params[base + pi[j]] = v;
                }
            }
            Ok(())
        }
        _ => Err(NnError::BadPermutation(
            "first layer is not dense; only dense layers are permutation-equivariant".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{LayerSpec, NetworkSpec};

    fn dense_net() -> Network {
        let spec = NetworkSpec::new(
            5,
            vec![LayerSpec::dense_relu(7), LayerSpec::head(2)],
            2,
        )
        .unwrap();
        Network::from_spec(&spec, 21).unwrap()
    }

    #[test]
    fn identity_permutation_is_noop() {
        let feats = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let pi: Vec<usize> = (0..5).collect();
        assert_eq!(permute_columns(&feats, 5, &pi).unwrap(), feats);
    }

    #[test]
    fn joint_permutation_preserves_logits_bitwise() {
        let mut net = dense_net();
        net.order_invariant_first = true;
        let x = vec![0.3, -0.8, 0.1, 0.9, -0.2];
        let before = net.logits(&x).unwrap();

        let pi = vec![3usize, 0, 4, 1, 2];
        let xp = permute_columns(&x, 5, &pi).unwrap();
        let mut permuted = net.clone();
        permute_dense_first_layer(&mut permuted, &pi).unwrap();
        let after = permuted.logits(&xp).unwrap();
        for (a, b) in before.iter().zip(&after) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn data_only_permutation_changes_logits() {
        let net = dense_net();
        let x = vec![0.3, -0.8, 0.1, 0.9, -0.2];
        let pi = vec![3usize, 0, 4, 1, 2];
        let xp = permute_columns(&x, 5, &pi).unwrap();
        let a = net.logits(&x).unwrap();
        let b = net.logits(&xp).unwrap();
        assert!(a.iter().zip(&b).any(|(x, y)| (x - y).abs() > 1e-9));
    }

    #[test]
    fn non_bijection_rejected() {
        assert!(validate_permutation(&[0, 0, 1]).is_err());
        assert!(validate_permutation(&[0, 3]).is_err());
        let mut net = dense_net();
        assert!(permute_dense_first_layer(&mut net, &[1, 0]).is_err());
    }
}
