//! Finite-difference verification of the analytic gradients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::network::Network;
use crate::spec::NetworkSpec;
use crate::train::{batch_loss, loss_and_gradient, DataView};
use crate::NnError;

const FD_STEP: f64 = 1e-5;

/// Compares the analytic batch gradient against central finite differences
/// on random data and returns the worst relative error over all parameters.
pub fn gradient_check(spec: &NetworkSpec, rows: usize, seed: u64) -> Result<f64, NnError> {
    let mut net = Network::from_spec(spec, seed)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0xabcdef);
    let dim = spec.input_dim;
    let features: Vec<f64> = (0..rows * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let labels: Vec<i32> = (0..rows)
        .map(|_| rng.random_range(0..spec.classes as i32))
        .collect();
    let data = DataView::new(&features, &labels, dim);

    let (_, analytic) = loss_and_gradient(&net, data);
    let mut worst: f64 = 0.0;
    for i in 0..net.params.len() {
        let orig = net.params[i];
        net.params[i] = orig + FD_STEP;
        let plus = batch_loss(&net, data);
        net.params[i] = orig - FD_STEP;
        let minus = batch_loss(&net, data);
        net.params[i] = orig;
        let numeric = (plus - minus) / (2.0 * FD_STEP);
        let denom = analytic[i].abs().max(numeric.abs()).max(1e-8);
        worst = worst.max((analytic[i] - numeric).abs() / denom);
    }
    Ok(worst)
}
