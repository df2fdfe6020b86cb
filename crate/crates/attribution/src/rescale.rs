//! Rescale-rule attributions: one multiplier backward pass per background
//! row, averaged. Exact for linear models and exactly additive per row.

use nn::{Network, Trace};

use crate::types::{Attributions, BackgroundSet};
use crate::AttributionError;

/// Precomputes the background forward traces once so many samples can be
/// explained against the same reference set.
pub struct RescaleExplainer<'a> {
    net: &'a Network,
    background: Vec<Vec<f64>>,
    ref_traces: Vec<Trace>,
}

impl<'a> RescaleExplainer<'a> {
    pub fn new(net: &'a Network, background: BackgroundSet) -> Result<Self, AttributionError> {
        if background.dim != net.input_dim() {
            return Err(AttributionError::DimMismatch {
                expected: net.input_dim(),
                got: background.dim,
            });
        }
        let kb = background.rows();
        if kb == 0 {
            return Err(AttributionError::EmptyBackground);
        }
        let mut ref_traces = Vec::with_capacity(kb);
        let mut rows = Vec::with_capacity(kb);
        for b in 0..kb {
            let row = background.row(b);
            let mut t = net.make_trace();
            net.forward_trace(row, &mut t);
            ref_traces.push(t);
            rows.push(row.to_vec());
        }
        Ok(Self {
            net,
            background: rows,
            ref_traces,
        })
    }

    pub fn attributions(&self, x: &[f64]) -> Result<Attributions, AttributionError> {
        let n = self.net.input_dim();
        if x.len() != n {
            return Err(AttributionError::DimMismatch {
                expected: n,
                got: x.len(),
            });
        }
        let classes = self.net.classes();
        let mut trace_x = self.net.make_trace();
        self.net.forward_trace(x, &mut trace_x);
        let mut out = Attributions::zeros(n, classes);
        let inv_kb = 1.0 / self.background.len() as f64;
        for (row, ref_trace) in self.background.iter().zip(&self.ref_traces) {
            let m = self.net.multipliers_from_reference(&trace_x, ref_trace)?;
            for j in 0..n {
                let dx = x[j] - row[j];
                for c in 0..classes {
                    out.add(j, c, m[j * classes + c] * dx * inv_kb);
                }
            }
        }
        Ok(out)
    }
}

/// One-shot rescale attribution of a single sample.
pub fn rescale_attribution(
    net: &Network,
    x: &[f64],
    background: BackgroundSet,
) -> Result<Attributions, AttributionError> {
    RescaleExplainer::new(net, background)?.attributions(x)
}
