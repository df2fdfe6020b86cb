//! Decision-region and relative-phase scans of trained models.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use qcore::DensityMatrix;
use tomography::correlation_vector;
use witness::{ghz_phase_state, phase_boundary, w_phase_state, PhasePoint};

use nn::Network;

use crate::ReductionError;

/// One evaluated grid point of a low-dimensional decision region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionPoint {
    pub coords: Vec<f64>,
    pub predicted: usize,
    pub probabilities: Vec<f64>,
}

/// Evaluates a model with 1 or 2 input features over a regular grid on
/// [-1, 1]^k and returns every grid point with its prediction.
pub fn decision_region_scan(
    model: &Network,
    points_per_axis: usize,
) -> Result<Vec<RegionPoint>, ReductionError> {
    let k = model.input_dim();
    if k > 2 {
        return Err(ReductionError::TooManyRegionFeatures(k));
    }
    if points_per_axis < 2 {
        return Err(ReductionError::BadConfig(
            "need at least two points per axis".into(),
        ));
    }
    let axis: Vec<f64> = (0..points_per_axis)
        .map(|i| -1.0 + 2.0 * i as f64 / (points_per_axis - 1) as f64)
        .collect();
    let mut out = Vec::with_capacity(axis.len().pow(k as u32));
    let mut eval = |coords: Vec<f64>| -> Result<(), ReductionError> {
        let probabilities = model.probabilities(&coords)?;
        let predicted = probabilities
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite"))
            .map(|(i, _)| i)
            .unwrap_or(0);
        out.push(RegionPoint {
            coords,
            predicted,
            probabilities,
        });
        Ok(())
    };
    if k == 1 {
        for &x in &axis {
            eval(vec![x])?;
        }
    } else {
        for &x in &axis {
            for &y in &axis {
                eval(vec![x, y])?;
            }
        }
    }
    Ok(out)
}

pub fn export_region_csv(path: &Path, points: &[RegionPoint]) -> Result<(), ReductionError> {
    let mut w = BufWriter::new(File::create(path)?);
    let k = points.first().map(|p| p.coords.len()).unwrap_or(0);
    let coord_names: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
    let classes = points.first().map(|p| p.probabilities.len()).unwrap_or(0);
    let prob_names: Vec<String> = (0..classes).map(|c| format!("p{c}")).collect();
    writeln!(
        w,
        "{},pred_class,{}",
        coord_names.join(","),
        prob_names.join(",")
    )?;
    for p in points {
        let coords: Vec<String> = p.coords.iter().map(|v| v.to_string()).collect();
        let probs: Vec<String> = p.probabilities.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{},{},{}", coords.join(","), p.predicted, probs.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Which relative-phase family to scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseFamily {
    Ghz { points: usize },
    W { points_per_axis: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseScanPoint {
    pub theta1: f64,
    pub theta2: f64,
    pub detected_probability: f64,
    pub analytic_detected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseScan {
    pub points: Vec<PhaseScanPoint>,
    /// Interpolated thetas where the model's detected-probability crosses
    /// 1/2 (GHZ family only).
    pub crossings: Vec<f64>,
    /// Fraction of grid points where argmax agrees with the analytic
    /// boundary.
    pub agreement: f64,
}

fn model_input_from_state(
    model: &Network,
    rho: &DensityMatrix,
) -> Result<Vec<f64>, ReductionError> {
    let t = correlation_vector(rho)?;
    let row: Vec<f64> = match &model.input_columns {
        Some(cols) => cols.iter().map(|&j| t.get(j)).collect(),
        None => t.values().to_vec(),
    };
    if row.len() != model.input_dim() {
        return Err(ReductionError::DimMismatch {
            expected: model.input_dim(),
            got: row.len(),
        });
    }
    Ok(row)
}

/// Sweeps pure phase states (no depolarization) through a trained
/// three-qubit detector and compares against the analytic witness
/// boundaries. Class 1 is "detected".
pub fn phase_scan(model: &Network, family: PhaseFamily) -> Result<PhaseScan, ReductionError> {
    use std::f64::consts::PI;
    let mut points = Vec::new();
    match family {
        PhaseFamily::Ghz { points: n } => {
            for i in 0..n {
                let theta = -PI + 2.0 * PI * i as f64 / (n - 1) as f64;
                let rho = DensityMatrix::from_pure(&ghz_phase_state(theta));
                let x = model_input_from_state(model, &rho)?;
                let p = model.probabilities(&x)?;
                points.push(PhaseScanPoint {
                    theta1: theta,
                    theta2: 0.0,
                    detected_probability: p[1],
                    analytic_detected: phase_boundary(PhasePoint::Ghz { theta }),
                });
            }
        }
        PhaseFamily::W { points_per_axis: n } => {
            for i in 0..n {
                let t1 = -PI + 2.0 * PI * i as f64 / (n - 1) as f64;
                for j in 0..n {
                    let t2 = -PI + 2.0 * PI * j as f64 / (n - 1) as f64;
                    let rho = DensityMatrix::from_pure(&w_phase_state(t1, t2));
                    let x = model_input_from_state(model, &rho)?;
                    let p = model.probabilities(&x)?;
                    points.push(PhaseScanPoint {
                        theta1: t1,
                        theta2: t2,
                        detected_probability: p[1],
                        analytic_detected: phase_boundary(PhasePoint::W {
                            theta1: t1,
                            theta2: t2,
                        }),
                    });
                }
            }
        }
    }
    let crossings = if matches!(family, PhaseFamily::Ghz { .. }) {
        find_crossings(&points)
    } else {
        Vec::new()
    };
    let agree = points
        .iter()
        .filter(|p| (p.detected_probability > 0.5) == p.analytic_detected)
        .count();
    Ok(PhaseScan {
        agreement: agree as f64 / points.len() as f64,
        points,
        crossings,
    })
}

fn find_crossings(points: &[PhaseScanPoint]) -> Vec<f64> {
    let mut out = Vec::new();
    for w in points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let (pa, pb) = (a.detected_probability - 0.5, b.detected_probability - 0.5);
        if pa == 0.0 {
            out.push(a.theta1);
        } else if pa * pb < 0.0 {
            // linear interpolation between the bracketing grid points
            let t = pa / (pa - pb);
            out.push(a.theta1 + t * (b.theta1 - a.theta1));
        }
    }
    out
}

pub fn export_phase_csv(path: &Path, scan: &PhaseScan) -> Result<(), ReductionError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "theta1,theta2,prob_detected,analytic_detected")?;
    for p in &scan.points {
        writeln!(
            w,
            "{},{},{},{}",
            p.theta1,
            p.theta2,
            p.detected_probability,
            u8::from(p.analytic_detected)
        )?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nn::{LayerSpec, NetworkSpec};

    #[test]
    fn region_scan_covers_grid_and_rejects_high_dims() {
        let spec = NetworkSpec::new(
            2,
            vec![LayerSpec::dense_relu(4), LayerSpec::head(2)],
            2,
        )
        .unwrap();
        let net = Network::from_spec(&spec, 1).unwrap();
        let points = decision_region_scan(&net, 11).unwrap();
        assert_eq!(points.len(), 121);
        assert!(points
            .iter()
            .all(|p| p.coords.iter().all(|c| (-1.0..=1.0).contains(c))));

        let spec3 = NetworkSpec::new(
            3,
            vec![LayerSpec::dense_relu(4), LayerSpec::head(2)],
            2,
        )
        .unwrap();
        let net3 = Network::from_spec(&spec3, 1).unwrap();
        assert!(matches!(
            decision_region_scan(&net3, 11),
            Err(ReductionError::TooManyRegionFeatures(3))
        ));
    }

    #[test]
    fn one_feature_scan_has_monotone_coordinates() {
        let spec = NetworkSpec::new(1, vec![LayerSpec::head(2)], 2).unwrap();
        let net = Network::from_spec(&spec, 9).unwrap();
        let points = decision_region_scan(&net, 21).unwrap();
        assert_eq!(points.len(), 21);
        assert!(points.windows(2).all(|w| w[0].coords[0] < w[1].coords[0]));
    }

    #[test]
    fn phase_scan_analytic_flags_match_witness_math() {
        // untrained model: only the analytic flags are checked here
        let spec = NetworkSpec::new(
            64,
            vec![LayerSpec::dense_relu(4), LayerSpec::head(2)],
            2,
        )
        .unwrap();
        let net = Network::from_spec(&spec, 3).unwrap();
        let scan = phase_scan(&net, PhaseFamily::Ghz { points: 33 }).unwrap();
        for p in &scan.points {
            assert_eq!(p.analytic_detected, p.theta1.cos() > 1e-12);
        }
        let scan = phase_scan(&net, PhaseFamily::W { points_per_axis: 9 }).unwrap();
        assert_eq!(scan.points.len(), 81);
    }
}
