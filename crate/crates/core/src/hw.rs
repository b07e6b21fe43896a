//! Silicon cost model: estimates area, latency, and power of a column from
//! its synapse count, calibrated against three embedded 7 nm reference
//! design points.

use serde::Serialize;

use crate::config::TnnConfig;
use crate::error::{Error, Result};

/// One measured reference design: a synapse count and its reported costs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalibrationPoint {
    pub synapses: u64,
    pub area_mm2: f64,
    pub latency_ns: f64,
    pub power_mw: f64,
}

/// Published costs of the three reference design points.
pub const REFERENCE_DESIGNS: [CalibrationPoint; 3] = [
    CalibrationPoint {
        synapses: 130,
        area_mm2: 0.001,
        latency_ns: 3.59,
        power_mw: 0.002,
    },
    CalibrationPoint {
        synapses: 970,
        area_mm2: 0.005,
        latency_ns: 5.07,
        power_mw: 0.022,
    },
    CalibrationPoint {
        synapses: 6750,
        area_mm2: 0.033,
        latency_ns: 6.50,
        power_mw: 0.155,
    },
];

/// Fitted cost curves.
///
/// Area and power are affine in the synapse count, fitted with relative
/// (1/y^2) weighting so the small design points are matched as tightly as
/// the large one. Latency is affine in log2 of the synapse count. Below the
/// smallest calibrated count the affine forms are not trusted (the power
/// intercept is negative there); costs are scaled proportionally from the
/// smallest calibrated point instead, which keeps every estimate positive
/// and monotone in the synapse count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HwCoefficients {
    pub area_base_mm2: f64,
    pub area_per_synapse_mm2: f64,
    pub power_base_mw: f64,
    pub power_per_synapse_mw: f64,
    pub latency_base_ns: f64,
    pub latency_per_log2_ns: f64,
    /// Smallest synapse count seen during calibration; the proportional
    /// small-design regime applies below it.
    pub min_calibrated_synapses: u64,
}

/// Estimated cost of one design, as reported to the user.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HwEstimate {
    pub synapses: u64,
    pub area_mm2: f64,
    pub latency_ns: f64,
    pub power_mw: f64,
}

impl HwEstimate {
    /// Apply a multiplicative factor to the silicon-proportional costs (area
    /// and power); latency is a critical-path property and is left alone.
    pub fn scaled(&self, factor: f64) -> HwEstimate {
        HwEstimate {
            area_mm2: self.area_mm2 * factor,
            power_mw: self.power_mw * factor,
            ..*self
        }
    }
}

/// Synapses in a column: neurons x input lines, with each input line carrying
/// one spike per encoding neuron.
pub fn synapse_count(cfg: &TnnConfig) -> u64 {
    synapses_for(cfg.num_clusters, cfg.encoding_neurons, cfg.reduced_length)
}

/// Fraction of area and power saved by feeding the column E·l encoded lines
/// instead of one line per raw sample point: `1 − E·l/L`. Negative when the
/// encoding expands the input instead of compressing it.
pub fn dimensionality_reduction(
    encoding_neurons: usize,
    reduced_length: usize,
    signal_length: usize,
) -> f64 {
    1.0 - (encoding_neurons * reduced_length) as f64 / signal_length as f64
}

pub fn synapses_for(num_clusters: usize, encoding_neurons: usize, reduced_length: usize) -> u64 {
    num_clusters as u64 * encoding_neurons as u64 * reduced_length as u64
}

/// Weighted affine least squares: minimizes sum w_i (y_i - (c0 + c1 x_i))^2.
fn weighted_affine(points: &[(f64, f64, f64)]) -> Result<(f64, f64)> {
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y, w) in points {
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    let det = sw * sxx - sx * sx;
    if det.abs() < 1e-30 {
        return Err(Error::Hw(
            "calibration needs at least two distinct synapse counts".into(),
        ));
    }
    let c0 = (sxx * sy - sx * sxy) / det;
    let c1 = (sw * sxy - sx * sy) / det;
    Ok((c0, c1))
}

/// Fit the cost curves to a set of calibration points.
pub fn fit_coefficients(points: &[CalibrationPoint]) -> Result<HwCoefficients> {
    if points.len() < 2 {
        return Err(Error::Hw(format!(
            "calibration needs at least 2 points, got {}",
            points.len()
        )));
    }
    for p in points {
        if p.synapses == 0 {
            return Err(Error::Hw("calibration point with zero synapses".into()));
        }
        if !(p.area_mm2 > 0.0 && p.latency_ns > 0.0 && p.power_mw > 0.0) {
            return Err(Error::Hw(format!(
                "calibration point at {} synapses has a non-positive cost",
                p.synapses
            )));
        }
    }
    // relative weighting: each point contributes its fractional error
    let area_pts: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|p| {
            (
                p.synapses as f64,
                p.area_mm2,
                1.0 / (p.area_mm2 * p.area_mm2),
            )
        })
        .collect();
    let power_pts: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|p| {
            (
                p.synapses as f64,
                p.power_mw,
                1.0 / (p.power_mw * p.power_mw),
            )
        })
        .collect();
    let latency_pts: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|p| ((p.synapses as f64).log2(), p.latency_ns, 1.0))
        .collect();
    let (area_base, area_slope) = weighted_affine(&area_pts)?;
    let (power_base, power_slope) = weighted_affine(&power_pts)?;
    let (latency_base, latency_slope) = weighted_affine(&latency_pts)?;
    if area_slope <= 0.0 || power_slope <= 0.0 || latency_slope <= 0.0 {
        return Err(Error::Hw(
            "calibration produced a non-increasing cost curve".into(),
        ));
    }
    Ok(HwCoefficients {
        area_base_mm2: area_base,
        area_per_synapse_mm2: area_slope,
        power_base_mw: power_base,
        power_per_synapse_mw: power_slope,
        latency_base_ns: latency_base,
        latency_per_log2_ns: latency_slope,
        min_calibrated_synapses: points.iter().map(|p| p.synapses).min().unwrap(),
    })
}

/// Fit to the built-in reference designs.
pub fn reference_coefficients() -> HwCoefficients {
    fit_coefficients(&REFERENCE_DESIGNS).expect("built-in calibration points are valid")
}

impl HwCoefficients {
    fn affine_at(&self, n: f64) -> (f64, f64, f64) {
        (
            self.area_base_mm2 + self.area_per_synapse_mm2 * n,
            self.latency_base_ns + self.latency_per_log2_ns * n.log2(),
            self.power_base_mw + self.power_per_synapse_mw * n,
        )
    }

    /// Estimate the cost of a design with `synapses` synapses.
    pub fn estimate(&self, synapses: u64) -> Result<HwEstimate> {
        if synapses == 0 {
            return Err(Error::Hw("a design needs at least one synapse".into()));
        }
        let knee = self.min_calibrated_synapses as f64;
        let n = synapses as f64;
        let (area, latency, power) = if n >= knee {
            self.affine_at(n)
        } else {
            // below the calibrated range: scale down proportionally from the
            // smallest calibrated design
            let (a_knee, l_knee, p_knee) = self.affine_at(knee);
            let ratio = n / knee;
            (a_knee * ratio, l_knee * ratio, p_knee * ratio)
        };
        Ok(HwEstimate {
            synapses,
            area_mm2: area,
            latency_ns: latency,
            power_mw: power,
        })
    }

    /// Estimate the cost of the column a configuration would instantiate.
    pub fn estimate_for(&self, cfg: &TnnConfig) -> Result<HwEstimate> {
        self.estimate(synapse_count(cfg))
    }
}
