use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{AzEl, SteeringAngles};

use super::cuts::PatternCut;
use super::{ArrayConfig, WeightMatrix};

/// Measured properties of a synthesized beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamMetrics {
    pub beamwidth_az_deg: f64,
    pub beamwidth_el_deg: f64,
    /// Peak minus highest sidelobe, dB. `+∞` when the window holds no sidelobe.
    pub sll_az_db: f64,
    pub sll_el_db: f64,
    pub eirp_dbw: f64,
    /// Direction of the measured peak.
    pub pointing: SteeringAngles,
    pub active_chains: usize,
    pub active_elements: usize,
}

impl BeamMetrics {
    pub fn max_beamwidth_deg(&self) -> f64 {
        self.beamwidth_az_deg.max(self.beamwidth_el_deg)
    }

    pub fn min_sll_db(&self) -> f64 {
        self.sll_az_db.min(self.sll_el_db)
    }
}

/// Main-lobe measurements on one cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutMetrics {
    pub peak_index: usize,
    pub peak_angle_deg: f64,
    pub peak_db: f64,
    pub beamwidth_deg: f64,
    pub sll_db: f64,
}

/// Peak, −3 dB width and sidelobe level of one cut.
///
/// The −3 dB crossings are interpolated linearly in dB between the bracketing
/// samples. The main lobe ends at the first local minimum on each side; the
/// sidelobe level is measured against the highest local maximum outside it,
/// with the window ends counted when the pattern rises into them.
pub fn measure_cut(cut: &PatternCut) -> Result<CutMetrics> {
    let y = &cut.values_db;
    let x = &cut.angles_deg;
    let n = y.len();
    if n < 3 {
        return Err(Error::Metric(format!("{} cut has only {n} samples", cut.plane)));
    }
    let peak_db = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let reference = cut.steering_deg.unwrap_or(0.0);
    let peak = (0..n)
        .filter(|&i| peak_db - y[i] <= 1e-12 * peak_db.abs().max(1.0))
        .min_by(|&a, &b| (x[a] - reference).abs().total_cmp(&(x[b] - reference).abs()))
        .expect("non-empty cut");
    let level = peak_db - 3.0;

    let crossing = |dir: isize| -> Result<f64> {
        let mut i = peak as isize;
        loop {
            let j = i + dir;
            if j < 0 || j >= n as isize {
                return Err(Error::Metric(format!(
                    "{} cut: no −3 dB crossing inside the window (beam too wide)",
                    cut.plane
                )));
            }
            let (yi, yj) = (y[i as usize], y[j as usize]);
            if yj < level {
                let t = (yi - level) / (yi - yj);
                let (xi, xj) = (x[i as usize], x[j as usize]);
                return Ok(xi + t * (xj - xi));
            }
            i = j;
        }
    };
    let left = crossing(-1)?;
    let right = crossing(1)?;

    let mut lo = peak;
    while lo > 0 && y[lo - 1] <= y[lo] {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < n && y[hi + 1] <= y[hi] {
        hi += 1;
    }
    let is_local_max = |i: usize| -> bool {
        let l = i == 0 || y[i] >= y[i - 1];
        let r = i + 1 == n || y[i] >= y[i + 1];
        l && r
    };
    let sidelobe = (0..lo)
        .chain(hi + 1..n)
        .filter(|&i| is_local_max(i))
        .map(|i| y[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let sll_db = if sidelobe.is_finite() {
        peak_db - sidelobe
    } else {
        f64::INFINITY
    };
    Ok(CutMetrics {
        peak_index: peak,
        peak_angle_deg: x[peak],
        peak_db,
        beamwidth_deg: right - left,
        sll_db,
    })
}

/// Beam metrics from the two principal cuts.
pub fn extract_metrics(
    az_cut: &PatternCut,
    el_cut: &PatternCut,
    config: &ArrayConfig,
    weights: &WeightMatrix,
) -> Result<BeamMetrics> {
    weights.check_dims(config)?;
    let az = measure_cut(az_cut)?;
    let el = measure_cut(el_cut)?;
    let chains = weights.active_chains();
    Ok(BeamMetrics {
        beamwidth_az_deg: az.beamwidth_deg,
        beamwidth_el_deg: el.beamwidth_deg,
        sll_az_db: az.sll_db,
        sll_el_db: el.sll_db,
        eirp_dbw: az.peak_db.max(el.peak_db),
        pointing: AzEl {
            az_deg: az.peak_angle_deg,
            el_deg: el.peak_angle_deg,
        }
        .to_steering(),
        active_chains: chains,
        active_elements: chains * config.elements_per_subarray(),
    })
}
