use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{AzEl, SteeringAngles};

use super::model::{field_db, ArrayModel};
use super::WeightMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutPlane {
    /// Azimuth varies, elevation held at the steering elevation.
    Azimuth,
    /// Elevation varies, azimuth held at the steering azimuth.
    Elevation,
}

impl fmt::Display for CutPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CutPlane::Azimuth => "azimuth",
            CutPlane::Elevation => "elevation",
        })
    }
}

/// What a sampled cut holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutQuantity {
    #[default]
    EirpDbw,
    /// `20·log10|E_T|` relative to the largest sample in the cut.
    NormalizedFieldDb,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternCut {
    pub plane: CutPlane,
    pub angles_deg: Vec<f64>,
    pub values_db: Vec<f64>,
    /// Steering angle in this cut's coordinate, when known.
    pub steering_deg: Option<f64>,
}

impl PatternCut {
    pub fn new(plane: CutPlane, angles_deg: Vec<f64>, values_db: Vec<f64>, steering_deg: Option<f64>) -> Result<Self> {
        if angles_deg.len() != values_db.len() {
            return Err(Error::Contract(format!(
                "cut has {} angles but {} values",
                angles_deg.len(),
                values_db.len()
            )));
        }
        if angles_deg.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Contract("cut angles must be strictly increasing".into()));
        }
        if angles_deg.iter().chain(&values_db).any(|x| !x.is_finite()) {
            return Err(Error::Contract("cut samples must be finite".into()));
        }
        Ok(Self {
            plane,
            angles_deg,
            values_db,
            steering_deg,
        })
    }

    pub fn len(&self) -> usize {
        self.angles_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles_deg.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("angle_deg,value_db\n");
        for (a, v) in self.angles_deg.iter().zip(&self.values_db) {
            let _ = writeln!(out, "{a},{v}");
        }
        out
    }

    pub fn from_csv(plane: CutPlane, text: &str) -> Result<Self> {
        let rows = parse_numeric_csv(text, &["angle_deg", "value_db"])?;
        let (angles, values) = rows.into_iter().map(|r| (r[0], r[1])).unzip();
        Self::new(plane, angles, values, None)
    }
}

/// Pattern sampled over a `u/v` grid, stored as `(θ, φ, value)` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternGrid {
    pub theta_deg: Vec<f64>,
    pub phi_deg: Vec<f64>,
    pub values_db: Vec<f64>,
}

impl PatternGrid {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta_deg,phi_deg,value_db\n");
        for ((t, p), v) in self.theta_deg.iter().zip(&self.phi_deg).zip(&self.values_db) {
            let _ = writeln!(out, "{t},{p},{v}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = parse_numeric_csv(text, &["theta_deg", "phi_deg", "value_db"])?;
        let mut g = PatternGrid {
            theta_deg: Vec::with_capacity(rows.len()),
            phi_deg: Vec::with_capacity(rows.len()),
            values_db: Vec::with_capacity(rows.len()),
        };
        for r in rows {
            g.theta_deg.push(r[0]);
            g.phi_deg.push(r[1]);
            g.values_db.push(r[2]);
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.values_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values_db.is_empty()
    }
}

fn parse_numeric_csv(text: &str, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::parse("line 1", "missing header row"))?;
    let got: Vec<&str> = first.trim_end_matches('\r').split(',').map(str::trim).collect();
    if got != header {
        return Err(Error::parse(
            "line 1",
            format!("expected header {:?}, found {:?}", header.join(","), first),
        ));
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(Error::parse(
                format!("line {}", i + 1),
                format!("expected {} fields, found {}", header.len(), fields.len()),
            ));
        }
        let mut row = Vec::with_capacity(header.len());
        for (k, f) in fields.iter().enumerate() {
            let x = f64::from_str(f.trim()).map_err(|e| {
                Error::parse(format!("line {}, field {}", i + 1, header[k]), format!("{e}: {f:?}"))
            })?;
            row.push(x);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Sample angles `centre + k·step` inside `[-half_width, half_width]`.
pub fn cut_angles(centre_deg: f64, half_width_deg: f64, step_deg: f64) -> Vec<f64> {
    let eps = 1e-9;
    let kmin = ((-half_width_deg - centre_deg) / step_deg - eps).ceil() as i64;
    let kmax = ((half_width_deg - centre_deg) / step_deg + eps).floor() as i64;
    (kmin..=kmax).map(|k| centre_deg + k as f64 * step_deg).collect()
}

/// Samples the azimuth and elevation cuts through the steering direction over
/// `±fov_deg`, at `step_deg` spacing anchored on the steering angle.
pub fn principal_cuts(
    model: &ArrayModel,
    weights: &WeightMatrix,
    fov_deg: f64,
    step_deg: f64,
    quantity: CutQuantity,
) -> Result<(PatternCut, PatternCut)> {
    if !(step_deg > 0.0 && fov_deg > 0.0) {
        return Err(Error::Contract(format!(
            "cut step {step_deg} and field of view {fov_deg} must be positive"
        )));
    }
    let beam = model.prepare(weights)?;
    let steer = weights.steering.to_az_el();
    let sample = |dir: AzEl| -> f64 {
        let (u, v, w) = dir.direction_cosines();
        match quantity {
            CutQuantity::EirpDbw => beam.eirp_dbw_dc(u, v, w),
            CutQuantity::NormalizedFieldDb => field_db(beam.total_field_dc(u, v, w)),
        }
    };
    let build = |plane: CutPlane, centre: f64| -> Result<PatternCut> {
        let angles = cut_angles(centre, fov_deg, step_deg);
        let mut values: Vec<f64> = angles
            .iter()
            .map(|&a| match plane {
                CutPlane::Azimuth => sample(AzEl {
                    az_deg: a,
                    el_deg: steer.el_deg,
                }),
                CutPlane::Elevation => sample(AzEl {
                    az_deg: steer.az_deg,
                    el_deg: a,
                }),
            })
            .collect();
        if quantity == CutQuantity::NormalizedFieldDb {
            let peak = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            values.iter_mut().for_each(|x| *x -= peak);
        }
        PatternCut::new(plane, angles, values, Some(centre))
    };
    Ok((
        build(CutPlane::Azimuth, steer.az_deg)?,
        build(CutPlane::Elevation, steer.el_deg)?,
    ))
}

/// EIRP over a square `u/v` grid spanning `±sin(fov)`.
pub fn pattern_grid(model: &ArrayModel, weights: &WeightMatrix, fov_deg: f64, uv_step: f64) -> Result<PatternGrid> {
    if !(uv_step > 0.0) {
        return Err(Error::Contract(format!("grid step must be positive, got {uv_step}")));
    }
    let beam = model.prepare(weights)?;
    let extent = fov_deg.to_radians().sin();
    let n = (extent / uv_step).floor() as i64;
    let mut grid = PatternGrid {
        theta_deg: Vec::new(),
        phi_deg: Vec::new(),
        values_db: Vec::new(),
    };
    for i in -n..=n {
        for j in -n..=n {
            let (u, v) = (i as f64 * uv_step, j as f64 * uv_step);
            let w = (1.0 - u * u - v * v).sqrt();
            let dir = SteeringAngles::from_direction_cosines(u, v, w);
            grid.theta_deg.push(dir.theta_deg);
            grid.phi_deg.push(dir.phi_deg);
            grid.values_db.push(beam.eirp_dbw_dc(u, v, w));
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{ActivationMask, ArrayConfig};
    use proptest::prelude::*;

    #[test]
    fn sample_count_at_broadside() {
        assert_eq!(cut_angles(0.0, 8.55, 0.01).len(), 1711);
    }

    #[test]
    fn steering_angle_is_a_sample() {
        let a = cut_angles(3.217, 8.55, 0.01);
        assert!(a.contains(&3.217));
        assert!(a[0] >= -8.55 - 1e-9 && *a.last().unwrap() <= 8.55 + 1e-9);
    }

    #[test]
    fn csv_header_is_checked() {
        assert!(PatternCut::from_csv(CutPlane::Azimuth, "angle,value\n1,2\n").is_err());
        assert!(PatternCut::from_csv(CutPlane::Azimuth, "angle_deg,value_db\n1,x\n").is_err());
        assert!(PatternCut::from_csv(CutPlane::Azimuth, "angle_deg,value_db\n2,0\n1,0\n").is_err());
    }

    #[test]
    fn cut_csv_round_trip() {
        let c = PatternCut::new(CutPlane::Elevation, vec![-0.5, 0.1, 0.30000000000000004], vec![-3.25, 1e-17, 62.2], None).unwrap();
        let back = PatternCut::from_csv(CutPlane::Elevation, &c.to_csv()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn broadside_symmetric_cuts_are_symmetric() {
        let cfg = ArrayConfig {
            subarray_count_x: 8,
            subarray_count_y: 8,
            ..ArrayConfig::default()
        };
        let model = ArrayModel::with_lag_resolution(cfg.clone(), 256).unwrap();
        let mut m = ActivationMask::all_active(&cfg);
        for (i, j) in [(0, 0), (1, 3)] {
            m.set(i, j, false);
            m.set(7 - i, j, false);
            m.set(i, 7 - j, false);
            m.set(7 - i, 7 - j, false);
        }
        let w = WeightMatrix::broadside(m);
        let (az, el) = principal_cuts(&model, &w, 8.55, 0.01, CutQuantity::EirpDbw).unwrap();
        for cut in [&az, &el] {
            let n = cut.len();
            for k in 0..n / 2 {
                assert!((cut.angles_deg[k] + cut.angles_deg[n - 1 - k]).abs() < 1e-12);
                assert!((cut.values_db[k] - cut.values_db[n - 1 - k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn grid_peak_near_steering() {
        let cfg = ArrayConfig {
            subarray_count_x: 8,
            subarray_count_y: 8,
            ..ArrayConfig::default()
        };
        let model = ArrayModel::with_lag_resolution(cfg.clone(), 256).unwrap();
        let w = WeightMatrix::broadside(ActivationMask::all_active(&cfg));
        let g = pattern_grid(&model, &w, 8.55, 0.01).unwrap();
        let k = (0..g.len()).max_by(|&a, &b| g.values_db[a].total_cmp(&g.values_db[b])).unwrap();
        assert!(g.theta_deg[k] < 1e-9);
        let back = PatternGrid::from_csv(&g.to_csv()).unwrap();
        assert_eq!(back, g);
    }

    proptest! {
        // isotropic radiators: the array factor alone peaks at the steering angle
        #[test]
        fn cut_peak_at_steering(theta in 0.0f64..7.0, phi in 0.0f64..360.0, seed in any::<u64>()) {
            let cfg = ArrayConfig { subarray_count_x: 10, subarray_count_y: 10, ..ArrayConfig::isotropic_grid(10, 10, 3.5) };
            let model = ArrayModel::with_lag_resolution(cfg.clone(), 128).unwrap();
            let mut m = ActivationMask::filled(10, 10, false);
            for k in 0..100 { if (seed >> (k % 64)) & 1 == 1 || k == 0 { m.set(k / 10, k % 10, true); } }
            let w = WeightMatrix::new(m, SteeringAngles::new(theta, phi));
            let (az, el) = principal_cuts(&model, &w, 8.55, 0.01, CutQuantity::NormalizedFieldDb).unwrap();
            for cut in [az, el] {
                let s = cut.steering_deg.unwrap();
                let k = cut.angles_deg.iter().position(|&a| a == s).unwrap();
                prop_assert!(cut.values_db[k].abs() < 1e-9);
            }
        }
    }
}
