//! Array factor, subarray pattern and total field.
//!
//! All evaluation happens in direction cosines `(u, v, w)` of the antenna
//! frame; the `θ/φ` entry points are thin wrappers. Subarray centres sit on a
//! grid centred on the array's geometric centre.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::Result;
use crate::geom::SteeringAngles;

use super::{ArrayConfig, WeightMatrix};

/// Field amplitude of one radiator, `cos^q θ`, zero behind the ground plane.
pub fn element_factor(config: &ArrayConfig, w: f64) -> f64 {
    if w < 0.0 {
        0.0
    } else {
        w.powf(config.element_pattern_exponent)
    }
}

/// Signed factor of `n` uniform, in-phase radiators at `pitch` wavelengths
/// along a direction cosine `s`.
pub fn uniform_line_factor(n: usize, pitch: f64, s: f64) -> f64 {
    let centre = (n as f64 - 1.0) / 2.0;
    (0..n)
        .map(|k| (TAU * pitch * s * (k as f64 - centre)).cos())
        .sum()
}

/// `|E_AE|` in direction cosines.
pub fn subarray_field(config: &ArrayConfig, u: f64, v: f64, w: f64) -> f64 {
    let fx = uniform_line_factor(config.elements_per_subarray_x, config.element_pitch_wavelengths, u);
    let fy = uniform_line_factor(config.elements_per_subarray_y, config.element_pitch_wavelengths, v);
    element_factor(config, w) * (fx * fy).abs()
}

/// Subarray pattern `E_AE(θ, φ)`: element pattern times the unsteered
/// subarray factor. Subarrays have no internal phase control, so this term
/// does not follow the beam and is the source of scan loss.
pub fn subarray_pattern(config: &ArrayConfig, theta_deg: f64, phi_deg: f64) -> f64 {
    let (u, v, w) = SteeringAngles {
        theta_deg,
        phi_deg,
    }
    .direction_cosines();
    subarray_field(config, u, v, w)
}

/// Complex array factor over the subarray grid for the given weights.
pub fn array_factor(
    config: &ArrayConfig,
    weights: &WeightMatrix,
    theta_deg: f64,
    phi_deg: f64,
) -> Result<Complex64> {
    weights.check_dims(config)?;
    let (u, v, _) = SteeringAngles {
        theta_deg,
        phi_deg,
    }
    .direction_cosines();
    Ok(GeneralFactor::new(config, weights).eval(u, v))
}

/// `|E_T| = E_AE · |AF|`.
pub fn total_field(
    config: &ArrayConfig,
    weights: &WeightMatrix,
    theta_deg: f64,
    phi_deg: f64,
) -> Result<f64> {
    let af = array_factor(config, weights, theta_deg, phi_deg)?;
    Ok(subarray_pattern(config, theta_deg, phi_deg) * af.norm())
}

struct GeneralFactor {
    xs: Vec<f64>,
    ys: Vec<f64>,
    rows: Vec<Vec<usize>>,
    u0: f64,
    v0: f64,
}

impl GeneralFactor {
    fn new(config: &ArrayConfig, weights: &WeightMatrix) -> Self {
        let (u0, v0, _) = weights.steering.direction_cosines();
        let mask = &weights.mask;
        Self {
            xs: (0..mask.rows()).map(|i| config.subarray_x(i)).collect(),
            ys: (0..mask.cols()).map(|j| config.subarray_y(j)).collect(),
            rows: (0..mask.rows())
                .map(|i| (0..mask.cols()).filter(|&j| mask.get(i, j)).collect())
                .collect(),
            u0,
            v0,
        }
    }

    fn eval(&self, u: f64, v: f64) -> Complex64 {
        let (du, dv) = (u - self.u0, v - self.v0);
        let col: Vec<Complex64> = self
            .ys
            .iter()
            .map(|&y| Complex64::from_polar(1.0, TAU * y * dv))
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, row) in self.xs.iter().zip(&self.rows) {
            if row.is_empty() {
                continue;
            }
            let s: Complex64 = row.iter().map(|&j| col[j]).sum();
            acc += Complex64::from_polar(1.0, TAU * x * du) * s;
        }
        acc
    }
}

/// Real-valued factor for masks mirror-symmetric about both centre lines of
/// an even-by-even grid: `AF = 4 Σ g[m][n] cos(2π x_m Δu) cos(2π y_n Δv)`
/// over one quadrant.
struct SymmetricFactor {
    half_x: Vec<f64>,
    half_y: Vec<f64>,
    quadrant: Vec<Vec<usize>>,
    u0: f64,
    v0: f64,
}

impl SymmetricFactor {
    fn new(config: &ArrayConfig, weights: &WeightMatrix) -> Option<Self> {
        let mask = &weights.mask;
        let (p, q) = (mask.rows(), mask.cols());
        if p % 2 != 0 || q % 2 != 0 || !mask.is_quadrant_symmetric() {
            return None;
        }
        let (u0, v0, _) = weights.steering.direction_cosines();
        Some(Self {
            half_x: (p / 2..p).map(|i| config.subarray_x(i)).collect(),
            half_y: (q / 2..q).map(|j| config.subarray_y(j)).collect(),
            quadrant: (p / 2..p)
                .map(|i| (q / 2..q).filter(|&j| mask.get(i, j)).map(|j| j - q / 2).collect())
                .collect(),
            u0,
            v0,
        })
    }

    fn eval(&self, u: f64, v: f64) -> f64 {
        let (du, dv) = (u - self.u0, v - self.v0);
        let cy: Vec<f64> = self.half_y.iter().map(|&y| (TAU * y * dv).cos()).collect();
        let mut acc = 0.0;
        for (x, row) in self.half_x.iter().zip(&self.quadrant) {
            if row.is_empty() {
                continue;
            }
            let s: f64 = row.iter().map(|&n| cy[n]).sum();
            acc += (TAU * x * du).cos() * s;
        }
        4.0 * acc
    }
}

enum Factor {
    General(GeneralFactor),
    Symmetric(SymmetricFactor),
}

/// Total-field evaluator prepared once per weight matrix.
pub struct FieldEvaluator<'a> {
    config: &'a ArrayConfig,
    factor: Factor,
}

impl<'a> FieldEvaluator<'a> {
    pub fn new(config: &'a ArrayConfig, weights: &WeightMatrix) -> Result<Self> {
        weights.check_dims(config)?;
        let factor = match SymmetricFactor::new(config, weights) {
            Some(s) => Factor::Symmetric(s),
            None => Factor::General(GeneralFactor::new(config, weights)),
        };
        Ok(Self { config, factor })
    }

    /// Forces the general complex path; used to cross-check the fast path.
    pub fn new_general(config: &'a ArrayConfig, weights: &WeightMatrix) -> Result<Self> {
        weights.check_dims(config)?;
        Ok(Self {
            config,
            factor: Factor::General(GeneralFactor::new(config, weights)),
        })
    }

    pub fn is_symmetric_path(&self) -> bool {
        matches!(self.factor, Factor::Symmetric(_))
    }

    pub fn array_factor_magnitude(&self, u: f64, v: f64) -> f64 {
        match &self.factor {
            Factor::General(g) => g.eval(u, v).norm(),
            Factor::Symmetric(s) => s.eval(u, v).abs(),
        }
    }

    pub fn total_field(&self, u: f64, v: f64, w: f64) -> f64 {
        let e = subarray_field(self.config, u, v, w);
        if e == 0.0 {
            return 0.0;
        }
        e * self.array_factor_magnitude(u, v)
    }
}
