//! Radiated-power integrals for directivity.
//!
//! Two independent routes:
//!
//! * [`PowerTable`] expands `|AF|²` into pairwise subarray terms. The
//!   hemisphere integral then reduces to `Σ C(a,b)·I(a,b)·cos(k·Δr·û₀)`,
//!   where `C` is the mask autocorrelation and `I(a,b)` is the integral of
//!   `E_AE²` against the lag phase, tabulated once per array configuration
//!   on a direction-cosine grid.
//! * [`directivity`] integrates `E_T² sin θ` on a two-tier `θ/φ` grid with
//!   the trapezoidal rule.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::SteeringAngles;

use super::field::{element_factor, uniform_line_factor, FieldEvaluator};
use super::{ActivationMask, ArrayConfig, WeightMatrix};

/// Direction-cosine cells per unit length used for the lag table.
pub const DEFAULT_LAG_RESOLUTION: usize = 2048;

/// Lag integrals `I(a, b) = ∬ E_AE² cos(2π a dx u) cos(2π b dy v) dΩ` over
/// the front hemisphere, for `0 ≤ a < p`, `0 ≤ b < q`.
#[derive(Debug, Clone)]
pub struct PowerTable {
    rows: usize,
    cols: usize,
    pitch: f64,
    lags: Vec<f64>,
}

impl PowerTable {
    pub fn new(config: &ArrayConfig) -> Self {
        Self::with_resolution(config, DEFAULT_LAG_RESOLUTION)
    }

    /// Midpoint rule on an `n × n` grid covering the `u, v ≥ 0` quadrant of
    /// the unit disc; `dΩ = du dv / w`. The subarray pattern is even in `u`
    /// and `v`, so the quadrant is weighted by four and the odd terms drop.
    pub fn with_resolution(config: &ArrayConfig, n: usize) -> Self {
        let (p, q) = (config.subarray_count_x, config.subarray_count_y);
        let d = config.subarray_pitch_wavelengths;
        let h = 1.0 / n as f64;
        let nodes: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
        let fx: Vec<f64> = nodes
            .iter()
            .map(|&u| uniform_line_factor(config.elements_per_subarray_x, config.element_pitch_wavelengths, u))
            .collect();
        let fy: Vec<f64> = nodes
            .iter()
            .map(|&v| uniform_line_factor(config.elements_per_subarray_y, config.element_pitch_wavelengths, v))
            .collect();
        let cos_v: Vec<Vec<f64>> = (0..q)
            .map(|b| nodes.iter().map(|&v| (TAU * b as f64 * d * v).cos()).collect())
            .collect();
        let weight = 4.0 * h * h;

        let mut lags = vec![0.0; p * q];
        let mut row_w = vec![0.0; n];
        let mut s = vec![0.0; q];
        for (i, &u) in nodes.iter().enumerate() {
            let jmax = {
                let lim = 1.0 - u * u;
                if lim <= 0.0 {
                    0
                } else {
                    nodes.partition_point(|&v| v * v < lim)
                }
            };
            if jmax == 0 {
                continue;
            }
            for j in 0..jmax {
                let v = nodes[j];
                let w = (1.0 - u * u - v * v).sqrt();
                let e = element_factor(config, w) * fx[i] * fy[j];
                row_w[j] = weight * e * e / w;
            }
            for (b, sb) in s.iter_mut().enumerate() {
                *sb = row_w[..jmax]
                    .iter()
                    .zip(&cos_v[b][..jmax])
                    .map(|(x, c)| x * c)
                    .sum();
            }
            for a in 0..p {
                let ca = (TAU * a as f64 * d * u).cos();
                let out = &mut lags[a * q..(a + 1) * q];
                for (o, sb) in out.iter_mut().zip(&s) {
                    *o += ca * sb;
                }
            }
        }
        Self {
            rows: p,
            cols: q,
            pitch: d,
            lags,
        }
    }

    pub fn lag(&self, a: usize, b: usize) -> f64 {
        self.lags[a * self.cols + b]
    }

    /// Radiated power `∬ E_T² dΩ` of the given weights.
    pub fn radiated_power(&self, weights: &WeightMatrix) -> Result<f64> {
        let mask = &weights.mask;
        if mask.rows() != self.rows || mask.cols() != self.cols {
            return Err(Error::Contract(format!(
                "mask is {}×{} but the power table was built for {}×{}",
                mask.rows(),
                mask.cols(),
                self.rows,
                self.cols
            )));
        }
        if mask.active_count() == 0 {
            return Err(Error::Contract("no active chains: radiated power is zero".into()));
        }
        let (u0, v0, _) = weights.steering.direction_cosines();
        let corr = Autocorrelation::new(mask);
        let (p, q) = (self.rows as isize, self.cols as isize);
        let ex: Vec<Complex64> = (0..p)
            .map(|a| Complex64::from_polar(1.0, TAU * self.pitch * u0 * a as f64))
            .collect();
        let ey: Vec<Complex64> = (-(q - 1)..q)
            .map(|b| Complex64::from_polar(1.0, TAU * self.pitch * v0 * b as f64))
            .collect();

        let mut total = 0.0;
        for a in 0..p {
            for b in -(q - 1)..q {
                if a == 0 && b < 0 {
                    continue;
                }
                let c = corr.get(a, b);
                if c == 0 {
                    continue;
                }
                let phase = (ex[a as usize] * ey[(b + q - 1) as usize]).re;
                let mult = if a == 0 && b == 0 { 1.0 } else { 2.0 };
                total += mult * c as f64 * self.lag(a as usize, b.unsigned_abs()) * phase;
            }
        }
        if !(total > 0.0) {
            return Err(Error::Contract(format!("non-positive radiated power {total}")));
        }
        Ok(total)
    }
}

/// `C(a, b)`: number of active pairs `(m, n)`, `(m + a, n + b)`.
struct Autocorrelation {
    rows: usize,
    cols: usize,
    bits: Option<Vec<u64>>,
    cells: Vec<bool>,
}

impl Autocorrelation {
    fn new(mask: &ActivationMask) -> Self {
        let bits = (mask.cols() <= 64).then(|| {
            (0..mask.rows())
                .map(|i| {
                    (0..mask.cols())
                        .filter(|&j| mask.get(i, j))
                        .fold(0u64, |acc, j| acc | (1u64 << j))
                })
                .collect()
        });
        Self {
            rows: mask.rows(),
            cols: mask.cols(),
            bits,
            cells: mask.cells().to_vec(),
        }
    }

    fn get(&self, a: isize, b: isize) -> u32 {
        debug_assert!(a >= 0);
        let a = a as usize;
        if a >= self.rows || b.unsigned_abs() >= self.cols {
            return 0;
        }
        match &self.bits {
            Some(bits) => (0..self.rows - a)
                .map(|m| {
                    let shifted = if b >= 0 {
                        bits[m + a] >> b
                    } else {
                        bits[m + a] << (-b)
                    };
                    (bits[m] & shifted).count_ones()
                })
                .sum(),
            None => {
                let mut c = 0;
                for m in 0..self.rows - a {
                    for n in 0..self.cols {
                        let n2 = n as isize + b;
                        if n2 < 0 || n2 >= self.cols as isize {
                            continue;
                        }
                        if self.cells[m * self.cols + n] && self.cells[(m + a) * self.cols + n2 as usize] {
                            c += 1;
                        }
                    }
                }
                c
            }
        }
    }
}

/// Two-tier `θ/φ` grid for brute-force hemisphere integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    /// `θ` below which the fine step applies.
    pub inner_limit_deg: f64,
    pub inner_step_deg: f64,
    pub outer_step_deg: f64,
    pub phi_step_deg: f64,
}

impl QuadratureGrid {
    /// Fine steps inside twice the field of view, coarse outside.
    pub fn two_tier(fov_deg: f64) -> Self {
        Self {
            inner_limit_deg: (2.0 * fov_deg).min(90.0),
            inner_step_deg: 0.02,
            outer_step_deg: 0.5,
            phi_step_deg: 0.5,
        }
    }

    pub fn uniform(step_deg: f64) -> Self {
        Self {
            inner_limit_deg: 90.0,
            inner_step_deg: step_deg,
            outer_step_deg: step_deg,
            phi_step_deg: step_deg,
        }
    }

    pub fn refined(&self) -> Self {
        Self {
            inner_step_deg: self.inner_step_deg / 2.0,
            outer_step_deg: self.outer_step_deg / 2.0,
            phi_step_deg: self.phi_step_deg / 2.0,
            ..*self
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.inner_step_deg > 0.0
            && self.outer_step_deg > 0.0
            && self.phi_step_deg > 0.0
            && (0.0..=90.0).contains(&self.inner_limit_deg);
        if ok {
            Ok(())
        } else {
            Err(Error::Contract(format!("invalid quadrature grid {self:?}")))
        }
    }

    /// `θ` nodes in degrees, covering `[0, 90]` with both tier ends included.
    pub fn theta_nodes(&self) -> Vec<f64> {
        let mut nodes = Vec::new();
        push_span(&mut nodes, 0.0, self.inner_limit_deg, self.inner_step_deg);
        push_span(&mut nodes, self.inner_limit_deg, 90.0, self.outer_step_deg);
        nodes
    }

    pub fn phi_count(&self) -> usize {
        (360.0 / self.phi_step_deg).round().max(1.0) as usize
    }
}

fn push_span(nodes: &mut Vec<f64>, from: f64, to: f64, step: f64) {
    if to <= from {
        if nodes.is_empty() {
            nodes.push(from);
        }
        return;
    }
    let n = ((to - from) / step).ceil() as usize;
    let start = usize::from(!nodes.is_empty());
    for k in start..=n {
        nodes.push(from + (to - from) * k as f64 / n as f64);
    }
}

/// `∬ E_T² sin θ dθ dφ` over the front hemisphere on `grid`.
pub fn radiated_power_quadrature(
    config: &ArrayConfig,
    weights: &WeightMatrix,
    grid: &QuadratureGrid,
) -> Result<f64> {
    grid.validate()?;
    let field = FieldEvaluator::new(config, weights)?;
    let thetas = grid.theta_nodes();
    let nphi = grid.phi_count();
    let dphi = TAU / nphi as f64;
    let phis: Vec<(f64, f64)> = (0..nphi).map(|k| (k as f64 * dphi).sin_cos()).collect();

    let ring = |theta_deg: f64| -> f64 {
        let (st, ct) = theta_deg.to_radians().sin_cos();
        let s: f64 = phis
            .iter()
            .map(|&(sp, cp)| field.total_field(st * cp, st * sp, ct).powi(2))
            .sum();
        s * dphi * st
    };
    let values: Vec<f64> = thetas.iter().map(|&t| ring(t)).collect();
    let total: f64 = thetas
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, f)| 0.5 * (t[1] - t[0]).to_radians() * (f[0] + f[1]))
        .sum();
    Ok(total)
}

/// Directivity in dBi at `(θ, φ)` by brute-force grid integration.
pub fn directivity(
    config: &ArrayConfig,
    weights: &WeightMatrix,
    theta_deg: f64,
    phi_deg: f64,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let prad = radiated_power_quadrature(config, weights, grid)?;
    if !(prad > 0.0) {
        return Err(Error::Contract("zero total radiated power".into()));
    }
    let (u, v, w) = SteeringAngles {
        theta_deg,
        phi_deg,
    }
    .direction_cosines();
    let e = FieldEvaluator::new(config, weights)?.total_field(u, v, w);
    Ok(10.0 * (4.0 * PI * e * e / prad).log10())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric_mask(p: usize, q: usize, seed: u64) -> ActivationMask {
        let mut m = ActivationMask::filled(p, q, false);
        let mut s = seed;
        for i in 0..p / 2 {
            for j in 0..q / 2 {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                if (s >> 33) & 1 == 1 {
                    m.set(i, j, true);
                    m.set(p - 1 - i, j, true);
                    m.set(i, q - 1 - j, true);
                    m.set(p - 1 - i, q - 1 - j, true);
                }
            }
        }
        m
    }

    #[test]
    fn isotropic_hemisphere() {
        let c = ArrayConfig::isotropic_grid(1, 1, 0.5);
        let w = WeightMatrix::broadside(ActivationMask::all_active(&c));
        let d = directivity(&c, &w, 0.0, 0.0, &QuadratureGrid::uniform(0.5)).unwrap();
        assert!((d - 3.0103).abs() < 1e-3, "{d}");
        let table = PowerTable::new(&c);
        let prad = table.radiated_power(&w).unwrap();
        assert!((prad - TAU).abs() / TAU < 2e-3, "{prad}");
    }

    #[test]
    fn autocorrelation_bits_match_naive() {
        let m = symmetric_mask(8, 6, 3);
        let fast = Autocorrelation::new(&m);
        let slow = Autocorrelation {
            bits: None,
            ..Autocorrelation::new(&m)
        };
        for a in 0..8 {
            for b in -5..6 {
                assert_eq!(fast.get(a, b), slow.get(a, b), "lag {a},{b}");
            }
        }
        assert_eq!(fast.get(0, 0) as usize, m.active_count());
    }

    #[test]
    fn lag_route_matches_grid_route_small_array() {
        let c = ArrayConfig {
            subarray_count_x: 6,
            subarray_count_y: 6,
            elements_per_subarray_x: 2,
            elements_per_subarray_y: 2,
            element_pitch_wavelengths: 0.7,
            subarray_pitch_wavelengths: 1.4,
            ..ArrayConfig::default()
        };
        let table = PowerTable::with_resolution(&c, 1024);
        for (k, steer) in [SteeringAngles::BROADSIDE, SteeringAngles::new(12.0, 40.0)].into_iter().enumerate() {
            let w = WeightMatrix::new(symmetric_mask(6, 6, k as u64 + 11), steer);
            let lag = table.radiated_power(&w).unwrap();
            let grid = radiated_power_quadrature(&c, &w, &QuadratureGrid::uniform(0.1)).unwrap();
            let err_db = 10.0 * (lag / grid).log10();
            assert!(err_db.abs() < 0.01, "steer {steer:?}: {err_db} dB");
        }
    }

    #[test]
    fn zero_mask_is_contract_error() {
        let c = ArrayConfig::isotropic_grid(2, 2, 0.5);
        let w = WeightMatrix::broadside(ActivationMask::filled(2, 2, false));
        assert!(PowerTable::new(&c).radiated_power(&w).is_err());
        assert!(directivity(&c, &w, 0.0, 0.0, &QuadratureGrid::uniform(1.0)).is_err());
    }

    #[test]
    fn theta_nodes_cover_both_tiers() {
        let g = QuadratureGrid::two_tier(8.53);
        let t = g.theta_nodes();
        assert_eq!(t[0], 0.0);
        assert_eq!(*t.last().unwrap(), 90.0);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        assert!(t.iter().any(|&x| (x - 17.06).abs() < 1e-12));
    }
}
