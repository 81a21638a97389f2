use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Per-chain transmit power giving Table-II-scale EIRP with the default
/// array; see `examples/calibrate_power.rs` for the derivation.
pub const DEFAULT_PER_CHAIN_POWER_W: f64 = 0.49;

/// Geometry and RF parameters of the subarrayed planar array.
///
/// The array is `subarray_count_x × subarray_count_y` RF chains, each feeding
/// a uniform, in-phase block of `elements_per_subarray_x ×
/// elements_per_subarray_y` radiators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArrayConfig {
    pub subarray_count_x: usize,
    pub subarray_count_y: usize,
    pub elements_per_subarray_x: usize,
    pub elements_per_subarray_y: usize,
    pub element_pitch_wavelengths: f64,
    pub subarray_pitch_wavelengths: f64,
    pub frequency_hz: f64,
    /// Exponent `q` of the `cos^q θ` element field pattern.
    pub element_pattern_exponent: f64,
    pub aperture_efficiency: f64,
    pub per_chain_power_w: f64,
    /// Permit a subarray pitch different from the tiled block width.
    pub allow_non_tiling: bool,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self {
            subarray_count_x: 36,
            subarray_count_y: 36,
            elements_per_subarray_x: 4,
            elements_per_subarray_y: 4,
            element_pitch_wavelengths: 0.875,
            subarray_pitch_wavelengths: 3.5,
            frequency_hz: 19e9,
            element_pattern_exponent: 1.2,
            aperture_efficiency: 1.0,
            per_chain_power_w: DEFAULT_PER_CHAIN_POWER_W,
            allow_non_tiling: false,
        }
    }
}

impl ArrayConfig {
    /// A `count_x × count_y` grid of single isotropic radiators.
    pub fn isotropic_grid(count_x: usize, count_y: usize, pitch_wavelengths: f64) -> Self {
        Self {
            subarray_count_x: count_x,
            subarray_count_y: count_y,
            elements_per_subarray_x: 1,
            elements_per_subarray_y: 1,
            element_pitch_wavelengths: pitch_wavelengths,
            subarray_pitch_wavelengths: pitch_wavelengths,
            element_pattern_exponent: 0.0,
            per_chain_power_w: 1.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("subarray_count_x", self.subarray_count_x),
            ("subarray_count_y", self.subarray_count_y),
            ("elements_per_subarray_x", self.elements_per_subarray_x),
            ("elements_per_subarray_y", self.elements_per_subarray_y),
        ];
        for (name, n) in counts {
            if n == 0 {
                return Err(Error::Validation(format!("{name} must be >= 1")));
            }
        }
        let positive = [
            ("element_pitch_wavelengths", self.element_pitch_wavelengths),
            ("subarray_pitch_wavelengths", self.subarray_pitch_wavelengths),
            ("frequency_hz", self.frequency_hz),
            ("per_chain_power_w", self.per_chain_power_w),
        ];
        for (name, x) in positive {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::Validation(format!("{name} must be > 0, got {x}")));
            }
        }
        if !(self.element_pattern_exponent >= 0.0 && self.element_pattern_exponent.is_finite()) {
            return Err(Error::Validation(format!(
                "element_pattern_exponent must be >= 0, got {}",
                self.element_pattern_exponent
            )));
        }
        if !(self.aperture_efficiency > 0.0 && self.aperture_efficiency <= 1.0) {
            return Err(Error::Validation(format!(
                "aperture_efficiency must be in (0, 1], got {}",
                self.aperture_efficiency
            )));
        }
        if !self.allow_non_tiling && self.elements_per_subarray_x == self.elements_per_subarray_y {
            let tile = self.elements_per_subarray_x as f64 * self.element_pitch_wavelengths;
            if (tile - self.subarray_pitch_wavelengths).abs() > 1e-9 * tile.max(1.0) {
                return Err(Error::Validation(format!(
                    "subarray pitch {} λ does not tile {} elements at {} λ (set allow_non_tiling to override)",
                    self.subarray_pitch_wavelengths,
                    self.elements_per_subarray_x,
                    self.element_pitch_wavelengths
                )));
            }
        } else if !self.allow_non_tiling {
            return Err(Error::Validation(
                "non-square subarrays need allow_non_tiling with one subarray pitch".into(),
            ));
        }
        Ok(())
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency_hz
    }

    pub fn chain_count(&self) -> usize {
        self.subarray_count_x * self.subarray_count_y
    }

    pub fn elements_per_subarray(&self) -> usize {
        self.elements_per_subarray_x * self.elements_per_subarray_y
    }

    pub fn quadrant_len(&self) -> usize {
        (self.subarray_count_x / 2) * (self.subarray_count_y / 2)
    }

    /// Centre coordinate (in wavelengths) of subarray row `i` along `x`.
    pub fn subarray_x(&self, i: usize) -> f64 {
        (i as f64 - (self.subarray_count_x as f64 - 1.0) / 2.0) * self.subarray_pitch_wavelengths
    }

    pub fn subarray_y(&self, j: usize) -> f64 {
        (j as f64 - (self.subarray_count_y as f64 - 1.0) / 2.0) * self.subarray_pitch_wavelengths
    }
}
