use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::SteeringAngles;

use super::field::FieldEvaluator;
use super::power::PowerTable;
use super::{ArrayConfig, WeightMatrix};

/// An array configuration together with its precomputed power table.
///
/// Building the table costs a fraction of a second for the default 36×36
/// array; clones share it.
#[derive(Debug, Clone)]
pub struct ArrayModel {
    config: ArrayConfig,
    table: Arc<PowerTable>,
}

impl ArrayModel {
    pub fn new(config: ArrayConfig) -> Result<Self> {
        config.validate()?;
        let table = Arc::new(PowerTable::new(&config));
        Ok(Self { config, table })
    }

    pub fn with_lag_resolution(config: ArrayConfig, cells: usize) -> Result<Self> {
        config.validate()?;
        let table = Arc::new(PowerTable::with_resolution(&config, cells));
        Ok(Self { config, table })
    }

    pub fn config(&self) -> &ArrayConfig {
        &self.config
    }

    pub fn power_table(&self) -> &PowerTable {
        &self.table
    }

    pub fn prepare<'a>(&'a self, weights: &WeightMatrix) -> Result<PreparedBeam<'a>> {
        let field = FieldEvaluator::new(&self.config, weights)?;
        let active = weights.active_chains();
        if active == 0 {
            return Err(Error::Contract("EIRP needs at least one active chain".into()));
        }
        let prad = self.table.radiated_power(weights)?;
        let power_dbw = 10.0 * (active as f64 * self.config.per_chain_power_w).log10();
        let gain_offset_db = 10.0 * (self.config.aperture_efficiency * 4.0 * PI / prad).log10();
        Ok(PreparedBeam {
            field,
            radiated_power: prad,
            power_dbw,
            gain_offset_db,
        })
    }

    pub fn directivity_dbi(&self, weights: &WeightMatrix, theta_deg: f64, phi_deg: f64) -> Result<f64> {
        let beam = self.prepare(weights)?;
        Ok(beam.directivity_dbi(SteeringAngles { theta_deg, phi_deg }))
    }

    /// `G = e_eff · D`, in dBi.
    pub fn gain_dbi(&self, weights: &WeightMatrix, theta_deg: f64, phi_deg: f64) -> Result<f64> {
        let beam = self.prepare(weights)?;
        Ok(beam.gain_dbi(SteeringAngles { theta_deg, phi_deg }))
    }

    /// `10·log10(active_chains · P_chain) + G`, in dBW.
    pub fn eirp_dbw(&self, weights: &WeightMatrix, theta_deg: f64, phi_deg: f64) -> Result<f64> {
        let beam = self.prepare(weights)?;
        Ok(beam.eirp_dbw(SteeringAngles { theta_deg, phi_deg }))
    }
}

/// Field evaluator plus the normalisation constants of one weight matrix.
pub struct PreparedBeam<'a> {
    field: FieldEvaluator<'a>,
    radiated_power: f64,
    power_dbw: f64,
    gain_offset_db: f64,
}

/// `20·log10(x)` with a finite floor for nulls.
pub(crate) fn field_db(x: f64) -> f64 {
    20.0 * x.max(1e-300).log10()
}

impl PreparedBeam<'_> {
    pub fn radiated_power(&self) -> f64 {
        self.radiated_power
    }

    /// Conducted transmit power of the active chains, dBW.
    pub fn power_dbw(&self) -> f64 {
        self.power_dbw
    }

    pub fn total_field_dc(&self, u: f64, v: f64, w: f64) -> f64 {
        self.field.total_field(u, v, w)
    }

    pub fn directivity_dbi(&self, dir: SteeringAngles) -> f64 {
        let (u, v, w) = dir.direction_cosines();
        let e = self.field.total_field(u, v, w);
        10.0 * (4.0 * PI / self.radiated_power).log10() + field_db(e)
    }

    pub fn gain_dbi(&self, dir: SteeringAngles) -> f64 {
        let (u, v, w) = dir.direction_cosines();
        self.gain_offset_db + field_db(self.field.total_field(u, v, w))
    }

    pub fn eirp_dbw(&self, dir: SteeringAngles) -> f64 {
        let (u, v, w) = dir.direction_cosines();
        self.eirp_dbw_dc(u, v, w)
    }

    pub fn eirp_dbw_dc(&self, u: f64, v: f64, w: f64) -> f64 {
        self.power_dbw + self.gain_offset_db + field_db(self.field.total_field(u, v, w))
    }
}

/// Gain in dBi from a directivity in dBi.
pub fn gain_from_directivity(directivity_dbi: f64, aperture_efficiency: f64) -> f64 {
    directivity_dbi + 10.0 * aperture_efficiency.log10()
}
