//! Scenario files, the batch runner and its on-disk outputs.

mod results;
mod run;

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ga::{BeamSpec, GaConfig};
use crate::geom::{size_array, target_to_steering, ArraySizing, GroundTarget, OrbitGeometry};
use crate::pattern::ArrayConfig;

pub use results::{ReportFormat, ResultRow, ResultsTable, RowMetrics, RowStatus, RESULTS_COLUMNS};
pub use run::{
    beam_seed, load_manifest, reevaluate_beam, run, BeamFiles, BeamRecord, Manifest, RunOptions,
    MANIFEST_FILE, RESULTS_FILE, TIMING_FILE,
};

/// Version of the scenario file schema understood by [`load_scenario`].
pub const SCENARIO_FORMAT_VERSION: u32 = 1;
/// Version stamped into every run output directory.
pub const OUTPUT_FORMAT_VERSION: u32 = 1;

/// Nadir coverage inputs used to size the array when a scenario omits `array`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SizingInputs {
    pub coverage_area_km2: f64,
    pub aperture_efficiency: f64,
    pub element_pitch_wavelengths: f64,
    pub elements_per_subarray: usize,
}

impl Default for SizingInputs {
    fn default() -> Self {
        Self {
            coverage_area_km2: 53093.0,
            aperture_efficiency: 1.0,
            element_pitch_wavelengths: 0.875,
            elements_per_subarray: 4,
        }
    }
}

/// One beam as written in a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamEntry {
    /// Defaults to the 1-based position in the file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    /// Shorthand for equal azimuth and elevation targets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beamwidth_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beamwidth_az_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beamwidth_el_deg: Option<f64>,
    pub sll_min_db: f64,
    pub eirp_dbw: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    format_version: u32,
    #[serde(default)]
    orbit: OrbitGeometry,
    #[serde(default)]
    array: Option<ArrayConfig>,
    #[serde(default)]
    sizing: Option<SizingInputs>,
    #[serde(default)]
    ga: GaConfig,
    beams: Vec<BeamEntry>,
}

/// A named synthesis target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Beam {
    pub id: String,
    pub spec: BeamSpec,
}

/// A validated scenario with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub orbit: OrbitGeometry,
    pub array: ArrayConfig,
    /// Present when the array was derived from coverage inputs.
    pub sizing: Option<ArraySizing>,
    pub ga: GaConfig,
    pub beams: Vec<Beam>,
}

impl ScenarioFile {
    /// Builds and validates a scenario from its parts.
    pub fn new(orbit: OrbitGeometry, array: ArrayConfig, ga: GaConfig, beams: Vec<Beam>) -> Result<Self> {
        let s = Self {
            orbit,
            array,
            sizing: None,
            ga,
            beams,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.orbit.validate()?;
        self.array.validate()?;
        self.ga.validate()?;
        if !self.array.subarray_count_x.is_multiple_of(2) || !self.array.subarray_count_y.is_multiple_of(2) {
            return Err(Error::Validation(format!(
                "subarray counts must be even for quadrant-symmetric synthesis, got {}×{}",
                self.array.subarray_count_x, self.array.subarray_count_y
            )));
        }
        if self.beams.is_empty() {
            return Err(Error::Validation("scenario must contain at least one beam".into()));
        }
        let mut seen = HashSet::new();
        for (k, beam) in self.beams.iter().enumerate() {
            let at = |e: Error| Error::Validation(format!("beam {} ({:?}): {e}", k + 1, beam.id));
            if beam.id.is_empty() || !beam.id.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
                return Err(Error::Validation(format!(
                    "beam {}: id {:?} must be non-empty and use only [A-Za-z0-9._-]",
                    k + 1,
                    beam.id
                )));
            }
            if !seen.insert(beam.id.as_str()) {
                return Err(Error::Validation(format!("duplicate beam id {:?}", beam.id)));
            }
            beam.spec.validate().map_err(at)?;
            target_to_steering(&beam.spec.target, &self.orbit).map_err(at)?;
        }
        Ok(())
    }

    /// Parses scenario JSON. `origin` names the source in error messages.
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let field = if path.is_empty() || path == "." {
                String::new()
            } else {
                format!(", field `{path}`")
            };
            Error::parse(
                format!("{origin}:{}:{}{field}", inner.line(), inner.column()),
                inner.to_string(),
            )
        })?;
        if raw.format_version != SCENARIO_FORMAT_VERSION {
            return Err(Error::FormatVersion {
                found: raw.format_version,
                expected: SCENARIO_FORMAT_VERSION,
            });
        }
        let (array, sizing) = match (raw.array, raw.sizing) {
            (Some(_), Some(_)) => {
                return Err(Error::Validation("give either `array` or `sizing`, not both".into()))
            }
            (Some(a), None) => (a, None),
            (None, s) => {
                let inputs = s.unwrap_or_default();
                let sizing = size_array(
                    inputs.coverage_area_km2,
                    &raw.orbit,
                    inputs.aperture_efficiency,
                    inputs.element_pitch_wavelengths,
                    inputs.elements_per_subarray,
                )?;
                let array = ArrayConfig {
                    subarray_count_x: sizing.subarrays_per_dim,
                    subarray_count_y: sizing.subarrays_per_dim,
                    elements_per_subarray_x: inputs.elements_per_subarray,
                    elements_per_subarray_y: inputs.elements_per_subarray,
                    element_pitch_wavelengths: inputs.element_pitch_wavelengths,
                    subarray_pitch_wavelengths: inputs.element_pitch_wavelengths
                        * inputs.elements_per_subarray as f64,
                    aperture_efficiency: inputs.aperture_efficiency,
                    ..ArrayConfig::default()
                };
                (array, Some(sizing))
            }
        };
        let beams = raw
            .beams
            .into_iter()
            .enumerate()
            .map(|(k, b)| beam_from_entry(k, b))
            .collect::<Result<Vec<_>>>()?;
        let scenario = Self {
            orbit: raw.orbit,
            array,
            sizing,
            ga: raw.ga,
            beams,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

fn beam_from_entry(index: usize, b: BeamEntry) -> Result<Beam> {
    let label = || b.id.clone().unwrap_or_else(|| (index + 1).to_string());
    let (az, el) = match (b.beamwidth_deg, b.beamwidth_az_deg, b.beamwidth_el_deg) {
        (Some(w), None, None) => (w, w),
        (None, Some(az), Some(el)) => (az, el),
        _ => {
            return Err(Error::Validation(format!(
                "beam {}: give `beamwidth_deg` or both `beamwidth_az_deg` and `beamwidth_el_deg`",
                label()
            )))
        }
    };
    Ok(Beam {
        id: label(),
        spec: BeamSpec {
            target: GroundTarget {
                latitude_deg: b.latitude_deg,
                longitude_deg: b.longitude_deg,
            },
            beamwidth_az_deg: az,
            beamwidth_el_deg: el,
            sll_min_db: b.sll_min_db,
            eirp_dbw: b.eirp_dbw,
        },
    })
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ScenarioFile::from_json(&text, &path.display().to_string())
}
