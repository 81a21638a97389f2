use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ga::{cost, synthesize, BeamSpec, Evaluator, GaConfig, SynthesisResult};
use crate::geom::{field_of_view, OrbitGeometry};
use crate::pattern::{
    pattern_grid, principal_cuts, ActivationMask, ArrayConfig, ArrayModel, BeamMetrics, CutQuantity,
};

use super::results::{ResultRow, ResultsTable, RowMetrics, RowStatus};
use super::{Beam, ScenarioFile, OUTPUT_FORMAT_VERSION};

pub const RESULTS_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
/// Wall-clock timings; kept apart so `results.csv` stays reproducible.
pub const TIMING_FILE: &str = "timing.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Replaces the scenario's base seed.
    pub seed: Option<u64>,
    /// 1-based beam positions to run; `None` runs all.
    pub beams: Option<Vec<usize>>,
    /// Halve the cut step for the final measurement of each beam.
    pub fine_report: bool,
    /// Fill the `wall_s` column of `results.csv`.
    pub record_wall_time: bool,
    /// `u`/`v` spacing of the exported pattern grid.
    pub grid_uv_step: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            seed: None,
            beams: None,
            fine_report: false,
            record_wall_time: false,
            grid_uv_step: 0.002,
        }
    }
}

/// Per-beam output file names, relative to the run directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeamFiles {
    pub mask: String,
    pub cut_az: String,
    pub cut_el: String,
    pub grid: String,
}

impl BeamFiles {
    fn for_beam(id: &str) -> Self {
        Self {
            mask: format!("beam_{id}_mask.csv"),
            cut_az: format!("beam_{id}_cut_az.csv"),
            cut_el: format!("beam_{id}_cut_el.csv"),
            grid: format!("beam_{id}_grid.csv"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamRecord {
    /// 1-based position in the scenario file.
    pub index: usize,
    pub id: String,
    pub spec: BeamSpec,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub files: Option<BeamFiles>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// Everything needed to re-evaluate a run's masks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format_version: u32,
    pub generator: String,
    /// Cut step of the reported metrics and exported cuts.
    pub report_step_deg: f64,
    pub grid_uv_step: f64,
    /// Quantity stored in the cut and grid files.
    pub pattern_quantity: String,
    pub orbit: OrbitGeometry,
    pub array: ArrayConfig,
    /// Scenario GA settings; each beam runs with its own `seed`.
    pub ga: GaConfig,
    pub beams: Vec<BeamRecord>,
}

/// Seed of the beam at 0-based position `index`, derived from the base seed so
/// that a beam's result does not depend on which other beams run.
pub fn beam_seed(base: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index as u64 + 1);
    rng.gen()
}

fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, &target).map_err(|e| Error::io(&target, e))
}

struct BeamOutcome {
    row: ResultRow,
    record: BeamRecord,
    wall_s: f64,
}

struct Context<'a> {
    scenario: &'a ScenarioFile,
    model: &'a ArrayModel,
    out_dir: &'a Path,
    report_step: f64,
    grid_uv_step: f64,
    base_seed: u64,
}

fn export_beam(ctx: &Context<'_>, files: &BeamFiles, result: &SynthesisResult) -> Result<()> {
    let fov = field_of_view(&ctx.scenario.orbit);
    let (az, el) = principal_cuts(ctx.model, &result.weights, fov, ctx.report_step, CutQuantity::EirpDbw)?;
    let grid = pattern_grid(ctx.model, &result.weights, fov, ctx.grid_uv_step)?;
    write_atomic(ctx.out_dir, &files.mask, &result.weights.mask.to_csv())?;
    write_atomic(ctx.out_dir, &files.cut_az, &az.to_csv())?;
    write_atomic(ctx.out_dir, &files.cut_el, &el.to_csv())?;
    write_atomic(ctx.out_dir, &files.grid, &grid.to_csv())
}

fn run_beam(ctx: &Context<'_>, index: usize, beam: &Beam) -> BeamOutcome {
    let start = Instant::now();
    let seed = beam_seed(ctx.base_seed, index);
    let ga = GaConfig {
        rng_seed: seed,
        ..ctx.scenario.ga.clone()
    };
    let files = BeamFiles::for_beam(&beam.id);
    let outcome = synthesize(ctx.model, &ctx.scenario.orbit, &beam.spec, &ga, ctx.report_step)
        .and_then(|r| export_beam(ctx, &files, &r).map(|()| r));
    let wall_s = start.elapsed().as_secs_f64();
    let mut record = BeamRecord {
        index: index + 1,
        id: beam.id.clone(),
        spec: beam.spec,
        seed,
        files: None,
        error: None,
    };
    let (metrics, status) = match outcome {
        Ok(r) => {
            record.files = Some(files);
            (Some(row_metrics(&r.metrics, r.cost, r.generations_used)), RowStatus::Ok)
        }
        Err(e) => {
            record.error = Some(e.to_string());
            (None, RowStatus::Error(e.to_string()))
        }
    };
    BeamOutcome {
        row: ResultRow {
            scenario: beam.id.clone(),
            lat_deg: beam.spec.target.latitude_deg,
            lon_deg: beam.spec.target.longitude_deg,
            metrics,
            wall_s: None,
            status,
        },
        record,
        wall_s,
    }
}

fn row_metrics(m: &BeamMetrics, cost: f64, generations: usize) -> RowMetrics {
    RowMetrics {
        bw_az_deg: m.beamwidth_az_deg,
        bw_el_deg: m.beamwidth_el_deg,
        sll_db: m.min_sll_db(),
        eirp_dbw: m.eirp_dbw,
        active_chains: m.active_chains,
        active_elements: m.active_elements,
        cost,
        generations,
    }
}

fn selected_beams(scenario: &ScenarioFile, beams: &Option<Vec<usize>>) -> Result<Vec<usize>> {
    let n = scenario.beams.len();
    let Some(list) = beams else {
        return Ok((0..n).collect());
    };
    if list.is_empty() {
        return Err(Error::Config("beam selection is empty".into()));
    }
    let mut picked = Vec::with_capacity(list.len());
    for &b in list {
        if b == 0 || b > n {
            return Err(Error::Config(format!("beam {b} out of range 1..={n}")));
        }
        picked.push(b - 1);
    }
    picked.sort_unstable();
    picked.dedup();
    Ok(picked)
}

/// Synthesizes the selected beams and writes the run directory.
///
/// A beam that fails is recorded with an error status and the run moves on;
/// only configuration and output-directory problems abort the run.
pub fn run(scenario: &ScenarioFile, out_dir: impl AsRef<Path>, options: &RunOptions) -> Result<ResultsTable> {
    scenario.validate()?;
    let out_dir = out_dir.as_ref();
    let picked = selected_beams(scenario, &options.beams)?;
    if !(options.grid_uv_step > 0.0) {
        return Err(Error::Config(format!("grid step must be positive, got {}", options.grid_uv_step)));
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let model = ArrayModel::new(scenario.array.clone())?;
    let base_seed = options.seed.unwrap_or(scenario.ga.rng_seed);
    let ctx = Context {
        scenario,
        model: &model,
        out_dir,
        report_step: scenario.ga.cut_step_deg * if options.fine_report { 0.5 } else { 1.0 },
        grid_uv_step: options.grid_uv_step,
        base_seed,
    };

    let outcomes: Vec<BeamOutcome> = picked
        .par_iter()
        .map(|&k| run_beam(&ctx, k, &scenario.beams[k]))
        .collect();

    let mut table = ResultsTable::default();
    let mut timing = String::from("scenario,wall_s\n");
    let mut records = Vec::with_capacity(outcomes.len());
    for mut o in outcomes {
        if options.record_wall_time {
            o.row.wall_s = Some(o.wall_s);
        }
        timing.push_str(&format!("{},{}\n", o.row.scenario, o.wall_s));
        table.rows.push(o.row);
        records.push(o.record);
    }
    let manifest = Manifest {
        format_version: OUTPUT_FORMAT_VERSION,
        generator: format!("dra-synth {}", env!("CARGO_PKG_VERSION")),
        report_step_deg: ctx.report_step,
        grid_uv_step: options.grid_uv_step,
        pattern_quantity: "eirp_dbw".into(),
        orbit: scenario.orbit,
        array: scenario.array.clone(),
        ga: GaConfig {
            rng_seed: base_seed,
            ..scenario.ga.clone()
        },
        beams: records,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_atomic(out_dir, RESULTS_FILE, &table.to_csv())?;
    write_atomic(out_dir, TIMING_FILE, &timing)?;
    write_atomic(out_dir, MANIFEST_FILE, &(json + "\n"))?;
    Ok(table)
}

/// Reads a run directory's manifest, rejecting unknown format versions.
pub fn load_manifest(dir: impl AsRef<Path>) -> Result<Manifest> {
    let path = dir.as_ref().join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::parse(format!("{}:{}:{}", path.display(), e.line(), e.column()), e.to_string()))?;
    let version = value.get("format_version").and_then(|v| v.as_u64()).ok_or_else(|| {
        Error::parse(format!("{}", path.display()), "missing integer `format_version`")
    })?;
    if version != u64::from(OUTPUT_FORMAT_VERSION) {
        return Err(Error::FormatVersion {
            found: u32::try_from(version).unwrap_or(u32::MAX),
            expected: OUTPUT_FORMAT_VERSION,
        });
    }
    serde_json::from_value(value).map_err(|e| Error::parse(format!("{}", path.display()), e.to_string()))
}

impl ResultsTable {
    /// Loads `results.csv` from a run directory after checking its manifest.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        load_manifest(dir)?;
        let path: PathBuf = dir.join(RESULTS_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Self::from_csv(&text)
    }
}

/// Recomputes a persisted beam's metrics and cost from its mask file.
pub fn reevaluate_beam(dir: impl AsRef<Path>, beam_id: &str) -> Result<(BeamMetrics, f64)> {
    let dir = dir.as_ref();
    let manifest = load_manifest(dir)?;
    let record = manifest
        .beams
        .iter()
        .find(|b| b.id == beam_id)
        .ok_or_else(|| Error::Config(format!("beam {beam_id:?} not in manifest")))?;
    let files = record
        .files
        .as_ref()
        .ok_or_else(|| Error::Config(format!("beam {beam_id:?} has no persisted mask")))?;
    let path = dir.join(&files.mask);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mask = ActivationMask::from_csv(&text)?;
    let model = ArrayModel::new(manifest.array.clone())?;
    let evaluator = Evaluator::new(&model, &manifest.orbit, &record.spec, &manifest.ga)?
        .with_cut_step(manifest.report_step_deg);
    let metrics = evaluator.metrics(&mask)?;
    let c = cost(&metrics, &record.spec, &manifest.ga.cost_options())?;
    Ok((metrics, c))
}
