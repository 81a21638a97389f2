//! Genetic-algorithm thinning: evolves one quadrant of the activation mask,
//! mirrored to the full array, against a [`BeamSpec`].

mod engine;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::GroundTarget;
use crate::pattern::{ActivationMask, ArrayConfig, BeamMetrics};

pub use engine::{evaluate, synthesize, Evaluation, Evaluator, SynthesisResult, PENALTY_COST};

/// One synthesis target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSpec {
    pub target: GroundTarget,
    pub beamwidth_az_deg: f64,
    pub beamwidth_el_deg: f64,
    pub sll_min_db: f64,
    pub eirp_dbw: f64,
}

impl BeamSpec {
    pub fn validate(&self) -> Result<()> {
        self.target.validate()?;
        if !(self.beamwidth_az_deg > 0.0 && self.beamwidth_el_deg > 0.0) {
            return Err(Error::Validation(format!(
                "beamwidth targets must be > 0, got {} / {}",
                self.beamwidth_az_deg, self.beamwidth_el_deg
            )));
        }
        if !(self.sll_min_db > 0.0 && self.sll_min_db.is_finite()) {
            return Err(Error::Validation(format!(
                "sll_min_db must be > 0, got {}",
                self.sll_min_db
            )));
        }
        if !self.eirp_dbw.is_finite() {
            return Err(Error::Validation("eirp_dbw must be finite".into()));
        }
        Ok(())
    }
}

/// How the sidelobe term penalises the achieved level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SllPenalty {
    /// Only sidelobes above the minimum (SLL below target) cost anything.
    #[default]
    OneSided,
    /// `|SLL_c − SLL_o| / SLL_o`, penalising over-achievement too.
    Symmetric,
}

/// Domain in which the EIRP relative error is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EirpErrorMode {
    #[default]
    Dbw,
    LinearWatts,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            k1: 1.0,
            k2: 1.0,
            k3: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct CostOptions {
    #[serde(flatten)]
    pub weights: CostWeights,
    pub sll_penalty: SllPenalty,
    pub eirp_error: EirpErrorMode,
}

/// GA hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaConfig {
    pub population_size: usize,
    pub max_generations: usize,
    pub crossover_rate: f64,
    /// Per-gene flip probability; `None` means `1 / quadrant length`.
    pub mutation_rate: Option<f64>,
    pub elitism_count: usize,
    pub tournament_size: usize,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub f_min: f64,
    pub rng_seed: u64,
    pub sll_penalty: SllPenalty,
    pub eirp_error: EirpErrorMode,
    /// Cut sampling step used inside the search loop.
    pub cut_step_deg: f64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 120,
            max_generations: 500,
            crossover_rate: 0.9,
            mutation_rate: None,
            elitism_count: 2,
            tournament_size: 3,
            k1: 1.0,
            k2: 1.0,
            k3: 1.0,
            f_min: 0.02,
            rng_seed: 1,
            sll_penalty: SllPenalty::OneSided,
            eirp_error: EirpErrorMode::Dbw,
            cut_step_deg: 0.01,
        }
    }
}

impl GaConfig {
    /// Reduced budget used for desk-scale runs.
    pub fn desk_scale(seed: u64) -> Self {
        Self {
            population_size: 60,
            max_generations: 150,
            rng_seed: seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.population_size < 2 {
            return bad(format!("population_size must be >= 2, got {}", self.population_size));
        }
        let rate_ok = |r: f64| (0.0..=1.0).contains(&r);
        if !rate_ok(self.crossover_rate) {
            return bad(format!("crossover_rate must be in [0, 1], got {}", self.crossover_rate));
        }
        if let Some(m) = self.mutation_rate {
            if !rate_ok(m) {
                return bad(format!("mutation_rate must be in [0, 1], got {m}"));
            }
        }
        if self.elitism_count >= self.population_size {
            return bad(format!(
                "elitism_count {} must be < population_size {}",
                self.elitism_count, self.population_size
            ));
        }
        if self.tournament_size == 0 {
            return bad("tournament_size must be >= 1".into());
        }
        if !(self.k1 > 0.0 && self.k2 > 0.0 && self.k3 > 0.0) {
            return bad(format!("cost weights must be > 0, got {} {} {}", self.k1, self.k2, self.k3));
        }
        if !(self.f_min >= 0.0) {
            return bad(format!("f_min must be >= 0, got {}", self.f_min));
        }
        if !(self.cut_step_deg > 0.0) {
            return bad(format!("cut_step_deg must be > 0, got {}", self.cut_step_deg));
        }
        Ok(())
    }

    pub fn cost_options(&self) -> CostOptions {
        CostOptions {
            weights: CostWeights {
                k1: self.k1,
                k2: self.k2,
                k3: self.k3,
            },
            sll_penalty: self.sll_penalty,
            eirp_error: self.eirp_error,
        }
    }
}

/// One quadrant of the activation mask, row-major over `(p/2) × (q/2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chromosome {
    pub genes: Vec<bool>,
}

impl Chromosome {
    pub fn new(genes: Vec<bool>) -> Self {
        Self { genes }
    }

    pub fn filled(len: usize, on: bool) -> Self {
        Self { genes: vec![on; len] }
    }

    pub fn popcount(&self) -> usize {
        self.genes.iter().filter(|&&g| g).count()
    }

    /// Reads the corner quadrant back out of a symmetric mask.
    pub fn from_mask(mask: &ActivationMask) -> Result<Self> {
        let (p, q) = (mask.rows(), mask.cols());
        if p % 2 != 0 || q % 2 != 0 {
            return Err(Error::Config(format!("quadrant encoding needs even dimensions, got {p}×{q}")));
        }
        if !mask.is_quadrant_symmetric() {
            return Err(Error::Contract("mask is not quadrant-symmetric".into()));
        }
        let genes = (0..p / 2)
            .flat_map(|i| (0..q / 2).map(move |j| (i, j)))
            .map(|(i, j)| mask.get(i, j))
            .collect();
        Ok(Self { genes })
    }
}

/// Mirrors the quadrant across both centre lines of the `p × q` grid.
pub fn expand_quadrant(chromosome: &Chromosome, config: &ArrayConfig) -> Result<ActivationMask> {
    let (p, q) = (config.subarray_count_x, config.subarray_count_y);
    if p % 2 != 0 || q % 2 != 0 {
        return Err(Error::Config(format!(
            "quadrant symmetry needs an even subarray grid, got {p}×{q}"
        )));
    }
    let (hp, hq) = (p / 2, q / 2);
    if chromosome.genes.len() != hp * hq {
        return Err(Error::Contract(format!(
            "chromosome has {} genes, the {p}×{q} grid needs {}",
            chromosome.genes.len(),
            hp * hq
        )));
    }
    let mut mask = ActivationMask::filled(p, q, false);
    for i in 0..hp {
        for j in 0..hq {
            if chromosome.genes[i * hq + j] {
                mask.set(i, j, true);
                mask.set(p - 1 - i, j, true);
                mask.set(i, q - 1 - j, true);
                mask.set(p - 1 - i, q - 1 - j, true);
            }
        }
    }
    Ok(mask)
}

/// Three-term cost: beamwidth error, sidelobe shortfall and EIRP error, each
/// relative to its target and weighted by `k1..k3`.
pub fn cost(metrics: &BeamMetrics, spec: &BeamSpec, options: &CostOptions) -> Result<f64> {
    let targets = [
        spec.beamwidth_az_deg,
        spec.beamwidth_el_deg,
        spec.sll_min_db,
        spec.eirp_dbw,
    ];
    if targets.contains(&0.0) {
        return Err(Error::Contract("cost targets must be non-zero".into()));
    }
    let rel = |c: f64, o: f64| (c - o).abs() / o.abs();
    let z1 = (rel(metrics.beamwidth_az_deg, spec.beamwidth_az_deg)
        + rel(metrics.beamwidth_el_deg, spec.beamwidth_el_deg))
        * options.weights.k1;
    let sll_term = |c: f64| match options.sll_penalty {
        SllPenalty::OneSided if c >= spec.sll_min_db => 0.0,
        _ => rel(c, spec.sll_min_db),
    };
    let z2 = (sll_term(metrics.sll_az_db) + sll_term(metrics.sll_el_db)) * options.weights.k2;
    let z3 = match options.eirp_error {
        EirpErrorMode::Dbw => rel(metrics.eirp_dbw, spec.eirp_dbw),
        EirpErrorMode::LinearWatts => {
            rel(10f64.powf(metrics.eirp_dbw / 10.0), 10f64.powf(spec.eirp_dbw / 10.0))
        }
    } * options.weights.k3;
    Ok(z1 + z2 + z3)
}
