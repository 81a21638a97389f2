use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::geom::{field_of_view, target_to_steering, OrbitGeometry, SteeringAngles};
use crate::pattern::{
    extract_metrics, principal_cuts, ActivationMask, ArrayModel, BeamMetrics, CutQuantity, WeightMatrix,
};

use super::{cost, expand_quadrant, BeamSpec, Chromosome, CostOptions, GaConfig};

/// Cost given to masks whose beam cannot be measured (no active chain, or no
/// −3 dB crossing inside the window).
pub const PENALTY_COST: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// `None` when the beam could not be measured.
    pub metrics: Option<BeamMetrics>,
    pub cost: f64,
}

impl Evaluation {
    fn penalty() -> Self {
        Self {
            metrics: None,
            cost: PENALTY_COST,
        }
    }
}

/// Everything fixed for one beam: array model, target, steering and sampling.
pub struct Evaluator<'a> {
    model: &'a ArrayModel,
    spec: BeamSpec,
    steering: SteeringAngles,
    fov_deg: f64,
    cut_step_deg: f64,
    options: CostOptions,
}

impl<'a> Evaluator<'a> {
    pub fn new(model: &'a ArrayModel, geo: &OrbitGeometry, spec: &BeamSpec, ga: &GaConfig) -> Result<Self> {
        spec.validate()?;
        ga.validate()?;
        Ok(Self {
            model,
            spec: *spec,
            steering: target_to_steering(&spec.target, geo)?,
            fov_deg: field_of_view(geo),
            cut_step_deg: ga.cut_step_deg,
            options: ga.cost_options(),
        })
    }

    pub fn with_cut_step(mut self, step_deg: f64) -> Self {
        self.cut_step_deg = step_deg;
        self
    }

    pub fn steering(&self) -> SteeringAngles {
        self.steering
    }

    pub fn fov_deg(&self) -> f64 {
        self.fov_deg
    }

    pub fn cut_step_deg(&self) -> f64 {
        self.cut_step_deg
    }

    pub fn weights(&self, mask: ActivationMask) -> WeightMatrix {
        WeightMatrix::new(mask, self.steering)
    }

    /// Metrics of a mask steered at the target.
    pub fn metrics(&self, mask: &ActivationMask) -> Result<BeamMetrics> {
        let weights = self.weights(mask.clone());
        let (az, el) = principal_cuts(
            self.model,
            &weights,
            self.fov_deg,
            self.cut_step_deg,
            CutQuantity::EirpDbw,
        )?;
        extract_metrics(&az, &el, self.model.config(), &weights)
    }

    pub fn evaluate_mask(&self, mask: &ActivationMask) -> Evaluation {
        if mask.active_count() == 0 {
            return Evaluation::penalty();
        }
        match self.metrics(mask) {
            Ok(m) => match cost(&m, &self.spec, &self.options) {
                Ok(c) if c.is_finite() => Evaluation {
                    metrics: Some(m),
                    cost: c,
                },
                _ => Evaluation::penalty(),
            },
            Err(_) => Evaluation::penalty(),
        }
    }

    pub fn evaluate(&self, chromosome: &Chromosome) -> Result<Evaluation> {
        let mask = expand_quadrant(chromosome, self.model.config())?;
        Ok(self.evaluate_mask(&mask))
    }
}

/// Expands, steers and scores one chromosome.
pub fn evaluate(
    chromosome: &Chromosome,
    model: &ArrayModel,
    geo: &OrbitGeometry,
    spec: &BeamSpec,
    ga: &GaConfig,
) -> Result<Evaluation> {
    Evaluator::new(model, geo, spec, ga)?.evaluate(chromosome)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub weights: WeightMatrix,
    /// Metrics re-measured at the reporting step.
    pub metrics: BeamMetrics,
    /// Cost at the reporting step.
    pub cost: f64,
    pub generations_used: usize,
    /// Best cost seen so far, one entry per evaluated generation.
    pub cost_history: Vec<f64>,
}

#[derive(Clone)]
struct Individual {
    genes: Chromosome,
    eval: Evaluation,
}

fn stream_rng(seed: u64, generation: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((generation as u64) << 32) | index as u64);
    rng
}

fn random_individual(len: usize, index: usize, population: usize, rng: &mut ChaCha8Rng) -> Chromosome {
    // first half: fair coin per gene; second half: a random fill density
    let density = if index < population / 2 {
        0.5
    } else {
        rng.gen_range(0.1..=1.0)
    };
    Chromosome::new((0..len).map(|_| rng.gen_bool(density)).collect())
}

fn tournament<'p>(pop: &'p [Individual], size: usize, rng: &mut ChaCha8Rng) -> &'p Individual {
    let mut best = rng.gen_range(0..pop.len());
    for _ in 1..size {
        let k = rng.gen_range(0..pop.len());
        if pop[k].eval.cost < pop[best].eval.cost || (pop[k].eval.cost == pop[best].eval.cost && k < best) {
            best = k;
        }
    }
    &pop[best]
}

fn breed(pop: &[Individual], ga: &GaConfig, mutation: f64, rng: &mut ChaCha8Rng) -> Chromosome {
    let a = tournament(pop, ga.tournament_size, rng);
    let b = tournament(pop, ga.tournament_size, rng);
    let mut genes = if rng.gen_bool(ga.crossover_rate) {
        a.genes
            .genes
            .iter()
            .zip(&b.genes.genes)
            .map(|(&x, &y)| if rng.gen_bool(0.5) { x } else { y })
            .collect()
    } else {
        a.genes.genes.clone()
    };
    for g in genes.iter_mut() {
        if rng.gen_bool(mutation) {
            *g = !*g;
        }
    }
    Chromosome::new(genes)
}

fn evaluate_all(evaluator: &Evaluator<'_>, genes: Vec<Chromosome>) -> Result<Vec<Individual>> {
    genes
        .into_par_iter()
        .map(|g| {
            let eval = evaluator.evaluate(&g)?;
            Ok(Individual { genes: g, eval })
        })
        .collect()
}

fn best_index(pop: &[Individual]) -> usize {
    // first minimum wins, so ties resolve by position
    let mut best = 0;
    for (k, ind) in pop.iter().enumerate() {
        if ind.eval.cost < pop[best].eval.cost {
            best = k;
        }
    }
    best
}

/// Runs the generational loop and returns the best mask ever seen.
///
/// `report_step_deg` is the cut sampling step for the final re-measurement;
/// pass `ga.cut_step_deg` to report at search resolution.
pub fn synthesize(
    model: &ArrayModel,
    geo: &OrbitGeometry,
    spec: &BeamSpec,
    ga: &GaConfig,
    report_step_deg: f64,
) -> Result<SynthesisResult> {
    let evaluator = Evaluator::new(model, geo, spec, ga)?;
    let config = model.config();
    let len = config.quadrant_len();
    // validates that the grid splits into quadrants
    expand_quadrant(&Chromosome::filled(len, false), config)?;
    let mutation = ga.mutation_rate.unwrap_or(1.0 / len as f64);
    let n = ga.population_size;

    let initial: Vec<Chromosome> = (0..n)
        .map(|i| random_individual(len, i, n, &mut stream_rng(ga.rng_seed, 0, i)))
        .collect();
    let mut population = evaluate_all(&evaluator, initial)?;
    let mut best = population[best_index(&population)].clone();
    let mut history = vec![best.eval.cost];
    let mut generations = 1;

    while generations < ga.max_generations && best.eval.cost >= ga.f_min {
        population.sort_by(|a, b| a.eval.cost.total_cmp(&b.eval.cost));
        let elites: Vec<Individual> = population[..ga.elitism_count].to_vec();
        let children: Vec<Chromosome> = (ga.elitism_count..n)
            .map(|i| breed(&population, ga, mutation, &mut stream_rng(ga.rng_seed, generations, i)))
            .collect();
        let mut next = elites;
        next.extend(evaluate_all(&evaluator, children)?);
        population = next;
        let k = best_index(&population);
        if population[k].eval.cost < best.eval.cost {
            best = population[k].clone();
        }
        history.push(best.eval.cost);
        generations += 1;
    }

    let mask = expand_quadrant(&best.genes, config)?;
    let reporter = Evaluator::new(model, geo, spec, ga)?.with_cut_step(report_step_deg);
    let final_eval = reporter.evaluate_mask(&mask);
    let metrics = match final_eval.metrics {
        Some(m) => m,
        None => reporter.metrics(&mask)?,
    };
    Ok(SynthesisResult {
        weights: reporter.weights(mask),
        metrics,
        cost: final_eval.cost,
        generations_used: generations,
        cost_history: history,
    })
}
