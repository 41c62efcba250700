//! Decomposition-based multi-objective evolutionary search (MOEA/D).
//!
//! The bi-objective problem (minimize makespan, maximize profit) is split
//! into `population` scalar subproblems, one per evenly spaced weight vector.
//! Each subproblem keeps one incumbent and mates only within its
//! neighborhood of nearest weight vectors. Offspring are compared with a
//! Tchebycheff aggregation on objectives normalized by the running ideal and
//! nadir estimates.
//!
//! A generation runs in two phases:
//!
//! 1. every subproblem breeds one child from the population as it stood at
//!    the start of the generation, using its own random stream (see
//!    [`stream_rng`]); children are evaluated in parallel;
//! 2. children are merged strictly in subproblem index order: ideal and
//!    nadir updates, archive insertion, then replacement of at most
//!    `replacement_limit` neighbor incumbents.
//!
//! Results are therefore a function of the seed only, independent of the
//! number of worker threads.

mod archive;

pub use archive::{ArchiveEntry, ParetoArchive};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::{Chromosome, Variant};
use crate::scheduler::{Evaluation, Instance, ObjectiveVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoeadConfig {
    pub population: usize,
    pub generations: usize,
    pub neighborhood_t: usize,
    pub replacement_limit: usize,
    pub crossover_rate: f64,
    /// Per-gene mutation probability; `None` means `1 / chromosome length`.
    pub mutation_rate: Option<f64>,
    pub seed: u64,
}

impl Default for MoeadConfig {
    fn default() -> Self {
        Self {
            population: 300,
            generations: 500,
            neighborhood_t: 20,
            replacement_limit: 2,
            crossover_rate: 0.9,
            mutation_rate: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("population must be at least 2, got {0}")]
    Population(usize),
    #[error("neighborhood size {t} must lie in 2..={population}")]
    Neighborhood { t: usize, population: usize },
    #[error("generations must be at least 1")]
    Generations,
    #[error("replacement limit must be at least 1")]
    ReplacementLimit,
    #[error("{name} must be a probability in [0, 1], got {value}")]
    Rate { name: &'static str, value: f64 },
}

impl MoeadConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population < 2 {
            return Err(ConfigError::Population(self.population));
        }
        if self.neighborhood_t < 2 || self.neighborhood_t > self.population {
            return Err(ConfigError::Neighborhood {
                t: self.neighborhood_t,
                population: self.population,
            });
        }
        if self.generations < 1 {
            return Err(ConfigError::Generations);
        }
        if self.replacement_limit < 1 {
            return Err(ConfigError::ReplacementLimit);
        }
        let probability = |name, value: f64| {
            if (0.0..=1.0).contains(&value) {
                Ok(())
            } else {
                Err(ConfigError::Rate { name, value })
            }
        };
        probability("crossover_rate", self.crossover_rate)?;
        if let Some(r) = self.mutation_rate {
            probability("mutation_rate", r)?;
        }
        Ok(())
    }

    /// Shrinks the neighborhood to the population when the latter is smaller.
    pub fn with_population(mut self, population: usize) -> Self {
        self.population = population;
        self.neighborhood_t = self.neighborhood_t.min(population);
        self
    }
}

/// Evenly spaced weights `(i/(N-1), 1 - i/(N-1))`; the first component
/// weighs makespan, the second (negated) profit.
pub fn init_weights(population: usize) -> Result<Vec<[f64; 2]>, ConfigError> {
    if population < 2 {
        return Err(ConfigError::Population(population));
    }
    let last = (population - 1) as f64;
    Ok((0..population)
        .map(|i| {
            let a = i as f64 / last;
            [a, 1.0 - a]
        })
        .collect())
}

/// `max_j w_j * |f_j - z_j|`.
#[inline]
pub fn tchebycheff(f: [f64; 2], w: [f64; 2], z: [f64; 2]) -> f64 {
    (w[0] * (f[0] - z[0]).abs()).max(w[1] * (f[1] - z[1]).abs())
}

/// Indices of the `t` nearest weight vectors to each weight (Euclidean,
/// ties by index), so every subproblem lists itself first. Distances are
/// compared on a 1e-9 grid so that mirror-image neighbors tie despite
/// rounding in the weights.
pub fn neighborhoods(weights: &[[f64; 2]], t: usize) -> Vec<Vec<usize>> {
    weights
        .iter()
        .map(|wi| {
            let mut idx: Vec<usize> = (0..weights.len()).collect();
            let dist = |k: usize| {
                let d0 = wi[0] - weights[k][0];
                let d1 = wi[1] - weights[k][1];
                ((d0 * d0 + d1 * d1).sqrt() * 1e9).round() as u64
            };
            idx.sort_by_key(|&k| (dist(k), k));
            idx.truncate(t);
            idx
        })
        .collect()
}

/// Random stream for `subproblem` at `generation` (generation 0 is the
/// initial population).
///
/// The generator is ChaCha8 keyed by `seed` through `seed_from_u64`; the
/// stream id is `generation << 32 | subproblem`.
pub fn stream_rng(seed: u64, generation: u64, subproblem: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((generation << 32) | subproblem);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subproblem {
    pub weight: [f64; 2],
    pub neighbors: Vec<usize>,
    pub incumbent: Chromosome,
    pub evaluation: Evaluation,
}

struct Offspring {
    child: Chromosome,
    evaluation: Evaluation,
    replace_order: Vec<usize>,
}

/// A running optimizer over one instance.
pub struct Moead<'a> {
    inst: &'a Instance,
    cfg: MoeadConfig,
    variant: Variant,
    mutation_rate: f64,
    subproblems: Vec<Subproblem>,
    /// Best seen per minimized objective `(makespan, -profit)`.
    ideal: [f64; 2],
    /// Worst seen per minimized objective.
    nadir: [f64; 2],
    archive: ParetoArchive,
    generation: usize,
}

impl<'a> Moead<'a> {
    /// Draws and evaluates the initial population.
    pub fn new(inst: &'a Instance, cfg: MoeadConfig, variant: Variant) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let weights = init_weights(cfg.population)?;
        let neighbors = neighborhoods(&weights, cfg.neighborhood_t);

        let initial: Vec<(Chromosome, Evaluation)> = (0..cfg.population)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(cfg.seed, 0, i as u64);
                let c = Chromosome::random(inst, variant, &mut rng);
                let e = c.evaluate(inst);
                (c, e)
            })
            .collect();

        let genes = initial.first().map_or(1, |(c, _)| c.len().max(1));
        let mutation_rate = cfg.mutation_rate.unwrap_or(1.0 / genes as f64);

        let mut engine = Moead {
            inst,
            variant,
            mutation_rate,
            subproblems: Vec::with_capacity(cfg.population),
            ideal: [f64::INFINITY; 2],
            nadir: [f64::NEG_INFINITY; 2],
            archive: ParetoArchive::new(),
            generation: 0,
            cfg,
        };
        for ((weight, neighbors), (incumbent, evaluation)) in weights.into_iter().zip(neighbors).zip(initial) {
            engine.observe(&incumbent, evaluation);
            engine.subproblems.push(Subproblem {
                weight,
                neighbors,
                incumbent,
                evaluation,
            });
        }
        Ok(engine)
    }

    fn observe(&mut self, c: &Chromosome, e: Evaluation) {
        let f = e.objectives.minimization();
        for k in 0..2 {
            self.ideal[k] = self.ideal[k].min(f[k]);
            self.nadir[k] = self.nadir[k].max(f[k]);
        }
        self.archive.insert(ArchiveEntry {
            chromosome: c.clone(),
            objectives: e.objectives,
            elements_produced: e.elements_produced,
        });
    }

    fn normalized(&self, o: &ObjectiveVector) -> [f64; 2] {
        let f = o.minimization();
        let mut out = [0.0; 2];
        for k in 0..2 {
            let range = self.nadir[k] - self.ideal[k];
            let scale = if range > 1e-12 { range } else { 1.0 };
            out[k] = (f[k] - self.ideal[k]) / scale;
        }
        out
    }

    fn breed(&self, i: usize) -> Offspring {
        let mut rng = stream_rng(self.cfg.seed, self.generation as u64 + 1, i as u64);
        let nb = &self.subproblems[i].neighbors;
        let first = rng.random_range(0..nb.len());
        let mut second = rng.random_range(0..nb.len() - 1);
        if second >= first {
            second += 1;
        }
        let p1 = &self.subproblems[nb[first]].incumbent;
        let p2 = &self.subproblems[nb[second]].incumbent;
        let mut child = if rng.random::<f64>() < self.cfg.crossover_rate {
            p1.crossover(p2, &mut rng)
        } else {
            p1.clone()
        };
        child.mutate(self.inst, self.mutation_rate, &mut rng);
        let mut replace_order = nb.clone();
        replace_order.shuffle(&mut rng);
        let evaluation = child.evaluate(self.inst);
        Offspring {
            child,
            evaluation,
            replace_order,
        }
    }

    /// Runs one generation.
    pub fn step(&mut self) {
        let offspring: Vec<Offspring> = (0..self.subproblems.len())
            .into_par_iter()
            .map(|i| self.breed(i))
            .collect();

        for off in offspring {
            self.observe(&off.child, off.evaluation);
            let fc = self.normalized(&off.evaluation.objectives);
            let mut replaced = 0;
            for &j in &off.replace_order {
                if replaced >= self.cfg.replacement_limit {
                    break;
                }
                let w = self.subproblems[j].weight;
                let fj = self.normalized(&self.subproblems[j].evaluation.objectives);
                if tchebycheff(fc, w, [0.0; 2]) < tchebycheff(fj, w, [0.0; 2]) {
                    let sp = &mut self.subproblems[j];
                    sp.incumbent = off.child.clone();
                    sp.evaluation = off.evaluation;
                    replaced += 1;
                }
            }
        }
        self.generation += 1;
    }

    /// Runs the remaining generations and returns the archive.
    pub fn run_to_end(mut self) -> ParetoArchive {
        while self.generation < self.cfg.generations {
            self.step();
        }
        self.archive
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn is_finished(&self) -> bool {
        self.generation >= self.cfg.generations
    }

    pub fn ideal(&self) -> [f64; 2] {
        self.ideal
    }

    pub fn nadir(&self) -> [f64; 2] {
        self.nadir
    }

    pub fn archive(&self) -> &ParetoArchive {
        &self.archive
    }

    pub fn subproblems(&self) -> &[Subproblem] {
        &self.subproblems
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }
}

/// Full optimization run; deterministic given `cfg.seed`.
pub fn run(inst: &Instance, cfg: &MoeadConfig, variant: Variant) -> Result<ParetoArchive, ConfigError> {
    Ok(Moead::new(inst, cfg.clone(), variant)?.run_to_end())
}
