//! Evolution Strategies with rank-based fitness shaping and momentum.
//!
//! Each generation samples `n` Gaussian mutations around the base genome,
//! scores every offspring as its mean fitness over `m` shared episode seeds,
//! turns the scores into normalised fifth-power rank weights and moves the
//! base genome along the weighted sum of mutations. Fitness is maximised.

use std::io::Write;
use std::path::Path;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cell::Genome;
use crate::error::{Error, Result};
use crate::seed::{self, tag};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EsConfig {
    pub n_offspring: usize,
    /// Mutation standard deviation.
    pub sigma: f64,
    pub learning_rate: f64,
    pub momentum: f64,
    /// Episodes averaged per offspring evaluation.
    pub minibatch: usize,
    pub generations: u64,
    pub seed: u64,
}

impl Default for EsConfig {
    fn default() -> Self {
        EsConfig {
            n_offspring: 1024,
            sigma: 0.01,
            learning_rate: 1.0,
            momentum: 0.9,
            minibatch: 32,
            generations: 1000,
            seed: 0,
        }
    }
}

impl EsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_offspring < 2 {
            return Err(Error::config("n_offspring must be at least 2"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::config("sigma must be positive"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("learning_rate must be positive"));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::config("momentum must lie in [0, 1)"));
        }
        if self.minibatch == 0 {
            return Err(Error::config("minibatch must be positive"));
        }
        Ok(())
    }
}

/// Standard-Gaussian direction for offspring `index` of `generation`.
pub fn perturbation(dim: usize, seed: u64, generation: u64, index: usize) -> Vec<f64> {
    let mut rng = seed::stream(seed, &[tag::PERTURBATION, generation, index as u64]);
    (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// `n` i.i.d. standard-Gaussian vectors, deterministic in `(seed, generation)`.
pub fn sample_perturbations(dim: usize, n: usize, seed: u64, generation: u64) -> Vec<Vec<f64>> {
    (0..n).into_par_iter().map(|i| perturbation(dim, seed, generation, i)).collect()
}

/// Episode seeds shared by every offspring of one generation.
pub fn episode_seeds(seed: u64, generation: u64, m: usize) -> Vec<u64> {
    (0..m as u64).map(|j| seed::derive_seed(seed, &[tag::EPISODES, generation, j])).collect()
}

/// Normalised fifth-power linear ranks.
///
/// The best offspring gets rank 1, the worst rank 0, linearly in between;
/// weights are `rank⁵ / Σ rank⁵` in the original order. Ties go to the lower
/// index and NaN scores rank below everything else.
pub fn rank_transform(fitness: &[f64]) -> Vec<f64> {
    let n = fitness.len();
    match n {
        0 => return Vec::new(),
        1 => return vec![1.0],
        _ => {}
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (fa, fb) = (fitness[a], fitness[b]);
        match (fa.is_nan(), fb.is_nan()) {
            (true, true) => a.cmp(&b),
            (true, false) => std::cmp::Ordering::Greater,
            (false, true) => std::cmp::Ordering::Less,
            (false, false) => fb.partial_cmp(&fa).unwrap().then(a.cmp(&b)),
        }
    });
    let mut weights = vec![0.0; n];
    let denom = (n - 1) as f64;
    for (pos, &i) in order.iter().enumerate() {
        weights[i] = ((n - 1 - pos) as f64 / denom).powi(5);
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    weights
}

/// `Σ_i weight_i · perturbation_i`.
pub fn estimate_gradient<P: AsRef<[f64]>>(perturbations: &[P], weights: &[f64]) -> Result<Vec<f64>> {
    if perturbations.len() != weights.len() {
        return Err(Error::shape(format!("{} perturbations but {} weights", perturbations.len(), weights.len())));
    }
    let dim = perturbations.first().map_or(0, |p| p.as_ref().len());
    let mut g = vec![0.0; dim];
    for (p, &w) in perturbations.iter().zip(weights) {
        let p = p.as_ref();
        if p.len() != dim {
            return Err(Error::shape("perturbations have different lengths"));
        }
        if w == 0.0 {
            continue;
        }
        for (gi, &pi) in g.iter_mut().zip(p) {
            *gi += w * pi;
        }
    }
    Ok(g)
}

/// Classical momentum ascent: `v ← μ·v + G`, `θ ← θ + α·v`.
pub fn update_base(
    theta: &mut [f64],
    gradient: &[f64],
    velocity: &mut [f64],
    learning_rate: f64,
    momentum: f64,
) -> Result<()> {
    if theta.len() != gradient.len() || theta.len() != velocity.len() {
        return Err(Error::shape("theta, gradient and velocity lengths differ"));
    }
    if gradient.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("ES gradient"));
    }
    for ((t, v), &g) in theta.iter_mut().zip(velocity.iter_mut()).zip(gradient) {
        *v = momentum * *v + g;
        *t += learning_rate * *v;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: u64,
    pub mean_fitness: f64,
    pub max_fitness: f64,
    pub base_fitness: f64,
    pub grad_norm: f64,
}

pub const HISTORY_HEADER: &str = "generation,mean_fitness,max_fitness,base_fitness,grad_norm";

impl GenerationRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.generation, self.mean_fitness, self.max_fitness, self.base_fitness, self.grad_norm
        )
    }

    pub fn parse_csv_row(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 5 {
            return Err(Error::config(format!("malformed history row {line:?}")));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::config(format!("malformed history value {s:?}")));
        Ok(GenerationRecord {
            generation: fields[0]
                .parse()
                .map_err(|_| Error::config(format!("malformed generation {:?}", fields[0])))?,
            mean_fitness: num(fields[1])?,
            max_fitness: num(fields[2])?,
            base_fitness: num(fields[3])?,
            grad_norm: num(fields[4])?,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct History {
    pub records: Vec<GenerationRecord>,
}

impl History {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(HISTORY_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == HISTORY_HEADER => {}
            _ => return Err(Error::config("history CSV has an unexpected header")),
        }
        let records =
            lines.filter(|l| !l.trim().is_empty()).map(GenerationRecord::parse_csv_row).collect::<Result<_>>()?;
        Ok(History { records })
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        w.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }
}

/// Order in which offspring are scored within a generation. Results do not
/// depend on it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Schedule {
    #[default]
    Parallel,
    Sequential,
    Reversed,
}

/// Everything needed to continue a run exactly where it stopped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint<C = EsConfig> {
    pub generation: u64,
    pub genome: Genome,
    pub velocity: Vec<f64>,
    pub rng_state: RngState,
    pub config: C,
}

/// All ES randomness is a pure function of the run seed and the generation
/// counter, so this pair is the complete generator state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngState {
    pub seed: u64,
    pub generation: u64,
}

impl<C: Serialize + for<'de> Deserialize<'de>> Checkpoint<C> {
    pub fn save(&self, path: &Path) -> Result<()> {
        crate::io::write_atomic(path, serde_json::to_string_pretty(self)?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Checkpoint { path: path.to_owned(), reason: e.to_string() })?;
        let cp: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Checkpoint { path: path.to_owned(), reason: e.to_string() })?;
        if cp.velocity.len() != cp.genome.len() {
            return Err(Error::Checkpoint {
                path: path.to_owned(),
                reason: "velocity length differs from genome".into(),
            });
        }
        if cp.rng_state.generation != cp.generation {
            return Err(Error::Checkpoint { path: path.to_owned(), reason: "generator state out of sync".into() });
        }
        Ok(cp)
    }
}

/// Result of one generation.
#[derive(Clone, Debug)]
pub struct GenerationReport {
    pub record: GenerationRecord,
    /// Base genome the generation was sampled around.
    pub base: Genome,
    /// Highest-scoring offspring (lowest index on ties).
    pub best: Genome,
    pub best_fitness: f64,
    pub episode_seeds: Vec<u64>,
}

/// Stateful ES driver; one [`Evolver::step`] per generation.
#[derive(Clone, Debug)]
pub struct Evolver {
    config: EsConfig,
    theta: Genome,
    velocity: Vec<f64>,
    generation: u64,
    schedule: Schedule,
}

impl Evolver {
    pub fn new(config: EsConfig, genome0: Genome) -> Result<Self> {
        config.validate()?;
        let velocity = vec![0.0; genome0.len()];
        Ok(Evolver { config, theta: genome0, velocity, generation: 0, schedule: Schedule::default() })
    }

    pub fn from_checkpoint<C>(config: EsConfig, cp: &Checkpoint<C>) -> Result<Self> {
        config.validate()?;
        if cp.rng_state.seed != config.seed {
            return Err(Error::config("checkpoint seed differs from configured seed"));
        }
        Ok(Evolver {
            config,
            theta: cp.genome.clone(),
            velocity: cp.velocity.clone(),
            generation: cp.generation,
            schedule: Schedule::default(),
        })
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn config(&self) -> &EsConfig {
        &self.config
    }

    pub fn genome(&self) -> &Genome {
        &self.theta
    }

    pub fn velocity(&self) -> &[f64] {
        &self.velocity
    }

    /// Number of completed generations.
    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn checkpoint<C>(&self, config: C) -> Checkpoint<C> {
        Checkpoint {
            generation: self.generation,
            genome: self.theta.clone(),
            velocity: self.velocity.clone(),
            rng_state: RngState { seed: self.config.seed, generation: self.generation },
            config,
        }
    }

    /// Runs one generation. `fitness` receives an offspring genome and the
    /// generation's episode seeds and returns the mean episode fitness.
    pub fn step<F>(&mut self, fitness: &F) -> Result<GenerationReport>
    where
        F: Fn(&Genome, &[u64]) -> Result<f64> + Sync,
    {
        let cfg = &self.config;
        let generation = self.generation;
        let dim = self.theta.len();
        let seeds = episode_seeds(cfg.seed, generation, cfg.minibatch);
        let theta = &self.theta;

        let evaluate = |i: usize| -> Result<(Vec<f64>, f64)> {
            let mut mutation = perturbation(dim, cfg.seed, generation, i);
            for m in &mut mutation {
                *m *= cfg.sigma;
            }
            let values = theta.values().iter().zip(&mutation).map(|(t, m)| t + m).collect();
            let child = theta.with_values(values)?;
            let f = match fitness(&child, &seeds) {
                Ok(f) if !f.is_nan() => f,
                Ok(_) => {
                    log::warn!("generation {generation}: offspring {i} returned NaN fitness");
                    f64::NAN
                }
                Err(e) => {
                    log::warn!("generation {generation}: offspring {i} failed: {e}");
                    f64::NAN
                }
            };
            Ok((mutation, f))
        };

        let n = cfg.n_offspring;
        let scored: Vec<(Vec<f64>, f64)> = match self.schedule {
            Schedule::Parallel => (0..n).into_par_iter().map(evaluate).collect::<Result<_>>()?,
            Schedule::Sequential => (0..n).map(evaluate).collect::<Result<_>>()?,
            Schedule::Reversed => {
                let mut out: Vec<_> = (0..n).rev().map(evaluate).collect::<Result<_>>()?;
                out.reverse();
                out
            }
        };
        let (mutations, scores): (Vec<Vec<f64>>, Vec<f64>) = scored.into_iter().unzip();

        let base_fitness = fitness(theta, &seeds).unwrap_or_else(|e| {
            log::warn!("generation {generation}: base genome evaluation failed: {e}");
            f64::NAN
        });

        let weights = rank_transform(&scores);
        let gradient = estimate_gradient(&mutations, &weights)?;
        let grad_norm = gradient.iter().map(|g| g * g).sum::<f64>().sqrt();

        let finite: Vec<f64> = scores.iter().copied().filter(|f| f.is_finite()).collect();
        let mean_fitness = if finite.is_empty() { f64::NAN } else { finite.iter().sum::<f64>() / finite.len() as f64 };
        let max_fitness = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let best_index = weights.iter().enumerate().fold(0, |best, (i, &w)| if w > weights[best] { i } else { best });

        let base = self.theta.clone();
        let best_values = base.values().iter().zip(&mutations[best_index]).map(|(t, m)| t + m).collect();
        let best = base.with_values(best_values)?;

        update_base(self.theta.values_mut(), &gradient, &mut self.velocity, cfg.learning_rate, cfg.momentum).map_err(
            |e| {
                log::error!("generation {generation}: aborting update: {e}");
                e
            },
        )?;
        self.generation += 1;

        Ok(GenerationReport {
            record: GenerationRecord { generation, mean_fitness, max_fitness, base_fitness, grad_norm },
            base,
            best,
            best_fitness: scores[best_index],
            episode_seeds: seeds,
        })
    }
}

/// Runs `config.generations` generations from `genome0` and returns the final
/// base genome with its history.
pub fn evolve<F>(config: EsConfig, genome0: Genome, fitness: F) -> Result<(Genome, History)>
where
    F: Fn(&Genome, &[u64]) -> Result<f64> + Sync,
{
    let mut evolver = Evolver::new(config, genome0)?;
    let mut history = History::default();
    while evolver.generation() < evolver.config().generations {
        history.records.push(evolver.step(&fitness)?.record);
    }
    Ok((evolver.theta, history))
}
