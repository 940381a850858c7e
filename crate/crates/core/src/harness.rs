//! Experiment configuration, run orchestration, checkpoints and trace export.
//!
//! A run directory holds:
//!
//! ```text
//! history.csv        one row per completed generation
//! checkpoint.json    base genome, velocity and generator state
//! best_genome.json   current base genome
//! traces/            sampled traces of the base genome and best offspring
//! ```

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cell::{Chromosome, Genome};
use crate::error::{Error, Result};
use crate::es::{Checkpoint, EsConfig, Evolver, History};
use crate::experiments::{iaf_mean_fitness, rollout, stdp_mean_fitness, tmaze_mean_fitness, SingleEnuConfig};
use crate::io::write_atomic;
use crate::network::{run_agent_episode, AgentConfig, AgentParams};
use crate::reference::{iaf_episode, stdp_episode, EpisodeSignals, IafConfig, StdpConfig};
use crate::seed::{self, tag};
use crate::tmaze::env_trace_csv;

pub const HISTORY_FILE: &str = "history.csv";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const BEST_GENOME_FILE: &str = "best_genome.json";
pub const TRACE_DIR: &str = "traces";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Iaf,
    Stdp,
    Tmaze,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Iaf => "iaf",
            Experiment::Stdp => "stdp",
            Experiment::Tmaze => "tmaze",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub es: EsConfig,
    /// Standard deviation of the initial genome weights.
    pub init_std: f64,
    /// Cell dimensions for the single-cell experiments.
    pub enu: SingleEnuConfig,
    pub iaf: IafConfig,
    pub stdp: StdpConfig,
    pub agent: AgentConfig,
    pub out_dir: PathBuf,
    /// Generations between checkpoints.
    pub checkpoint_interval: u64,
    /// Generations between sampled traces; 0 disables tracing.
    pub trace_interval: u64,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let (minibatch, generations) = match experiment {
            Experiment::Iaf => (32, 3000),
            Experiment::Stdp => (32, 10_000),
            Experiment::Tmaze => (8, 30_000),
        };
        ExperimentConfig {
            experiment,
            es: EsConfig { minibatch, generations, ..EsConfig::default() },
            init_std: 0.1,
            enu: SingleEnuConfig::default(),
            iaf: IafConfig::default(),
            stdp: StdpConfig::default(),
            agent: AgentConfig::default(),
            out_dir: PathBuf::from("runs").join(experiment.name()),
            checkpoint_interval: 50,
            trace_interval: 0,
        }
    }

    /// Parses a JSON config, filling every missing field from the defaults
    /// of its experiment. `experiment` may be omitted when `fallback` is set;
    /// when both are present they must agree.
    pub fn from_json(text: &str, fallback: Option<Experiment>) -> Result<Self> {
        let patch: Value = serde_json::from_str(text)?;
        if !patch.is_object() {
            return Err(Error::config("experiment config must be a JSON object"));
        }
        let declared = match patch.get("experiment") {
            Some(v) => Some(serde_json::from_value::<Experiment>(v.clone())?),
            None => None,
        };
        let experiment = match (declared, fallback) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::config(format!("config is for {}, not {}", a.name(), b.name())));
            }
            (Some(e), _) | (None, Some(e)) => e,
            (None, None) => return Err(Error::config("config does not name an experiment")),
        };
        let mut merged = serde_json::to_value(Self::defaults(experiment))?;
        merge(&mut merged, patch);
        let cfg: Self = serde_json::from_value(merged)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, fallback: Option<Experiment>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?, fallback)
    }

    pub fn validate(&self) -> Result<()> {
        self.es.validate()?;
        if !(self.init_std >= 0.0 && self.init_std.is_finite()) {
            return Err(Error::config("init_std must be finite and non-negative"));
        }
        if self.checkpoint_interval == 0 {
            return Err(Error::config("checkpoint_interval must be positive"));
        }
        match self.experiment {
            Experiment::Iaf => self.iaf.validate()?,
            Experiment::Stdp => self.stdp.validate()?,
            Experiment::Tmaze => {
                self.agent.network.validate()?;
                self.agent.maze.validate()?;
            }
        }
        self.layout().map(|_| ())
    }

    pub fn layout(&self) -> Result<Vec<Chromosome>> {
        match self.experiment {
            Experiment::Iaf => self.enu.iaf_layout(),
            Experiment::Stdp => self.enu.stdp_layout(),
            Experiment::Tmaze => self.agent.network.layout(),
        }
    }

    pub fn initial_genome(&self) -> Result<Genome> {
        Genome::init(self.layout()?, self.es.seed, self.init_std)
    }
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

pub type FitnessFn = Box<dyn Fn(&Genome, &[u64]) -> Result<f64> + Send + Sync>;

/// Mean episode fitness of a genome over the given episode seeds, evaluated
/// in `f32`.
pub fn make_fitness_fn(cfg: &ExperimentConfig) -> Result<FitnessFn> {
    cfg.validate()?;
    let layout = cfg.layout()?;
    let f: FitnessFn = match cfg.experiment {
        Experiment::Iaf => {
            let (enu, iaf) = (cfg.enu.clone(), cfg.iaf.clone());
            Box::new(move |g, seeds| {
                g.check_layout(&layout)?;
                iaf_mean_fitness::<f32>(g, &enu, &iaf, seeds)
            })
        }
        Experiment::Stdp => {
            let (enu, stdp) = (cfg.enu.clone(), cfg.stdp.clone());
            Box::new(move |g, seeds| {
                g.check_layout(&layout)?;
                stdp_mean_fitness::<f32>(g, &enu, &stdp, seeds)
            })
        }
        Experiment::Tmaze => {
            let agent = cfg.agent.clone();
            Box::new(move |g, seeds| {
                g.check_layout(&layout)?;
                tmaze_mean_fitness::<f32>(g, &agent, seeds)
            })
        }
    };
    Ok(f)
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Continue from `checkpoint.json` in the output directory.
    pub resume: bool,
    /// Stop (with a checkpoint) once this many generations are complete.
    pub stop_after: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub history_path: PathBuf,
    pub checkpoint_path: PathBuf,
    pub best_genome_path: PathBuf,
    pub trace_paths: Vec<PathBuf>,
    pub history: History,
    pub genome: Genome,
}

struct RunFiles {
    history: PathBuf,
    checkpoint: PathBuf,
    best: PathBuf,
    traces: PathBuf,
}

impl RunFiles {
    fn new(dir: &Path) -> Self {
        RunFiles {
            history: dir.join(HISTORY_FILE),
            checkpoint: dir.join(CHECKPOINT_FILE),
            best: dir.join(BEST_GENOME_FILE),
            traces: dir.join(TRACE_DIR),
        }
    }

    fn persist(&self, cfg: &ExperimentConfig, evolver: &Evolver, history: &History) -> Result<()> {
        write_atomic(&self.history, history.to_csv().as_bytes())?;
        write_atomic(&self.best, evolver.genome().to_json()?.as_bytes())?;
        evolver.checkpoint(cfg.clone()).save(&self.checkpoint)
    }
}

fn load_resume_state(cfg: &ExperimentConfig, files: &RunFiles) -> Result<(Evolver, History)> {
    let cp: Checkpoint<ExperimentConfig> = Checkpoint::load(&files.checkpoint)?;
    let fail = |reason: String| Error::Checkpoint { path: files.checkpoint.clone(), reason };
    if cp.config.experiment != cfg.experiment {
        return Err(fail(format!("checkpoint belongs to a {} run", cp.config.experiment.name())));
    }
    let fixed = |es: &EsConfig| EsConfig { generations: 0, ..es.clone() };
    if fixed(&cp.config.es) != fixed(&cfg.es) {
        return Err(fail("evolution settings differ from the checkpointed run".into()));
    }
    cp.genome.check_layout(&cfg.layout()?).map_err(|e| fail(e.to_string()))?;
    let evolver = Evolver::from_checkpoint(cfg.es.clone(), &cp)?;

    let text = fs::read_to_string(&files.history).map_err(|e| fail(format!("cannot read history: {e}")))?;
    let mut history = History::from_csv(&text)?;
    history.records.retain(|r| r.generation < cp.generation);
    let contiguous = history.records.iter().enumerate().all(|(i, r)| r.generation == i as u64);
    if history.records.len() as u64 != cp.generation || !contiguous {
        return Err(fail(format!("history does not cover the {} checkpointed generations", cp.generation)));
    }
    Ok((evolver, history))
}

/// Runs (or resumes) evolution for `cfg`, writing every artifact under
/// `cfg.out_dir`.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunArtifacts> {
    let fitness = make_fitness_fn(cfg)?;
    fs::create_dir_all(&cfg.out_dir)?;
    let files = RunFiles::new(&cfg.out_dir);

    let (mut evolver, mut history) = if opts.resume {
        load_resume_state(cfg, &files)?
    } else {
        (Evolver::new(cfg.es.clone(), cfg.initial_genome()?)?, History::default())
    };
    write_atomic(&files.history, history.to_csv().as_bytes())?;
    let mut log = OpenOptions::new().append(true).open(&files.history)?;

    let end = opts.stop_after.map_or(cfg.es.generations, |s| s.min(cfg.es.generations));
    let mut trace_paths = Vec::new();
    while evolver.generation() < end {
        let report = evolver.step(&fitness)?;
        let r = &report.record;
        log::info!(
            "{} generation {}: mean {:.5} max {:.5} base {:.5}",
            cfg.experiment.name(),
            r.generation,
            r.mean_fitness,
            r.max_fitness,
            r.base_fitness
        );
        writeln!(log, "{}", r.csv_row())?;
        history.records.push(report.record.clone());

        if cfg.trace_interval > 0 && r.generation % cfg.trace_interval == 0 {
            let seed = report.episode_seeds[0];
            for (genome, who) in [(&report.base, "base"), (&report.best, "best")] {
                let stem = format!("gen{:06}_{who}", r.generation);
                trace_paths.extend(write_traces(cfg, genome, seed, &files.traces, &stem)?);
            }
        }
        if evolver.generation() % cfg.checkpoint_interval == 0 {
            files.persist(cfg, &evolver, &history)?;
        }
    }
    drop(log);
    files.persist(cfg, &evolver, &history)?;

    Ok(RunArtifacts {
        history_path: files.history,
        checkpoint_path: files.checkpoint,
        best_genome_path: files.best,
        trace_paths,
        history,
        genome: evolver.genome().clone(),
    })
}

fn single_cell_traces(
    cfg: &ExperimentConfig,
    genome: &Genome,
    episode: EpisodeSignals,
    seed: u64,
    dir: &Path,
    stem: &str,
) -> Result<Vec<PathBuf>> {
    let params = genome.unflatten::<f64>()?.remove(0);
    let noise_seed = seed::derive_seed(seed, &[tag::NOISE]);
    let outputs = rollout(&params, std::slice::from_ref(&episode), cfg.enu.output_noise_std, noise_seed)?.remove(0);
    let csv = dir.join(format!("{stem}.csv"));
    let meta = dir.join(format!("{stem}.json"));
    write_atomic(&csv, episode.to_csv_with_output(&outputs)?.as_bytes())?;
    write_atomic(&meta, episode.metadata_json()?.as_bytes())?;
    Ok(vec![csv, meta])
}

/// Runs one fully traced evaluation episode and writes its trace files into
/// `dir`, named after `stem`. Returns the written paths.
pub fn write_traces(
    cfg: &ExperimentConfig,
    genome: &Genome,
    seed: u64,
    dir: &Path,
    stem: &str,
) -> Result<Vec<PathBuf>> {
    genome.check_layout(&cfg.layout()?).map_err(|e| Error::config(e.to_string()))?;
    fs::create_dir_all(dir)?;
    match cfg.experiment {
        Experiment::Iaf => single_cell_traces(cfg, genome, iaf_episode(&cfg.iaf, seed), seed, dir, stem),
        Experiment::Stdp => single_cell_traces(cfg, genome, stdp_episode(&cfg.stdp, seed), seed, dir, stem),
        Experiment::Tmaze => {
            let params = AgentParams::<f64>::from_genome(&cfg.agent.network, genome)?;
            let outcome = run_agent_episode(&cfg.agent, &params, seed, None, true)?;
            let trace = outcome.trace.as_ref().ok_or_else(|| Error::Evaluation("trace missing".into()))?;
            let net = dir.join(format!("{stem}.csv"));
            let env = dir.join(format!("{stem}_env.csv"));
            let meta = dir.join(format!("{stem}.json"));
            write_atomic(&net, trace.to_csv(cfg.agent.network.n_outputs).as_bytes())?;
            write_atomic(&env, env_trace_csv(&trace.env).as_bytes())?;
            let summary = serde_json::json!({
                "seed": seed,
                "fitness": outcome.fitness,
                "food_eaten": outcome.food_eaten,
                "poison_eaten": outcome.poison_eaten,
                "survived_steps": outcome.survived_steps,
                "first_poison": outcome.first_poison,
            });
            write_atomic(&meta, serde_json::to_string_pretty(&summary)?.as_bytes())?;
            Ok(vec![net, env, meta])
        }
    }
}

/// Loads a genome file and writes the traces of one evaluation episode.
/// The genome file is only read.
pub fn replay(genome_path: &Path, cfg: &ExperimentConfig, seed: u64, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let text = fs::read_to_string(genome_path)?;
    let genome = Genome::from_json(&text)?;
    let stem = format!("replay_{}_{seed}", cfg.experiment.name());
    write_traces(cfg, &genome, seed, out_dir, &stem)
}

/// Result of the sphere-objective check of the optimiser.
#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub dim: usize,
    pub generations: u64,
    pub initial_norm: f64,
    pub final_norm: f64,
    /// Required `final_norm / initial_norm`.
    pub target_ratio: f64,
    pub passed: bool,
    #[serde(skip)]
    pub history: History,
}

pub const SELFTEST_DIM: usize = 100;
pub const SELFTEST_TARGET_RATIO: f64 = 0.1;

pub fn selftest_config(seed: u64) -> EsConfig {
    EsConfig { n_offspring: 200, sigma: 0.05, learning_rate: 0.2, momentum: 0.9, minibatch: 1, generations: 100, seed }
}

/// Maximises `-‖θ‖²` from a random unit vector.
pub fn selftest(config: EsConfig) -> Result<SelftestReport> {
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = seed::stream(config.seed, &[tag::INIT]);
    let raw: Vec<f64> = (0..SELFTEST_DIM).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    let theta0 = Genome::flat(raw.iter().map(|v| v / norm).collect());
    let sphere = |g: &Genome, _: &[u64]| -> Result<f64> { Ok(-g.values().iter().map(|v| v * v).sum::<f64>()) };
    let generations = config.generations;
    let (theta, history) = crate::es::evolve(config, theta0, sphere)?;
    let final_norm = theta.values().iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(SelftestReport {
        dim: SELFTEST_DIM,
        generations,
        initial_norm: 1.0,
        final_norm,
        target_ratio: SELFTEST_TARGET_RATIO,
        passed: final_norm <= SELFTEST_TARGET_RATIO,
        history,
    })
}
