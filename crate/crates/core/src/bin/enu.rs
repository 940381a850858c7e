use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use enu::harness::{self, Experiment, ExperimentConfig, RunOptions};

#[derive(Parser)]
#[command(name = "enu", version, about = "Evolve and replay Evolvable Neural Units")]
struct Cli {
    /// Worker threads for offspring evaluation (defaults to all cores).
    #[arg(long, env = "ENU_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a single cell to mimic an integrate-and-fire neuron.
    EvolveIaf(EvolveArgs),
    /// Evolve a single cell to mimic a neuromodulated STDP synapse.
    EvolveStdp(EvolveArgs),
    /// Evolve a network of cells on the T-maze.
    EvolveTmaze(EvolveArgs),
    /// Run one fully traced evaluation of a saved genome.
    Replay(ReplayArgs),
    /// Check the optimiser on a sphere objective.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct EvolveArgs {
    /// JSON config; missing fields take the experiment defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    generations: Option<u64>,
    #[arg(long)]
    offspring: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Continue from the checkpoint in the output directory.
    #[arg(long)]
    resume: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentArg {
    Iaf,
    Stdp,
    Tmaze,
}

impl From<ExperimentArg> for Experiment {
    fn from(e: ExperimentArg) -> Self {
        match e {
            ExperimentArg::Iaf => Experiment::Iaf,
            ExperimentArg::Stdp => Experiment::Stdp,
            ExperimentArg::Tmaze => Experiment::Tmaze,
        }
    }
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    genome: PathBuf,
    /// Experiment config the genome was evolved with.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Required when the config does not name the experiment.
    #[arg(long, value_enum)]
    experiment: Option<ExperimentArg>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "replay")]
    out: PathBuf,
}

fn load_config(path: Option<&PathBuf>, experiment: Option<Experiment>) -> anyhow::Result<ExperimentConfig> {
    match (path, experiment) {
        (Some(p), e) => ExperimentConfig::load(p, e).with_context(|| format!("loading {}", p.display())),
        (None, Some(e)) => Ok(ExperimentConfig::defaults(e)),
        (None, None) => bail!("pass --config or --experiment"),
    }
}

fn evolve(experiment: Experiment, args: EvolveArgs) -> anyhow::Result<()> {
    let mut cfg = load_config(args.config.as_ref(), Some(experiment))?;
    if let Some(g) = args.generations {
        cfg.es.generations = g;
    }
    if let Some(n) = args.offspring {
        cfg.es.n_offspring = n;
    }
    if let Some(s) = args.sigma {
        cfg.es.sigma = s;
    }
    if let Some(s) = args.seed {
        cfg.es.seed = s;
    }
    if let Some(out) = args.out {
        cfg.out_dir = out;
    }
    cfg.validate()?;
    let artifacts = harness::run(&cfg, &RunOptions { resume: args.resume, stop_after: None })?;
    if let Some(last) = artifacts.history.records.last() {
        println!(
            "{} generations done; last mean {:.6} max {:.6} base {:.6}",
            artifacts.history.records.len(),
            last.mean_fitness,
            last.max_fitness,
            last.base_fitness
        );
    }
    println!("history: {}", artifacts.history_path.display());
    println!("checkpoint: {}", artifacts.checkpoint_path.display());
    println!("genome: {}", artifacts.best_genome_path.display());
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::EvolveIaf(a) => evolve(Experiment::Iaf, a)?,
        Command::EvolveStdp(a) => evolve(Experiment::Stdp, a)?,
        Command::EvolveTmaze(a) => evolve(Experiment::Tmaze, a)?,
        Command::Replay(a) => {
            let cfg = load_config(a.config.as_ref(), a.experiment.map(Into::into))?;
            for p in harness::replay(&a.genome, &cfg, a.seed, &a.out)? {
                println!("{}", p.display());
            }
        }
        Command::Selftest { seed } => {
            let report = harness::selftest(harness::selftest_config(seed))?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            return Ok(report.passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
