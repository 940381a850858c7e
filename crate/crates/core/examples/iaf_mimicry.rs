//! Evolves a single cell towards an integrate-and-fire neuron.
//!
//! Usage: `cargo run --release --example iaf_mimicry [generations]`

use enu::experiments::{evaluate_iaf, held_out_seeds};
use enu::harness::{run, Experiment, ExperimentConfig, RunOptions};

fn main() -> enu::Result<()> {
    let generations = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(100);
    let mut cfg = ExperimentConfig::defaults(Experiment::Iaf);
    cfg.es.n_offspring = 128;
    cfg.es.minibatch = 16;
    cfg.es.generations = generations;
    cfg.es.sigma = 0.05;
    cfg.es.learning_rate = 0.2;
    cfg.out_dir = std::env::temp_dir().join("enu_iaf_example");

    let initial = cfg.initial_genome()?;
    let art = run(&cfg, &RunOptions::default())?;
    let seeds = held_out_seeds(cfg.es.seed, 100);
    let before = evaluate_iaf(&initial, &cfg.enu, &cfg.iaf, &seeds)?;
    let after = evaluate_iaf(&art.genome, &cfg.enu, &cfg.iaf, &seeds)?;
    println!("held-out before: {before:?}");
    println!("held-out after:  {after:?}");
    println!("artifacts in {}", cfg.out_dir.display());
    Ok(())
}
