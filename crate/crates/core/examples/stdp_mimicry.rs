//! Evolves a single cell towards a neuromodulated spike-timing plasticity rule.
//!
//! Usage: `cargo run --release --example stdp_mimicry [generations]`

use enu::experiments::{evaluate_stdp, held_out_seeds, modulated_stdp_seeds};
use enu::harness::{run, Experiment, ExperimentConfig, RunOptions};

fn main() -> enu::Result<()> {
    let generations = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(200);
    let mut cfg = ExperimentConfig::defaults(Experiment::Stdp);
    cfg.es.n_offspring = 128;
    cfg.es.minibatch = 16;
    cfg.es.generations = generations;
    cfg.es.sigma = 0.05;
    cfg.es.learning_rate = 0.2;
    cfg.out_dir = std::env::temp_dir().join("enu_stdp_example");

    let art = run(&cfg, &RunOptions::default())?;
    let held = evaluate_stdp(&art.genome, &cfg.enu, &cfg.stdp, &held_out_seeds(cfg.es.seed, 200))?;
    let modulated = modulated_stdp_seeds(&cfg.stdp, cfg.es.seed, 200);
    let signs = evaluate_stdp(&art.genome, &cfg.enu, &cfg.stdp, &modulated)?;
    println!("MSE {:.3e} (zero output {:.3e})", held.mse, held.zero_mse);
    println!(
        "weight-change sign agreement {:.2} over {} modulated episodes",
        signs.sign_match_rate, signs.modulated_episodes
    );
    Ok(())
}
