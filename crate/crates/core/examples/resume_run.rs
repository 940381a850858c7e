//! Interrupts a run, resumes it from the checkpoint, and compares the history
//! with an uninterrupted run.

use enu::harness::{run, Experiment, ExperimentConfig, RunOptions, HISTORY_FILE};

fn main() -> enu::Result<()> {
    let root = std::env::temp_dir().join("enu_resume_example");
    let mut cfg = ExperimentConfig::defaults(Experiment::Stdp);
    cfg.es.n_offspring = 32;
    cfg.es.minibatch = 4;
    cfg.es.generations = 40;
    cfg.checkpoint_interval = 10;

    cfg.out_dir = root.join("straight");
    run(&cfg, &RunOptions::default())?;

    cfg.out_dir = root.join("resumed");
    run(&cfg, &RunOptions { resume: false, stop_after: Some(15) })?;
    run(&cfg, &RunOptions { resume: true, stop_after: None })?;

    let a = std::fs::read(root.join("straight").join(HISTORY_FILE))?;
    let b = std::fs::read(root.join("resumed").join(HISTORY_FILE))?;
    println!("histories identical: {}", a == b);
    Ok(())
}
