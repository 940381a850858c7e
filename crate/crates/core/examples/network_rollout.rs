//! Runs one traced T-maze episode with a randomly initialised network agent.

use enu::network::{run_agent_episode, AgentConfig, AgentParams};
use enu::Genome;

fn main() -> enu::Result<()> {
    let cfg = AgentConfig::default();
    let genome = Genome::init(cfg.network.layout()?, 3, 0.5)?;
    let params = AgentParams::<f32>::from_genome(&cfg.network, &genome)?;
    let outcome = run_agent_episode(&cfg, &params, 11, Some(60), true)?;
    let trace = outcome.trace.expect("traced run");
    for row in trace.env.iter().take(20) {
        println!("{}", row.csv_row());
    }
    println!(
        "fitness {} food {} poison {} survived {} steps",
        outcome.fitness, outcome.food_eaten, outcome.poison_eaten, outcome.survived_steps
    );
    Ok(())
}
