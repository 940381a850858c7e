//! Minimises a quadratic with the evolution strategy and prints the trajectory.

use enu::es::{evolve, EsConfig};
use enu::Genome;

fn main() -> enu::Result<()> {
    let config = EsConfig {
        n_offspring: 200,
        sigma: 0.05,
        learning_rate: 0.2,
        momentum: 0.9,
        minibatch: 1,
        generations: 100,
        seed: 0,
    };
    let start = Genome::flat(vec![0.1; 100]);
    let sphere = |g: &Genome, _: &[u64]| Ok(-g.values().iter().map(|v| v * v).sum::<f64>());
    let (best, history) = evolve(config, start, sphere)?;
    for r in history.records.iter().step_by(10) {
        println!("gen {:3}  base {:9.5}  best offspring {:9.5}", r.generation, r.base_fitness, r.max_fitness);
    }
    let norm = best.values().iter().map(|v| v * v).sum::<f64>().sqrt();
    println!("final |theta| = {norm:.4} (started at 1.0)");
    Ok(())
}
