//! Random-action baseline on the T-maze and a scripted agent for comparison.

use enu::tmaze::{random_agent_baseline, Action, EnvState, MazeConfig, Observation};

fn main() {
    let cfg = MazeConfig::default();
    let (mean, std) = random_agent_baseline(&cfg, 1000, 0);
    println!("random policy: mean reward {mean:.3}, std {std:.3}");

    // Walk forward, turn left at walls, turn away from red.
    let mut total = 0.0;
    for seed in 0..100 {
        let (mut env, mut obs) = EnvState::reset(&cfg, seed);
        while !env.done() {
            let action = match obs {
                Observation::Wall | Observation::Red => Action::Left,
                _ => Action::Forward,
            };
            let out = env.step(action);
            total += out.reward;
            obs = out.observation;
        }
    }
    println!("reflex policy: mean reward {:.3}", total / 100.0);
}
