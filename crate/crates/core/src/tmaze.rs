//! T-maze foraging task: a stem leading to a junction with two arms, food at
//! the end of one arm and poison at the end of the other.
//!
//! ```text
//!   P . . J . . F        y = stem_len
//!         .
//!         .
//!         S              y = 0, facing north
//! ```
//!
//! Eating food or poison teleports the agent back to the start. Energy drains
//! by one per step and is refilled only by food; at zero the agent freezes.
//! After enough meals the food and poison may swap sides.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{self, StreamRng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MazeConfig {
    /// Forward moves from the start tile to the junction.
    pub stem_len: u32,
    /// Forward moves from the junction to an arm's end tile.
    pub arm_len: u32,
    pub food_reward: f64,
    pub poison_reward: f64,
    pub energy_init: u32,
    /// Meals after which the sides become eligible to swap.
    pub switch_after_eats: u32,
    /// Per-meal swap probability once eligible.
    pub switch_prob: f64,
    pub max_steps: u32,
}

impl Default for MazeConfig {
    fn default() -> Self {
        MazeConfig {
            stem_len: 3,
            arm_len: 3,
            food_reward: 1.0,
            poison_reward: -1.0,
            energy_init: 40,
            switch_after_eats: 3,
            switch_prob: 0.25,
            max_steps: 400,
        }
    }
}

impl MazeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.stem_len == 0 || self.arm_len == 0 {
            return Err(Error::config("maze stem and arms need at least one tile"));
        }
        if self.energy_init == 0 || self.max_steps == 0 {
            return Err(Error::config("energy_init and max_steps must be positive"));
        }
        if !(0.0..=1.0).contains(&self.switch_prob) {
            return Err(Error::config("switch_prob must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn start(&self) -> (i32, i32) {
        (0, 0)
    }

    pub fn junction(&self) -> (i32, i32) {
        (0, self.stem_len as i32)
    }

    pub fn item_tile(&self, side: Side) -> (i32, i32) {
        let x = self.arm_len as i32;
        match side {
            Side::Left => (-x, self.stem_len as i32),
            Side::Right => (x, self.stem_len as i32),
        }
    }

    pub fn is_tile(&self, (x, y): (i32, i32)) -> bool {
        let stem = self.stem_len as i32;
        let arm = self.arm_len as i32;
        (x == 0 && (0..=stem).contains(&y)) || (y == stem && (-arm..=arm).contains(&x))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Heading {
    North,
    East,
    South,
    West,
}

impl Heading {
    pub fn offset(self) -> (i32, i32) {
        match self {
            Heading::North => (0, 1),
            Heading::East => (1, 0),
            Heading::South => (0, -1),
            Heading::West => (-1, 0),
        }
    }

    pub fn left(self) -> Heading {
        match self {
            Heading::North => Heading::West,
            Heading::West => Heading::South,
            Heading::South => Heading::East,
            Heading::East => Heading::North,
        }
    }

    pub fn right(self) -> Heading {
        self.left().left().left()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Forward,
    Left,
    Right,
    NoOp,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::Forward, Action::Left, Action::Right, Action::NoOp];
    /// Actions an output neuron can be mapped to.
    pub const MOTOR: [Action; 3] = [Action::Forward, Action::Left, Action::Right];
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Action::Forward => "forward",
            Action::Left => "left",
            Action::Right => "right",
            Action::NoOp => "noop",
        };
        f.write_str(s)
    }
}

/// Content of the tile directly ahead of the agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Observation {
    Wall,
    Green,
    Red,
    Empty,
}

impl Observation {
    /// Index of the detector that fires for this observation, if any.
    pub fn detector(self) -> Option<usize> {
        match self {
            Observation::Wall => Some(0),
            Observation::Green => Some(1),
            Observation::Red => Some(2),
            Observation::Empty => None,
        }
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Observation::Wall => "wall",
            Observation::Green => "green",
            Observation::Red => "red",
            Observation::Empty => "empty",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
}

#[derive(Clone, Debug)]
pub struct EnvState {
    cfg: MazeConfig,
    pub position: (i32, i32),
    pub heading: Heading,
    pub energy: u32,
    pub food_side: Side,
    pub eats_since_switch: u32,
    pub alive: bool,
    pub step_count: u32,
    pub food_eaten: u32,
    pub poison_eaten: u32,
    pub switches: u32,
    rng: StreamRng,
}

impl EnvState {
    /// Fresh episode: agent at the stem base facing the junction, food side
    /// from a fair seeded coin.
    pub fn reset(cfg: &MazeConfig, seed: u64) -> (Self, Observation) {
        let mut rng = seed::stream(seed, &[]);
        let food_side = if rng.random::<bool>() { Side::Left } else { Side::Right };
        let state = EnvState {
            cfg: cfg.clone(),
            position: cfg.start(),
            heading: Heading::North,
            energy: cfg.energy_init,
            food_side,
            eats_since_switch: 0,
            alive: true,
            step_count: 0,
            food_eaten: 0,
            poison_eaten: 0,
            switches: 0,
            rng,
        };
        let obs = state.observe();
        (state, obs)
    }

    pub fn config(&self) -> &MazeConfig {
        &self.cfg
    }

    pub fn ahead(&self) -> (i32, i32) {
        let (dx, dy) = self.heading.offset();
        (self.position.0 + dx, self.position.1 + dy)
    }

    pub fn observe(&self) -> Observation {
        let ahead = self.ahead();
        if !self.cfg.is_tile(ahead) {
            Observation::Wall
        } else if ahead == self.cfg.item_tile(self.food_side) {
            Observation::Green
        } else if ahead == self.cfg.item_tile(self.food_side.other()) {
            Observation::Red
        } else {
            Observation::Empty
        }
    }

    pub fn done(&self) -> bool {
        self.step_count >= self.cfg.max_steps
    }

    fn teleport_to_start(&mut self) {
        self.position = self.cfg.start();
        self.heading = Heading::North;
    }

    pub fn step(&mut self, action: Action) -> StepOutcome {
        self.step_count += 1;
        let mut reward = 0.0;
        if self.alive {
            let mut ate_food = false;
            match action {
                Action::Left => self.heading = self.heading.left(),
                Action::Right => self.heading = self.heading.right(),
                Action::NoOp => {}
                Action::Forward => match self.observe() {
                    Observation::Wall => {}
                    Observation::Empty => self.position = self.ahead(),
                    Observation::Green => {
                        reward = self.cfg.food_reward;
                        ate_food = true;
                        self.food_eaten += 1;
                        self.eats_since_switch += 1;
                        if self.eats_since_switch > self.cfg.switch_after_eats
                            && self.rng.random::<f64>() < self.cfg.switch_prob
                        {
                            self.food_side = self.food_side.other();
                            self.eats_since_switch = 0;
                            self.switches += 1;
                        }
                        self.teleport_to_start();
                    }
                    Observation::Red => {
                        reward = self.cfg.poison_reward;
                        self.poison_eaten += 1;
                        self.teleport_to_start();
                    }
                },
            }
            self.energy = self.energy.saturating_sub(1);
            if ate_food {
                self.energy = self.cfg.energy_init;
            }
            if self.energy == 0 {
                self.alive = false;
            }
        }
        StepOutcome { observation: self.observe(), reward, done: self.done() }
    }
}

/// One row of the environment trace.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvTraceRow {
    pub step: u32,
    pub position: (i32, i32),
    pub heading: Heading,
    pub action: Action,
    pub observation: Observation,
    pub reward: f64,
    pub energy: u32,
    pub food_side: Side,
}

pub const ENV_TRACE_HEADER: &str = "step,x,y,heading,action,obs,reward,energy,food_side";

impl EnvTraceRow {
    pub fn after(state: &EnvState, action: Action, outcome: &StepOutcome) -> Self {
        EnvTraceRow {
            step: state.step_count,
            position: state.position,
            heading: state.heading,
            action,
            observation: outcome.observation,
            reward: outcome.reward,
            energy: state.energy,
            food_side: state.food_side,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:?},{},{},{},{},{:?}",
            self.step,
            self.position.0,
            self.position.1,
            self.heading,
            self.action,
            self.observation,
            self.reward,
            self.energy,
            self.food_side
        )
    }
}

pub fn env_trace_csv(rows: &[EnvTraceRow]) -> String {
    let mut out = format!("{ENV_TRACE_HEADER}\n");
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Mean and standard deviation of cumulative reward for a uniformly random
/// action policy over `episodes` seeded episodes.
pub fn random_agent_baseline(cfg: &MazeConfig, episodes: u64, seed: u64) -> (f64, f64) {
    let returns: Vec<f64> = (0..episodes)
        .map(|e| {
            let episode_seed = seed::derive_seed(seed, &[e]);
            let (mut env, _) = EnvState::reset(cfg, episode_seed);
            let mut policy = seed::stream(episode_seed, &[1]);
            let mut total = 0.0;
            while !env.done() {
                let action = Action::ALL[policy.random_range(0..4)];
                total += env.step(action).reward;
            }
            total
        })
        .collect();
    let n = returns.len() as f64;
    let mean = returns.iter().sum::<f64>() / n;
    let var = returns.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}
