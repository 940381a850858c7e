//! Networks of ENUs: every synapse and every neuron is an ENU instance.
//! All synapses share one chromosome, all neurons another; each instance
//! keeps private memory.
//!
//! One network step runs in five stages:
//!
//! 1. gather the source table (sensory nodes, reward node, previous neuron outputs);
//! 2. give every synapse `[source output, post-neuron previous output]`;
//! 3. step all synapses as one batch;
//! 4. sum each neuron's synapse outputs channel-wise;
//! 5. step all neurons as one batch.

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::cell::{BatchWorkspace, Chromosome, EnuDims, EnuParams, Genome, Noise, StateBatch};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed::{self, tag};
use crate::tmaze::{Action, EnvState, EnvTraceRow, MazeConfig, Observation};

/// Synapse counts per source class for every neuron.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynapseLayout {
    pub sensory: usize,
    pub hidden: usize,
    pub output: usize,
    pub reward: usize,
    #[serde(rename = "self")]
    pub recurrent: usize,
}

impl Default for SynapseLayout {
    fn default() -> Self {
        SynapseLayout { sensory: 2, hidden: 2, output: 2, reward: 1, recurrent: 1 }
    }
}

impl SynapseLayout {
    pub fn total(&self) -> usize {
        self.sensory + self.hidden + self.output + self.reward + self.recurrent
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub n_neurons: usize,
    pub n_outputs: usize,
    pub n_sensory: usize,
    pub channels: usize,
    pub memory: usize,
    pub synapses: SynapseLayout,
    pub output_noise_std: f64,
    pub steps_per_action: usize,
    pub action_threshold: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            n_neurons: 6,
            n_outputs: 3,
            n_sensory: 3,
            channels: 16,
            memory: 32,
            synapses: SynapseLayout::default(),
            output_noise_std: 0.02,
            steps_per_action: 4,
            action_threshold: 0.1,
        }
    }
}

pub const SYNAPSE_CHROMOSOME: &str = "synapse";
pub const NEURON_CHROMOSOME: &str = "neuron";

impl NetworkConfig {
    pub fn n_hidden(&self) -> usize {
        self.n_neurons - self.n_outputs
    }

    pub fn synapses_per_neuron(&self) -> usize {
        self.synapses.total()
    }

    pub fn n_synapses(&self) -> usize {
        self.n_neurons * self.synapses_per_neuron()
    }

    pub fn synapse_dims(&self) -> Result<EnuDims> {
        EnuDims::new(self.memory, self.channels, 2 * self.channels)
    }

    pub fn neuron_dims(&self) -> Result<EnuDims> {
        EnuDims::new(self.memory, self.channels, self.channels)
    }

    pub fn layout(&self) -> Result<Vec<Chromosome>> {
        Ok(vec![
            Chromosome::new(SYNAPSE_CHROMOSOME, self.synapse_dims()?),
            Chromosome::new(NEURON_CHROMOSOME, self.neuron_dims()?),
        ])
    }

    pub fn validate(&self) -> Result<()> {
        self.synapse_dims()?;
        if self.n_outputs != Action::MOTOR.len() {
            return Err(Error::config(format!("exactly {} output neurons are supported", Action::MOTOR.len())));
        }
        if self.n_outputs > self.n_neurons {
            return Err(Error::config("more output neurons than neurons"));
        }
        if self.channels < 3 {
            return Err(Error::config("at least 3 channels are needed for stimulus and reward encoding"));
        }
        let s = &self.synapses;
        if s.recurrent != 1 {
            return Err(Error::config("every neuron has exactly one self-connection"));
        }
        if s.sensory > self.n_sensory {
            return Err(Error::config("more sensory synapses than sensory nodes"));
        }
        if s.reward > 1 {
            return Err(Error::config("there is a single reward node"));
        }
        // Self-connections are excluded from the hidden/output draws.
        let hidden_available = if self.n_outputs == self.n_neurons { 0 } else { self.n_hidden() - 1 };
        let output_available = self.n_outputs.saturating_sub(1);
        if s.hidden > hidden_available.min(self.n_hidden()) || s.output > output_available {
            return Err(Error::config(format!(
                "synapse layout needs {} hidden / {} output sources but only {hidden_available} / {output_available} are available to every neuron",
                s.hidden, s.output
            )));
        }
        if self.steps_per_action == 0 {
            return Err(Error::config("steps_per_action must be positive"));
        }
        if !(self.output_noise_std >= 0.0) {
            return Err(Error::config("output_noise_std must be non-negative"));
        }
        Ok(())
    }

    /// Row of node `n` in the source table.
    pub fn table_row(&self, n: Node) -> usize {
        match n {
            Node::Sensory(i) => i,
            Node::Reward => self.n_sensory,
            Node::Neuron(j) => self.n_sensory + 1 + j,
        }
    }

    pub fn is_output(&self, neuron: usize) -> bool {
        neuron >= self.n_hidden()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Node {
    Sensory(usize),
    Reward,
    Neuron(usize),
}

/// Wiring plus the per-episode input and output shuffles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionTopology {
    synapses_per_neuron: usize,
    /// Source of each synapse, `n_neurons × synapses_per_neuron`, slots ordered
    /// sensory, hidden, output, reward, self.
    sources: Vec<Node>,
    /// Detector index (wall, green, red) → sensory node.
    pub sensory_perm: Vec<usize>,
    /// Output neuron (0-based among outputs) → action.
    pub action_perm: Vec<Action>,
}

impl ConnectionTopology {
    pub fn sources(&self, neuron: usize) -> &[Node] {
        &self.sources[neuron * self.synapses_per_neuron..(neuron + 1) * self.synapses_per_neuron]
    }

    pub fn all_sources(&self) -> &[Node] {
        &self.sources
    }

    pub fn synapses_per_neuron(&self) -> usize {
        self.synapses_per_neuron
    }

    pub fn n_neurons(&self) -> usize {
        self.sources.len() / self.synapses_per_neuron
    }

    /// Builds a topology from explicit parts, checking the structural rules.
    pub fn from_parts(
        cfg: &NetworkConfig,
        sources: Vec<Node>,
        sensory_perm: Vec<usize>,
        action_perm: Vec<Action>,
    ) -> Result<Self> {
        let spn = cfg.synapses_per_neuron();
        if sources.len() != cfg.n_neurons * spn {
            return Err(Error::config("topology source count does not match the network"));
        }
        for j in 0..cfg.n_neurons {
            let own = &sources[j * spn..(j + 1) * spn];
            if own.iter().filter(|&&n| n == Node::Neuron(j)).count() != 1 {
                return Err(Error::config(format!("neuron {j} needs exactly one self-connection")));
            }
        }
        let mut sp = sensory_perm.clone();
        sp.sort_unstable();
        if sp != (0..cfg.n_sensory).collect::<Vec<_>>() {
            return Err(Error::config("sensory permutation is not a bijection"));
        }
        if action_perm.len() != cfg.n_outputs || Action::MOTOR.iter().any(|a| !action_perm.contains(a)) {
            return Err(Error::config("action permutation is not a bijection"));
        }
        Ok(ConnectionTopology { synapses_per_neuron: spn, sources, sensory_perm, action_perm })
    }
}

/// Samples wiring and shuffles from `seed`, each class without replacement.
pub fn build_topology(cfg: &NetworkConfig, seed: u64) -> Result<ConnectionTopology> {
    cfg.validate()?;
    let mut rng = seed::stream(seed, &[tag::TOPOLOGY]);
    let s = &cfg.synapses;
    let mut sources = Vec::with_capacity(cfg.n_synapses());
    for j in 0..cfg.n_neurons {
        for i in index::sample(&mut rng, cfg.n_sensory, s.sensory) {
            sources.push(Node::Sensory(i));
        }
        let hidden: Vec<usize> = (0..cfg.n_hidden()).filter(|&h| h != j).collect();
        for i in index::sample(&mut rng, hidden.len(), s.hidden) {
            sources.push(Node::Neuron(hidden[i]));
        }
        let outputs: Vec<usize> = (cfg.n_hidden()..cfg.n_neurons).filter(|&o| o != j).collect();
        for i in index::sample(&mut rng, outputs.len(), s.output) {
            sources.push(Node::Neuron(outputs[i]));
        }
        for _ in 0..s.reward {
            sources.push(Node::Reward);
        }
        sources.push(Node::Neuron(j));
    }
    let mut sensory_perm: Vec<usize> = (0..cfg.n_sensory).collect();
    sensory_perm.shuffle(&mut rng);
    let mut action_perm = Action::MOTOR.to_vec();
    action_perm.shuffle(&mut rng);
    ConnectionTopology::from_parts(cfg, sources, sensory_perm, action_perm)
}

/// Channel vectors emitted by the non-ENU nodes for one step.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSignals {
    channels: usize,
    /// `n_sensory × channels`
    pub sensory: Vec<f64>,
    pub reward: Vec<f64>,
}

/// Stimulus channel of a sensory node.
pub const STIMULUS_CHANNEL: usize = 0;
pub const POSITIVE_REWARD_CHANNEL: usize = 1;
pub const NEGATIVE_REWARD_CHANNEL: usize = 2;

impl NodeSignals {
    pub fn silent(cfg: &NetworkConfig) -> Self {
        NodeSignals {
            channels: cfg.channels,
            sensory: vec![0.0; cfg.n_sensory * cfg.channels],
            reward: vec![0.0; cfg.channels],
        }
    }

    pub fn sensory_node(&self, i: usize) -> &[f64] {
        &self.sensory[i * self.channels..(i + 1) * self.channels]
    }
}

/// Maps what the agent sees and the last reward onto node signals: the
/// detector for the observation (through the episode's shuffle) emits 1 on
/// the stimulus channel; reward magnitude goes to channel 1 if positive,
/// channel 2 if negative.
pub fn encode_observation(
    cfg: &NetworkConfig,
    obs: Observation,
    reward_prev: f64,
    sensory_perm: &[usize],
) -> NodeSignals {
    let mut signals = NodeSignals::silent(cfg);
    if let Some(detector) = obs.detector() {
        let node = sensory_perm[detector];
        signals.sensory[node * cfg.channels + STIMULUS_CHANNEL] = 1.0;
    }
    if reward_prev > 0.0 {
        signals.reward[POSITIVE_REWARD_CHANNEL] = reward_prev;
    } else if reward_prev < 0.0 {
        signals.reward[NEGATIVE_REWARD_CHANNEL] = -reward_prev;
    }
    signals
}

/// The two shared chromosomes.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentParams<T> {
    pub synapse: EnuParams<T>,
    pub neuron: EnuParams<T>,
}

impl<T: Scalar> AgentParams<T> {
    pub fn from_genome(cfg: &NetworkConfig, genome: &Genome) -> Result<Self> {
        genome.check_layout(&cfg.layout()?)?;
        let mut parts = genome.unflatten::<T>()?.into_iter();
        let synapse = parts.next().expect("layout has a synapse chromosome");
        let neuron = parts.next().expect("layout has a neuron chromosome");
        Ok(AgentParams { synapse, neuron })
    }

    pub fn zeros(cfg: &NetworkConfig) -> Result<Self> {
        Ok(AgentParams { synapse: EnuParams::zeros(cfg.synapse_dims()?), neuron: EnuParams::zeros(cfg.neuron_dims()?) })
    }
}

/// Private memory of every synapse and neuron of one agent.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkState<T> {
    pub synapses: StateBatch<T>,
    pub neurons: StateBatch<T>,
}

impl<T: Scalar> NetworkState<T> {
    pub fn zeros(cfg: &NetworkConfig) -> Result<Self> {
        Ok(NetworkState {
            synapses: StateBatch::zeros(cfg.synapse_dims()?, cfg.n_synapses()),
            neurons: StateBatch::zeros(cfg.neuron_dims()?, cfg.n_neurons),
        })
    }

    pub fn reset(&mut self) {
        self.synapses.reset();
        self.neurons.reset();
    }

    pub fn is_zero(&self) -> bool {
        self.synapses.is_zero() && self.neurons.is_zero()
    }

    /// Neuron outputs from the last step, `n_neurons × channels`.
    pub fn neuron_outputs(&self) -> &[T] {
        self.neurons.outputs()
    }
}

#[derive(Clone, Debug, Default)]
pub struct NetworkWorkspace<T> {
    table: Vec<T>,
    synapse_inputs: Vec<T>,
    neuron_inputs: Vec<T>,
    synapse_ws: BatchWorkspace<T>,
    neuron_ws: BatchWorkspace<T>,
}

/// Fills the source table: sensory rows, reward row, previous neuron outputs.
pub fn source_table<T: Scalar>(cfg: &NetworkConfig, signals: &NodeSignals, neuron_outputs: &[T], table: &mut Vec<T>) {
    let c = cfg.channels;
    table.clear();
    table.extend(signals.sensory.iter().map(|&v| T::of(v)));
    table.extend(signals.reward.iter().map(|&v| T::of(v)));
    table.extend_from_slice(&neuron_outputs[..cfg.n_neurons * c]);
}

/// Advances the whole network by one step. The new neuron outputs are
/// available through [`NetworkState::neuron_outputs`].
pub fn network_step<T: Scalar>(
    cfg: &NetworkConfig,
    params: &AgentParams<T>,
    state: &mut NetworkState<T>,
    topo: &ConnectionTopology,
    signals: &NodeSignals,
    noise: &mut Noise<'_>,
    ws: &mut NetworkWorkspace<T>,
) -> Result<()> {
    let c = cfg.channels;
    let spn = cfg.synapses_per_neuron();
    if topo.synapses_per_neuron() != spn || topo.n_neurons() != cfg.n_neurons {
        return Err(Error::shape("topology does not match network configuration"));
    }
    if state.synapses.len() != cfg.n_synapses() || state.neurons.len() != cfg.n_neurons {
        return Err(Error::shape("network state does not match network configuration"));
    }
    if signals.sensory.len() != cfg.n_sensory * c || signals.reward.len() != c {
        return Err(Error::shape("node signals do not match network configuration"));
    }

    source_table(cfg, signals, state.neurons.outputs(), &mut ws.table);

    let prev = state.neurons.outputs();
    ws.synapse_inputs.clear();
    for (s, &src) in topo.all_sources().iter().enumerate() {
        let row = cfg.table_row(src);
        let post = s / spn;
        ws.synapse_inputs.extend_from_slice(&ws.table[row * c..(row + 1) * c]);
        ws.synapse_inputs.extend_from_slice(&prev[post * c..(post + 1) * c]);
    }

    params.synapse.step_batch_in_place(&mut state.synapses, &ws.synapse_inputs, noise, &mut ws.synapse_ws)?;

    ws.neuron_inputs.clear();
    ws.neuron_inputs.resize(cfg.n_neurons * c, T::zero());
    let syn_out = state.synapses.outputs();
    for j in 0..cfg.n_neurons {
        let acc = &mut ws.neuron_inputs[j * c..(j + 1) * c];
        for s in j * spn..(j + 1) * spn {
            for (a, &o) in acc.iter_mut().zip(&syn_out[s * c..(s + 1) * c]) {
                *a = *a + o;
            }
        }
    }

    params.neuron.step_batch_in_place(&mut state.neurons, &ws.neuron_inputs, noise, &mut ws.neuron_ws)
}

/// Picks the action of the output neuron with the largest summed stimulus-channel
/// activity over the window, or `NoOp` below `threshold`.
pub fn select_action(window: &[Vec<f64>], topo: &ConnectionTopology, threshold: f64) -> Action {
    let n = topo.action_perm.len();
    let mut activity = vec![0.0; n];
    for row in window {
        for (a, v) in activity.iter_mut().zip(row) {
            *a += v;
        }
    }
    let mut best = 0;
    for j in 1..n {
        if activity[j] > activity[best] {
            best = j;
        }
    }
    if n == 0 || !(activity[best] >= threshold) {
        Action::NoOp
    } else {
        topo.action_perm[best]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    pub network: NetworkConfig,
    pub maze: MazeConfig,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig { network: NetworkConfig::default(), maze: MazeConfig::default() }
    }
}

/// One network sub-step of an agent episode.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub env_step: u32,
    pub sub_step: usize,
    pub observation: Observation,
    /// Reward presented on the reward node during this sub-step.
    pub reward: f64,
    /// Stimulus-channel output of every output neuron.
    pub outputs: Vec<f64>,
    pub action: Action,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EpisodeTrace {
    pub rows: Vec<TraceRow>,
    pub env: Vec<EnvTraceRow>,
}

impl EpisodeTrace {
    pub fn to_csv(&self, n_outputs: usize) -> String {
        let mut out = String::from("env_step,sub_step,obs,reward");
        for j in 0..n_outputs {
            out.push_str(&format!(",out_{j}"));
        }
        out.push_str(",action\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}", r.env_step, r.sub_step, r.observation, r.reward));
            for v in &r.outputs {
                out.push_str(&format!(",{v}"));
            }
            out.push_str(&format!(",{}\n", r.action));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeOutcome {
    /// Cumulative environment reward.
    pub fitness: f64,
    pub food_eaten: u32,
    pub poison_eaten: u32,
    pub survived_steps: u32,
    /// First env step at which poison was eaten, if any.
    pub first_poison: Option<u32>,
    pub trace: Option<EpisodeTrace>,
}

/// Runs one T-maze episode with a fresh topology and zeroed network state.
/// Without tracing the loop stops once the agent has died, since a frozen
/// agent cannot collect further reward.
pub fn run_agent_episode<T: Scalar>(
    cfg: &AgentConfig,
    params: &AgentParams<T>,
    episode_seed: u64,
    max_env_steps: Option<u32>,
    trace: bool,
) -> Result<EpisodeOutcome> {
    let net = &cfg.network;
    let topo = build_topology(net, episode_seed)?;
    let mut maze = cfg.maze.clone();
    if let Some(m) = max_env_steps {
        maze.max_steps = m;
    }
    let (mut env, mut obs) = EnvState::reset(&maze, seed::derive_seed(episode_seed, &[tag::MAZE]));
    let mut noise_rng = seed::stream(episode_seed, &[tag::NOISE]);
    let mut state = NetworkState::<T>::zeros(net)?;
    let mut ws = NetworkWorkspace::default();
    let mut rows = Vec::new();
    let mut env_rows = Vec::new();
    let mut reward_prev = 0.0;
    let mut fitness = 0.0;
    let mut first_poison = None;
    let mut died_at = None;
    let first_output = net.n_hidden();

    while !env.done() {
        if !env.alive && !trace {
            break;
        }
        let signals = encode_observation(net, obs, reward_prev, &topo.sensory_perm);
        let mut window = Vec::with_capacity(net.steps_per_action);
        for _ in 0..net.steps_per_action {
            let mut noise = Noise::gaussian(net.output_noise_std, &mut noise_rng);
            network_step(net, params, &mut state, &topo, &signals, &mut noise, &mut ws)?;
            let outs = state.neuron_outputs();
            window.push(
                (first_output..net.n_neurons).map(|j| outs[j * net.channels + STIMULUS_CHANNEL].as_f64()).collect(),
            );
        }
        let action = select_action(&window, &topo, net.action_threshold);
        if trace {
            for (sub_step, outputs) in window.into_iter().enumerate() {
                rows.push(TraceRow {
                    env_step: env.step_count,
                    sub_step,
                    observation: obs,
                    reward: reward_prev,
                    outputs,
                    action,
                });
            }
        }
        let poison_before = env.poison_eaten;
        let outcome = env.step(action);
        if env.poison_eaten > poison_before && first_poison.is_none() {
            first_poison = Some(env.step_count);
        }
        if !env.alive && died_at.is_none() {
            died_at = Some(env.step_count);
        }
        if trace {
            env_rows.push(EnvTraceRow::after(&env, action, &outcome));
        }
        fitness += outcome.reward;
        reward_prev = outcome.reward;
        obs = outcome.observation;
    }

    let survived_steps = died_at.unwrap_or(env.step_count);
    Ok(EpisodeOutcome {
        fitness,
        food_eaten: env.food_eaten,
        poison_eaten: env.poison_eaten,
        survived_steps,
        first_poison,
        trace: trace.then_some(EpisodeTrace { rows, env: env_rows }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let cfg = NetworkConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.synapses_per_neuron(), 8);
        assert_eq!(cfg.synapse_dims().unwrap().input(), 32);
        assert_eq!(cfg.neuron_dims().unwrap().input(), 16);
    }

    #[test]
    fn infeasible_layout_is_rejected() {
        let cfg = NetworkConfig { synapses: SynapseLayout { sensory: 4, ..Default::default() }, ..Default::default() };
        assert!(matches!(build_topology(&cfg, 0), Err(Error::Config(_))));
        let cfg = NetworkConfig { synapses: SynapseLayout { hidden: 3, ..Default::default() }, ..Default::default() };
        assert!(matches!(build_topology(&cfg, 0), Err(Error::Config(_))));
    }

    #[test]
    fn select_action_cases() {
        let cfg = NetworkConfig::default();
        let mut topo = build_topology(&cfg, 3).unwrap();
        topo.action_perm = Action::MOTOR.to_vec();
        assert_eq!(select_action(&[vec![2.1, 0.3, 0.0]], &topo, 0.1), Action::Forward);
        assert_eq!(select_action(&[vec![0.05, 0.02, 0.04]], &topo, 0.1), Action::NoOp);
        assert_eq!(select_action(&[vec![0.5, 0.5, 0.1], vec![0.5, 0.5, 0.1]], &topo, 0.1), Action::Forward);
        topo.action_perm = vec![Action::Right, Action::Forward, Action::Left];
        assert_eq!(select_action(&[vec![1.0, 1.0, 0.2]], &topo, 0.1), Action::Right);
    }

    #[test]
    fn reward_encoding() {
        let cfg = NetworkConfig::default();
        let s = encode_observation(&cfg, Observation::Empty, -1.0, &[0, 1, 2]);
        assert!(s.sensory.iter().all(|&v| v == 0.0));
        assert_eq!(s.reward[NEGATIVE_REWARD_CHANNEL], 1.0);
        assert_eq!(s.reward.iter().filter(|&&v| v != 0.0).count(), 1);
    }
}
