//! Ground-truth neuron and synapse models the single-ENU experiments are
//! scored against, plus their episode generators and fitness metrics.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Count-mismatch penalty of the spike-timing fitness.
pub const SPIKE_COUNT_PENALTY: f64 = 50.0;

/// Output level at which an ENU output counts as a spike.
pub const SPIKE_THRESHOLD: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IafConfig {
    pub threshold: f64,
    pub input_low: f64,
    pub input_high: f64,
    pub episode_len: usize,
}

impl Default for IafConfig {
    fn default() -> Self {
        IafConfig { threshold: 1.0, input_low: 0.0, input_high: 0.25, episode_len: 100 }
    }
}

impl IafConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0) {
            return Err(Error::config("IAF threshold must be positive"));
        }
        if !(self.input_low >= 0.0 && self.input_high >= self.input_low) {
            return Err(Error::config("IAF input range must satisfy 0 <= low <= high"));
        }
        if self.episode_len == 0 {
            return Err(Error::config("episode length must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StdpConfig {
    /// Amplitude `A` of the weight change.
    pub amplitude: f64,
    /// Decay constant `τ`, in steps.
    pub tau: f64,
    pub w0: f64,
    pub episode_len: usize,
    /// Inclusive range of steps in which the pre and post spikes are placed.
    pub spike_window: (usize, usize),
    pub nt_window_len: usize,
    pub graded_low: f64,
    pub graded_high: f64,
}

impl Default for StdpConfig {
    fn default() -> Self {
        StdpConfig {
            amplitude: 1.0,
            tau: 10.0,
            w0: 1.0,
            episode_len: 100,
            spike_window: (10, 90),
            nt_window_len: 40,
            graded_low: 0.0,
            graded_high: 0.25,
        }
    }
}

impl StdpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude > 0.0 && self.tau > 0.0) {
            return Err(Error::config("STDP amplitude and tau must be positive"));
        }
        let (lo, hi) = self.spike_window;
        if lo > hi || hi >= self.episode_len {
            return Err(Error::config("STDP spike window must lie inside the episode"));
        }
        if self.nt_window_len == 0 || self.nt_window_len > self.episode_len {
            return Err(Error::config("neuromodulator window must fit the episode"));
        }
        if !(self.graded_low >= 0.0 && self.graded_high >= self.graded_low) {
            return Err(Error::config("graded potential range must satisfy 0 <= low <= high"));
        }
        Ok(())
    }
}

/// Input channels of the plasticity episodes.
pub mod stdp_channel {
    pub const GRADED: usize = 0;
    pub const PRE_SPIKE: usize = 1;
    pub const NEUROMODULATOR: usize = 2;
    pub const POST_SPIKE: usize = 3;
    pub const COUNT: usize = 4;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EpisodeMeta {
    Iaf {
        seed: u64,
        target_spikes: Vec<usize>,
    },
    Stdp {
        seed: u64,
        t_pre: usize,
        t_post: usize,
        /// Half-open `[start, end)` steps during which the neuromodulator is present.
        nt_window: (usize, usize),
        update_step: usize,
        /// Whether the plasticity update fired at `update_step`.
        updated: bool,
        weight_after: f64,
    },
}

/// One episode of input traces with the reference model's response.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeSignals {
    channels: usize,
    /// `T × channels`, row-major.
    inputs: Vec<f64>,
    targets: Vec<f64>,
    pub meta: EpisodeMeta,
}

impl EpisodeSignals {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn input(&self, t: usize) -> &[f64] {
        &self.inputs[t * self.channels..(t + 1) * self.channels]
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// `t,in_0..in_{d-1},target`
    pub fn to_csv(&self) -> String {
        self.csv(None)
    }

    /// `t,in_0..in_{d-1},output,target` for a model rollout of this episode.
    pub fn to_csv_with_output(&self, outputs: &[f64]) -> Result<String> {
        if outputs.len() != self.len() {
            return Err(Error::shape(format!("{} outputs for a {}-step episode", outputs.len(), self.len())));
        }
        Ok(self.csv(Some(outputs)))
    }

    fn csv(&self, outputs: Option<&[f64]>) -> String {
        let mut out = String::from("t");
        for i in 0..self.channels {
            out.push_str(&format!(",in_{i}"));
        }
        if outputs.is_some() {
            out.push_str(",output");
        }
        out.push_str(",target\n");
        for t in 0..self.len() {
            out.push_str(&t.to_string());
            for v in self.input(t) {
                out.push_str(&format!(",{v}"));
            }
            if let Some(o) = outputs {
                out.push_str(&format!(",{}", o[t]));
            }
            out.push_str(&format!(",{}\n", self.targets[t]));
        }
        out
    }

    pub fn metadata_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.meta)?)
    }
}

/// Integrate-and-fire update: accumulate, then fire and reset at threshold.
pub fn iaf_step(h: f64, x: f64, threshold: f64) -> (f64, bool) {
    let acc = h + x;
    if acc < threshold {
        (acc, false)
    } else {
        (0.0, true)
    }
}

/// Weight change for spike-time difference `dt = t_post - t_pre`.
pub fn stdp_weight_delta(dt: f64, amplitude: f64, tau: f64) -> f64 {
    if dt > 0.0 {
        amplitude * (-dt / tau).exp()
    } else if dt < 0.0 {
        -amplitude * (dt / tau).exp()
    } else {
        0.0
    }
}

fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

/// Random graded input and the IAF spike train it produces from rest.
pub fn iaf_episode(cfg: &IafConfig, seed: u64) -> EpisodeSignals {
    let mut rng = seed::stream(seed, &[]);
    let inputs: Vec<f64> = (0..cfg.episode_len).map(|_| uniform(&mut rng, cfg.input_low, cfg.input_high)).collect();
    iaf_episode_from_inputs(cfg, inputs, seed)
}

pub fn iaf_episode_from_inputs(cfg: &IafConfig, inputs: Vec<f64>, seed: u64) -> EpisodeSignals {
    let mut h = 0.0;
    let mut spikes = Vec::new();
    let targets = inputs
        .iter()
        .enumerate()
        .map(|(t, &x)| {
            let (next, fired) = iaf_step(h, x, cfg.threshold);
            h = next;
            if fired {
                spikes.push(t);
                1.0
            } else {
                0.0
            }
        })
        .collect();
    EpisodeSignals { channels: 1, inputs, targets, meta: EpisodeMeta::Iaf { seed, target_spikes: spikes } }
}

/// Neuromodulated plasticity episode with randomly placed spikes and window.
pub fn stdp_episode(cfg: &StdpConfig, seed: u64) -> EpisodeSignals {
    let mut rng = seed::stream(seed, &[]);
    let graded: Vec<f64> = (0..cfg.episode_len).map(|_| uniform(&mut rng, cfg.graded_low, cfg.graded_high)).collect();
    let (lo, hi) = cfg.spike_window;
    let t_pre = rng.random_range(lo..=hi);
    let t_post = rng.random_range(lo..=hi);
    let nt_start = rng.random_range(0..=cfg.episode_len - cfg.nt_window_len);
    stdp_episode_from_parts(cfg, graded, t_pre, t_post, nt_start, seed)
}

/// Builds a plasticity episode from explicit spike times and window start.
pub fn stdp_episode_from_parts(
    cfg: &StdpConfig,
    graded: Vec<f64>,
    t_pre: usize,
    t_post: usize,
    nt_start: usize,
    seed: u64,
) -> EpisodeSignals {
    use stdp_channel::*;
    let len = graded.len();
    let nt_end = (nt_start + cfg.nt_window_len).min(len);
    let update_step = t_pre.max(t_post);
    let updated = (nt_start..nt_end).contains(&update_step);
    let weight_after =
        if updated { cfg.w0 + stdp_weight_delta(t_post as f64 - t_pre as f64, cfg.amplitude, cfg.tau) } else { cfg.w0 };

    let mut inputs = vec![0.0; len * COUNT];
    let mut targets = Vec::with_capacity(len);
    for (t, &g) in graded.iter().enumerate() {
        let row = &mut inputs[t * COUNT..(t + 1) * COUNT];
        row[GRADED] = g;
        row[PRE_SPIKE] = if t == t_pre { 1.0 } else { 0.0 };
        row[NEUROMODULATOR] = if (nt_start..nt_end).contains(&t) { 1.0 } else { 0.0 };
        row[POST_SPIKE] = if t == t_post { 1.0 } else { 0.0 };
        let w = if t >= update_step { weight_after } else { cfg.w0 };
        targets.push(w * g);
    }
    EpisodeSignals {
        channels: COUNT,
        inputs,
        targets,
        meta: EpisodeMeta::Stdp {
            seed,
            t_pre,
            t_post,
            nt_window: (nt_start, nt_end),
            update_step,
            updated,
            weight_after,
        },
    }
}

/// Rising-edge spike times: `outputs[t] >= threshold` with the previous step below it.
pub fn detect_spikes(outputs: &[f64], threshold: f64) -> Vec<usize> {
    let mut prev_high = false;
    let mut spikes = Vec::new();
    for (t, &o) in outputs.iter().enumerate() {
        let high = o >= threshold;
        if high && !prev_high {
            spikes.push(t);
        }
        prev_high = high;
    }
    spikes
}

/// Spike-timing fitness: index-aligned timing error, count mismatch penalty
/// and the amplitude shortfall at every target spike time, negated.
pub fn iaf_fitness(outputs: &[f64], target_spikes: &[usize], threshold: f64) -> f64 {
    let spikes = detect_spikes(outputs, threshold);
    let timing: f64 = spikes.iter().zip(target_spikes).map(|(&s, &t)| (s as f64 - t as f64).abs()).sum();
    let count = SPIKE_COUNT_PENALTY * (spikes.len() as f64 - target_spikes.len() as f64).abs();
    let amplitude: f64 = target_spikes.iter().map(|&t| 1.0 - outputs.get(t).copied().unwrap_or(0.0)).sum();
    -(timing + count + amplitude)
}

/// Negative mean squared error.
pub fn stdp_fitness(outputs: &[f64], targets: &[f64]) -> Result<f64> {
    if outputs.len() != targets.len() {
        return Err(Error::shape(format!("{} outputs vs {} targets", outputs.len(), targets.len())));
    }
    if outputs.is_empty() {
        return Ok(0.0);
    }
    let sse: f64 = outputs.iter().zip(targets).map(|(o, t)| (o - t) * (o - t)).sum();
    Ok(-sse / outputs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iaf_step_cases() {
        assert_eq!(iaf_step(0.9, 0.2, 1.0), (0.0, true));
        let (h, s) = iaf_step(0.3, 0.2, 1.0);
        assert!((h - 0.5).abs() < 1e-15 && !s);
        assert_eq!(iaf_step(0.0, 1.5, 1.0), (0.0, true));
    }

    #[test]
    fn stdp_delta_cases() {
        assert!((stdp_weight_delta(10.0, 1.0, 10.0) - 0.367_879_441).abs() < 1e-9);
        assert!((stdp_weight_delta(-10.0, 1.0, 10.0) + 0.367_879_441).abs() < 1e-9);
        assert_eq!(stdp_weight_delta(0.0, 1.0, 10.0), 0.0);
    }

    #[test]
    fn spike_detection_edges() {
        assert_eq!(detect_spikes(&[0.0, 0.9, 0.0, 0.0], 0.5), vec![1]);
        assert_eq!(detect_spikes(&[0.0, 0.9, 0.9, 0.0], 0.5), vec![1]);
        assert_eq!(detect_spikes(&[0.6, 0.0, 0.6], 0.5), vec![0, 2]);
    }

    #[test]
    fn iaf_fitness_cases() {
        let mut out = vec![0.0; 20];
        let targets = [2, 5, 9];
        for &t in &targets {
            out[t] = 1.0;
        }
        assert_eq!(iaf_fitness(&out, &targets, 0.5), 0.0);
        assert_eq!(iaf_fitness(&[0.0; 20], &targets, 0.5), -153.0);
    }

    #[test]
    fn stdp_fitness_cases() {
        let t = [0.1, 0.2, 0.3];
        assert_eq!(stdp_fitness(&t, &t).unwrap(), 0.0);
        let shifted: Vec<f64> = t.iter().map(|v| v + 0.1).collect();
        assert!((stdp_fitness(&shifted, &t).unwrap() + 0.01).abs() < 1e-12);
        assert!(stdp_fitness(&t, &t[..2]).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(IafConfig::default().validate().is_ok());
        assert!(StdpConfig::default().validate().is_ok());
        assert!(IafConfig { threshold: 0.0, ..Default::default() }.validate().is_err());
        assert!(StdpConfig { spike_window: (10, 100), ..Default::default() }.validate().is_err());
    }
}
