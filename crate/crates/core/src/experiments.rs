//! Single-ENU rollouts against the reference models, the three experiment
//! fitness functions, and held-out evaluation of evolved genomes.

use serde::{Deserialize, Serialize};

use crate::cell::{BatchWorkspace, Chromosome, EnuDims, EnuParams, Genome, Noise, StateBatch};
use crate::error::{Error, Result};
use crate::network::{run_agent_episode, AgentConfig, AgentParams};
use crate::reference::{
    detect_spikes, iaf_episode, iaf_fitness, stdp_episode, stdp_fitness, EpisodeMeta, EpisodeSignals, IafConfig,
    StdpConfig, SPIKE_THRESHOLD,
};
use crate::scalar::Scalar;
use crate::seed::{self, tag};

/// Output channel compared against the reference model.
pub const READOUT_CHANNEL: usize = 0;

pub const IAF_CHROMOSOME: &str = "iaf";
pub const STDP_CHROMOSOME: &str = "stdp";

/// Dimensions and noise of a lone ENU (input width comes from the experiment).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SingleEnuConfig {
    pub memory: usize,
    pub output: usize,
    pub output_noise_std: f64,
}

impl Default for SingleEnuConfig {
    fn default() -> Self {
        SingleEnuConfig { memory: 32, output: 16, output_noise_std: 0.0 }
    }
}

impl SingleEnuConfig {
    pub fn dims(&self, input: usize) -> Result<EnuDims> {
        EnuDims::new(self.memory, self.output, input)
    }

    pub fn iaf_layout(&self) -> Result<Vec<Chromosome>> {
        Ok(vec![Chromosome::new(IAF_CHROMOSOME, self.dims(1)?)])
    }

    pub fn stdp_layout(&self) -> Result<Vec<Chromosome>> {
        Ok(vec![Chromosome::new(STDP_CHROMOSOME, self.dims(crate::reference::stdp_channel::COUNT)?)])
    }
}

/// Runs one ENU over every episode in parallel lanes (one batch instance per
/// episode) from a zeroed state and returns the readout channel per step.
pub fn rollout<T: Scalar>(
    params: &EnuParams<T>,
    episodes: &[EpisodeSignals],
    noise_std: f64,
    noise_seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let dims = params.dims();
    let Some(first) = episodes.first() else {
        return Ok(Vec::new());
    };
    let len = first.len();
    if episodes.iter().any(|e| e.len() != len || e.channels() != dims.input()) {
        return Err(Error::shape(format!("episodes must all be {len} steps of {} channels", dims.input())));
    }
    let b = episodes.len();
    let mut states = StateBatch::<T>::zeros(dims, b);
    let mut ws = BatchWorkspace::default();
    let mut xs = vec![T::zero(); b * dims.input()];
    let mut rng = seed::stream(noise_seed, &[tag::NOISE]);
    let mut outputs = vec![Vec::with_capacity(len); b];
    for t in 0..len {
        for (i, e) in episodes.iter().enumerate() {
            for (x, &v) in xs[i * dims.input()..(i + 1) * dims.input()].iter_mut().zip(e.input(t)) {
                *x = T::of(v);
            }
        }
        let mut noise = Noise::gaussian(noise_std, &mut rng);
        params.step_batch_in_place(&mut states, &xs, &mut noise, &mut ws)?;
        for (i, out) in outputs.iter_mut().enumerate() {
            out.push(states.output(i)[READOUT_CHANNEL].as_f64());
        }
    }
    Ok(outputs)
}

fn noise_seed(seeds: &[u64]) -> u64 {
    seed::derive_seed(seeds.first().copied().unwrap_or(0), &[seeds.len() as u64])
}

fn single_params<T: Scalar>(genome: &Genome, layout: &[Chromosome]) -> Result<EnuParams<T>> {
    genome.check_layout(layout)?;
    Ok(genome.unflatten::<T>()?.remove(0))
}

fn target_spikes(e: &EpisodeSignals) -> &[usize] {
    match &e.meta {
        EpisodeMeta::Iaf { target_spikes, .. } => target_spikes,
        _ => &[],
    }
}

/// Mean spike-timing fitness over one IAF episode per seed.
pub fn iaf_mean_fitness<T: Scalar>(
    genome: &Genome,
    enu: &SingleEnuConfig,
    iaf: &IafConfig,
    seeds: &[u64],
) -> Result<f64> {
    let params = single_params::<T>(genome, &enu.iaf_layout()?)?;
    let episodes: Vec<_> = seeds.iter().map(|&s| iaf_episode(iaf, s)).collect();
    let outputs = rollout(&params, &episodes, enu.output_noise_std, noise_seed(seeds))?;
    let total: f64 =
        episodes.iter().zip(&outputs).map(|(e, o)| iaf_fitness(o, target_spikes(e), SPIKE_THRESHOLD)).sum();
    Ok(total / seeds.len().max(1) as f64)
}

/// Mean negative MSE over one plasticity episode per seed.
pub fn stdp_mean_fitness<T: Scalar>(
    genome: &Genome,
    enu: &SingleEnuConfig,
    stdp: &StdpConfig,
    seeds: &[u64],
) -> Result<f64> {
    let params = single_params::<T>(genome, &enu.stdp_layout()?)?;
    let episodes: Vec<_> = seeds.iter().map(|&s| stdp_episode(stdp, s)).collect();
    let outputs = rollout(&params, &episodes, enu.output_noise_std, noise_seed(seeds))?;
    let mut total = 0.0;
    for (e, o) in episodes.iter().zip(&outputs) {
        total += stdp_fitness(o, e.targets())?;
    }
    Ok(total / seeds.len().max(1) as f64)
}

/// Mean cumulative reward over one T-maze episode per seed.
pub fn tmaze_mean_fitness<T: Scalar>(genome: &Genome, agent: &AgentConfig, seeds: &[u64]) -> Result<f64> {
    let params = AgentParams::<T>::from_genome(&agent.network, genome)?;
    let mut total = 0.0;
    for &s in seeds {
        total += run_agent_episode(agent, &params, s, None, false)?.fitness;
    }
    Ok(total / seeds.len().max(1) as f64)
}

/// Seeds for evaluation episodes disjoint from the training streams.
pub fn held_out_seeds(seed: u64, n: usize) -> Vec<u64> {
    (0..n as u64).map(|i| seed::derive_seed(seed, &[tag::HELD_OUT, i])).collect()
}

/// Held-out seeds whose plasticity episodes apply a nonzero weight update:
/// the neuromodulator is present at the update step and the spikes differ in time.
pub fn modulated_stdp_seeds(stdp: &StdpConfig, seed: u64, n: usize) -> Vec<u64> {
    (0u64..)
        .map(|i| seed::derive_seed(seed, &[tag::HELD_OUT, i]))
        .filter(|&s| match stdp_episode(stdp, s).meta {
            EpisodeMeta::Stdp { t_pre, t_post, updated, .. } => updated && t_pre != t_post,
            _ => false,
        })
        .take(n)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IafEvaluation {
    pub episodes: usize,
    /// Fraction of episodes whose detected spike count equals the target count.
    pub count_match_rate: f64,
    /// Mean |model − target| over index-aligned spike pairs.
    pub mean_timing_error: f64,
    pub mean_fitness: f64,
}

pub fn evaluate_iaf(genome: &Genome, enu: &SingleEnuConfig, iaf: &IafConfig, seeds: &[u64]) -> Result<IafEvaluation> {
    let params = single_params::<f64>(genome, &enu.iaf_layout()?)?;
    let episodes: Vec<_> = seeds.iter().map(|&s| iaf_episode(iaf, s)).collect();
    let outputs = rollout(&params, &episodes, enu.output_noise_std, noise_seed(seeds))?;
    let mut matches = 0;
    let mut err_sum = 0.0;
    let mut pairs = 0usize;
    let mut fit = 0.0;
    for (e, o) in episodes.iter().zip(&outputs) {
        let targets = target_spikes(e);
        let spikes = detect_spikes(o, SPIKE_THRESHOLD);
        if spikes.len() == targets.len() {
            matches += 1;
        }
        for (&s, &t) in spikes.iter().zip(targets) {
            err_sum += (s as f64 - t as f64).abs();
            pairs += 1;
        }
        fit += iaf_fitness(o, targets, SPIKE_THRESHOLD);
    }
    let n = episodes.len().max(1) as f64;
    Ok(IafEvaluation {
        episodes: episodes.len(),
        count_match_rate: matches as f64 / n,
        mean_timing_error: if pairs == 0 { f64::INFINITY } else { err_sum / pairs as f64 },
        mean_fitness: fit / n,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StdpEvaluation {
    pub episodes: usize,
    pub mse: f64,
    /// MSE of a genome that always outputs zero.
    pub zero_mse: f64,
    /// Episodes with an active neuromodulator at the update step and distinct spike times.
    pub modulated_episodes: usize,
    /// Fraction of those where the output gain moves in the direction of `t_post - t_pre`.
    pub sign_match_rate: f64,
}

/// Least-squares gain of `output ≈ w · graded` over `range`.
pub fn output_gain(outputs: &[f64], e: &EpisodeSignals, range: std::ops::Range<usize>) -> f64 {
    let (mut og, mut gg) = (0.0, 0.0);
    for t in range {
        let g = e.input(t)[crate::reference::stdp_channel::GRADED];
        og += outputs[t] * g;
        gg += g * g;
    }
    if gg > 0.0 {
        og / gg
    } else {
        0.0
    }
}

pub fn evaluate_stdp(
    genome: &Genome,
    enu: &SingleEnuConfig,
    stdp: &StdpConfig,
    seeds: &[u64],
) -> Result<StdpEvaluation> {
    let params = single_params::<f64>(genome, &enu.stdp_layout()?)?;
    let episodes: Vec<_> = seeds.iter().map(|&s| stdp_episode(stdp, s)).collect();
    let outputs = rollout(&params, &episodes, enu.output_noise_std, noise_seed(seeds))?;
    let mut mse = 0.0;
    let mut zero_mse = 0.0;
    let mut modulated = 0;
    let mut agree = 0;
    for (e, o) in episodes.iter().zip(&outputs) {
        mse -= stdp_fitness(o, e.targets())?;
        zero_mse -= stdp_fitness(&vec![0.0; o.len()], e.targets())?;
        if let EpisodeMeta::Stdp { t_pre, t_post, update_step, updated: true, .. } = e.meta {
            if t_pre == t_post {
                continue;
            }
            modulated += 1;
            let before = output_gain(o, e, 0..update_step);
            let after = output_gain(o, e, update_step..e.len());
            let expected = (t_post as f64 - t_pre as f64).signum();
            if (after - before).signum() == expected && after != before {
                agree += 1;
            }
        }
    }
    let n = episodes.len().max(1) as f64;
    Ok(StdpEvaluation {
        episodes: episodes.len(),
        mse: mse / n,
        zero_mse: zero_mse / n,
        modulated_episodes: modulated,
        sign_match_rate: if modulated == 0 { 0.0 } else { agree as f64 / modulated as f64 },
    })
}
