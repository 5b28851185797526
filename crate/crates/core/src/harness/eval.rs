//! Fixed-pose evaluation trials and their summary statistics.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agents::{scale_action, Agent, ObsHistory};
use crate::baseline::Bba;
use crate::env::{Action, DoneReason, EnvConfig, Medium, NavEnv, Observation, Task, TraceRecord, TraceWriter, World};
use crate::error::Result;
use crate::scalar::Scalar;

/// Anything that maps observations to commands during an evaluation trial.
pub trait Controller {
    /// Called before each trial.
    fn reset(&mut self);
    fn act(&mut self, obs: &Observation) -> Result<Action>;
}

impl Controller for Bba {
    fn reset(&mut self) {
        Bba::reset(self);
    }

    fn act(&mut self, obs: &Observation) -> Result<Action> {
        Ok(self.decide(obs))
    }
}

/// A trained agent acting greedily on its recent observation window.
pub struct Greedy<'a, T> {
    agent: &'a Agent<T>,
    history: ObsHistory,
    rng: ChaCha8Rng,
}

impl<'a, T: Scalar> Greedy<'a, T> {
    pub fn new(agent: &'a Agent<T>) -> Self {
        Greedy {
            history: agent.new_history(),
            agent,
            rng: ChaCha8Rng::seed_from_u64(0),
        }
    }
}

impl<T: Scalar> Controller for Greedy<'_, T> {
    fn reset(&mut self) {
        self.history.clear();
    }

    fn act(&mut self, obs: &Observation) -> Result<Action> {
        self.history.push(obs);
        Ok(scale_action(self.agent.greedy(&self.history, &mut self.rng)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u32,
    pub success: bool,
    pub t_air: f64,
    pub t_water: f64,
    pub steps: u32,
    pub done_reason: DoneReason,
    /// Master seed; the trial draws from stream `trial` of it.
    pub seed: u64,
}

/// Generator of trial `trial`: the master seed selects the key and the
/// trial index the stream, so trials are independent of execution order.
pub fn trial_rng(seed: u64, trial: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(trial));
    rng
}

/// One episode from the task's fixed poses. The episode ends at the first
/// terminal outcome; goals are not regenerated.
pub fn run_trial<C: Controller + ?Sized, W: Write>(
    world: &World,
    config: EnvConfig,
    task: Task,
    controller: &mut C,
    trial: u32,
    seed: u64,
    trace: Option<&mut TraceWriter<W>>,
) -> Result<TrialRecord> {
    trial_episode(world, config, task, false, controller, trial, seed, trace)
}

/// Like [`run_trial`], but the start pose and goal are drawn from the
/// trial's generator as in training.
pub fn run_sampled_trial<C: Controller + ?Sized>(
    world: &World,
    config: EnvConfig,
    task: Task,
    controller: &mut C,
    trial: u32,
    seed: u64,
) -> Result<TrialRecord> {
    trial_episode::<C, std::io::Sink>(world, config, task, true, controller, trial, seed, None)
}

#[allow(clippy::too_many_arguments)]
fn trial_episode<C: Controller + ?Sized, W: Write>(
    world: &World,
    config: EnvConfig,
    task: Task,
    sampled: bool,
    controller: &mut C,
    trial: u32,
    seed: u64,
    mut trace: Option<&mut TraceWriter<W>>,
) -> Result<TrialRecord> {
    let mut env = NavEnv::new(world.clone(), config, task, sampled, 0).with_rng(trial_rng(seed, trial));
    let mut obs = env.reset()?;
    controller.reset();
    let dt = config.kinematics.dt;
    let (mut air, mut water) = (0u32, 0u32);
    let mut reason = DoneReason::Running;
    let mut steps = 0;
    while reason == DoneReason::Running {
        let action = controller.act(&obs)?;
        let out = env.step(action)?;
        steps += 1;
        match out.step_medium {
            Medium::Air => air += 1,
            Medium::Water => water += 1,
        }
        reason = out.done_reason;
        if let Some(w) = trace.as_deref_mut() {
            w.write(&TraceRecord {
                step: steps,
                position: env.vehicle().position,
                yaw: env.vehicle().yaw,
                action: action.clamped(),
                reward: out.reward,
                medium: out.medium,
                done_reason: reason,
            })?;
        }
        obs = out.observation;
    }
    Ok(TrialRecord {
        trial,
        success: reason == DoneReason::ReachedGoal,
        t_air: f64::from(air) * dt,
        t_water: f64::from(water) * dt,
        steps,
        done_reason: reason,
        seed,
    })
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    /// `None` for an empty sample; a single value has std 0.
    pub fn of(xs: &[f64]) -> Option<Stat> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() < 2 {
            0.0
        } else {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Some(Stat { mean, std })
    }
}

/// Success count and per-medium times over the successful trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    /// Scenario label.
    pub env: String,
    pub task: String,
    pub agent: String,
    pub trials: u32,
    pub successes: u32,
    pub t_air: Option<Stat>,
    pub t_water: Option<Stat>,
}

impl EvalSummary {
    pub fn from_trials(env: &str, task: &str, agent: &str, trials: &[TrialRecord]) -> Self {
        let ok: Vec<&TrialRecord> = trials.iter().filter(|t| t.success).collect();
        let air: Vec<f64> = ok.iter().map(|t| t.t_air).collect();
        let water: Vec<f64> = ok.iter().map(|t| t.t_water).collect();
        EvalSummary {
            env: env.into(),
            task: task.into(),
            agent: agent.into(),
            trials: trials.len() as u32,
            successes: ok.len() as u32,
            t_air: Stat::of(&air),
            t_water: Stat::of(&water),
        }
    }

    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            f64::from(self.successes) / f64::from(self.trials)
        }
    }
}

/// Runs trials `0..trials` and summarizes them.
#[allow(clippy::too_many_arguments)]
pub fn evaluate<C: Controller + ?Sized>(
    world: &World,
    config: EnvConfig,
    task: Task,
    controller: &mut C,
    trials: u32,
    seed: u64,
    env_label: &str,
    agent_label: &str,
) -> Result<(EvalSummary, Vec<TrialRecord>)> {
    let mut records = Vec::with_capacity(trials as usize);
    for trial in 0..trials {
        records.push(run_trial::<C, std::io::Sink>(world, config, task, controller, trial, seed, None)?);
    }
    let summary = EvalSummary::from_trials(env_label, task.label(), agent_label, &records);
    Ok((summary, records))
}

/// Runs trials `0..trials` from sampled poses and summarizes them.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_sampled<C: Controller + ?Sized>(
    world: &World,
    config: EnvConfig,
    task: Task,
    controller: &mut C,
    trials: u32,
    seed: u64,
    env_label: &str,
    agent_label: &str,
) -> Result<(EvalSummary, Vec<TrialRecord>)> {
    let records = (0..trials)
        .map(|trial| run_sampled_trial(world, config, task, controller, trial, seed))
        .collect::<Result<Vec<_>>>()?;
    let summary = EvalSummary::from_trials(env_label, task.label(), agent_label, &records);
    Ok((summary, records))
}
