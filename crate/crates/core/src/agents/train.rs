//! The outer training loop shared by both agents.

use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agents::agent::Agent;
use crate::agents::buffer::{ReplayBuffer, Transition};
use crate::agents::features::{random_action, scale_action};
use crate::env::{DoneReason, NavEnv};
use crate::error::Result;
use crate::scalar::Scalar;

/// One line of the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub episode: u64,
    pub steps: u32,
    pub reward: f64,
    pub done_reason: DoneReason,
    /// Goals reached during the episode, counting regenerated ones.
    pub goals: u32,
    pub total_steps: u64,
    pub wall_time: f64,
    /// Episode means; absent when no update ran.
    pub critic1_loss: Option<f64>,
    pub critic2_loss: Option<f64>,
    pub actor_loss: Option<f64>,
}

impl EpisodeLog {
    /// The record with its wall-clock time zeroed, for run comparisons.
    pub fn timeless(&self) -> Self {
        EpisodeLog {
            wall_time: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Default)]
struct Mean {
    sum: f64,
    n: u64,
}

impl Mean {
    fn add(&mut self, x: f64) {
        self.sum += x;
        self.n += 1;
    }

    fn get(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }
}

/// An agent coupled to a training environment and its replay memory.
pub struct Trainer<T> {
    pub agent: Agent<T>,
    pub env: NavEnv,
    pub buffer: ReplayBuffer,
    rng: ChaCha8Rng,
}

impl<T: Scalar> Trainer<T> {
    /// The environment's step cap is set to the agent's `max_steps`.
    pub fn new(agent: Agent<T>, mut env: NavEnv, rng: ChaCha8Rng) -> Self {
        env.config.max_steps = agent.hp.max_steps;
        Trainer {
            buffer: ReplayBuffer::new(agent.hp.buffer_capacity),
            agent,
            env,
            rng,
        }
    }

    /// Random actions for the first `start_steps` environment steps, policy
    /// actions afterwards, one update per step once warm. Reaching the goal
    /// closes the current segment and draws a new goal; the episode ends on
    /// collision or at the step cap.
    pub fn run_episode(&mut self) -> Result<EpisodeLog> {
        let started = Instant::now();
        let episode = self.agent.counters.episodes + 1;
        let hp = self.agent.hp.clone();
        let dt = self.env.config.kinematics.dt;
        let mut obs = self.env.reset()?;
        let mut history = self.agent.new_history();
        history.push(&obs);
        let mut noise = self.agent.new_noise();
        let (mut c1, mut c2, mut al) = (Mean::default(), Mean::default(), Mean::default());
        let mut total = 0.0;
        let mut goals = 0;
        let mut steps = 0;
        let mut reason = DoneReason::Running;
        for t in 1..=hp.max_steps {
            let raw = if self.agent.counters.total_steps < hp.start_steps {
                random_action(&mut self.rng)
            } else {
                self.agent.explore(&history, &mut noise, dt, &mut self.rng)?
            };
            let out = self.env.step(scale_action(raw))?;
            self.agent.counters.total_steps += 1;
            steps = t;
            total += out.reward;
            reason = out.done_reason;
            self.buffer.push(Transition {
                s: obs,
                a: raw,
                r: out.reward,
                s_next: out.observation,
                d: out.done,
                episode,
            });
            if self.agent.counters.total_steps > hp.start_steps && self.buffer.len() >= hp.batch_size {
                let u = self.agent.update(&self.buffer, t, &mut self.rng)?;
                c1.add(u.critic1_loss);
                c2.add(u.critic2_loss);
                if let Some(a) = u.actor_loss {
                    al.add(a);
                }
            }
            match out.done_reason {
                DoneReason::ReachedGoal if t < hp.max_steps => {
                    goals += 1;
                    obs = self.env.regenerate_goal()?;
                    history.clear();
                    noise.reset();
                }
                DoneReason::ReachedGoal => {
                    goals += 1;
                    break;
                }
                DoneReason::Running => obs = out.observation,
                _ => break,
            }
            history.push(&obs);
        }
        self.agent.counters.episodes = episode;
        Ok(EpisodeLog {
            episode,
            steps,
            reward: total,
            done_reason: reason,
            goals,
            total_steps: self.agent.counters.total_steps,
            wall_time: started.elapsed().as_secs_f64(),
            critic1_loss: c1.get(),
            critic2_loss: c2.get(),
            actor_loss: al.get(),
        })
    }

    /// Runs `episodes` episodes, handing each record to `on_episode`.
    pub fn train(&mut self, episodes: u64, mut on_episode: impl FnMut(&EpisodeLog, &Agent<T>) -> Result<()>) -> Result<Vec<EpisodeLog>> {
        let mut logs = Vec::with_capacity(episodes as usize);
        for _ in 0..episodes {
            let log = self.run_episode()?;
            on_episode(&log, &self.agent)?;
            logs.push(log);
        }
        Ok(logs)
    }
}
