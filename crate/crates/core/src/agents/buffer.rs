//! Replay memory with fixed-length history windows for recurrent training.

use std::collections::VecDeque;

use rand::Rng;

use crate::agents::features::{encode, RawAction, ACTION_DIM};
use crate::env::{Observation, OBS_DIM};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub s: Observation,
    /// Raw policy output, before scaling to physical units.
    pub a: RawAction,
    pub r: f64,
    pub s_next: Observation,
    /// The transition ends its episode (or goal segment).
    pub d: bool,
    /// Counter of the environment episode this step belongs to.
    pub episode: u64,
}

/// Bounded FIFO store of transitions.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    data: VecDeque<Transition>,
    capacity: usize,
}

/// `N` history windows laid out time-major. Each window ends at a sampled
/// transition and is zero-padded at the front when the episode started
/// fewer than `history` steps earlier.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub size: usize,
    pub history: usize,
    /// Per time step, `size x OBS_DIM` encoded observations.
    pub obs: Vec<Vec<f64>>,
    /// Per time step, `size x ACTION_DIM` raw actions.
    pub act: Vec<Vec<f64>>,
    /// Per time step, encoded successor observations.
    pub next_obs: Vec<Vec<f64>>,
    /// Per time step, the action taken from the successor observation; the
    /// final step is left zero for the caller's bootstrap action.
    pub next_act: Vec<Vec<f64>>,
    pub reward: Vec<f64>,
    pub done: Vec<f64>,
    /// Number of real (unpadded) steps per window.
    pub lengths: Vec<usize>,
    /// Buffer positions of the sampled end transitions.
    pub endpoints: Vec<usize>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayBuffer {
            data: VecDeque::with_capacity(capacity.min(1 << 16)),
            capacity,
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn get(&self, i: usize) -> Option<&Transition> {
        self.data.get(i)
    }

    pub fn push(&mut self, t: Transition) {
        if self.data.len() == self.capacity {
            self.data.pop_front();
        }
        self.data.push_back(t);
    }

    /// Buffer indices of the window ending at `end`, oldest first.
    pub fn window(&self, end: usize, history: usize) -> Vec<usize> {
        let mut start = end;
        let episode = self.data[end].episode;
        while start > 0 && end - start + 1 < history {
            let prev = &self.data[start - 1];
            if prev.d || prev.episode != episode {
                break;
            }
            start -= 1;
        }
        (start..=end).collect()
    }

    pub fn sample_endpoints<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<usize>> {
        if self.data.len() < n || n == 0 {
            return Err(Error::BufferTooSmall {
                have: self.data.len(),
                need: n.max(1),
            });
        }
        Ok((0..n).map(|_| rng.random_range(0..self.data.len())).collect())
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, history: usize, rng: &mut R) -> Result<Batch> {
        let endpoints = self.sample_endpoints(n, rng)?;
        Ok(self.gather(&endpoints, history))
    }

    /// Assembles the windows ending at `endpoints`.
    pub fn gather(&self, endpoints: &[usize], history: usize) -> Batch {
        let n = endpoints.len();
        let mut obs = vec![vec![0.0; n * OBS_DIM]; history];
        let mut act = vec![vec![0.0; n * ACTION_DIM]; history];
        let mut next_obs = vec![vec![0.0; n * OBS_DIM]; history];
        let mut next_act = vec![vec![0.0; n * ACTION_DIM]; history];
        let mut reward = Vec::with_capacity(n);
        let mut done = Vec::with_capacity(n);
        let mut lengths = Vec::with_capacity(n);
        for (b, &end) in endpoints.iter().enumerate() {
            let idx = self.window(end, history);
            let pad = history - idx.len();
            for (k, &i) in idx.iter().enumerate() {
                let tr = &self.data[i];
                let step = pad + k;
                obs[step][b * OBS_DIM..(b + 1) * OBS_DIM].copy_from_slice(&encode(&tr.s));
                act[step][b * ACTION_DIM..(b + 1) * ACTION_DIM].copy_from_slice(&tr.a);
                next_obs[step][b * OBS_DIM..(b + 1) * OBS_DIM].copy_from_slice(&encode(&tr.s_next));
                if k + 1 < idx.len() {
                    let a_next = &self.data[idx[k + 1]].a;
                    next_act[step][b * ACTION_DIM..(b + 1) * ACTION_DIM].copy_from_slice(a_next);
                }
            }
            let last = &self.data[end];
            reward.push(last.r);
            done.push(if last.d { 1.0 } else { 0.0 });
            lengths.push(idx.len());
        }
        Batch {
            size: n,
            history,
            obs,
            act,
            next_obs,
            next_act,
            reward,
            done,
            lengths,
            endpoints: endpoints.to_vec(),
        }
    }
}
