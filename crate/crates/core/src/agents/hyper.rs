use serde::{Deserialize, Serialize};

use crate::env::OuParams;
use crate::error::{Error, Result};

/// Training hyperparameters shared by both agents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperParams {
    /// Discount factor.
    pub gamma: f64,
    /// Soft-update rate of the target networks.
    pub tau: f64,
    pub lr: f64,
    pub batch_size: usize,
    pub max_steps: u32,
    pub max_episodes: u32,
    /// Environment steps taken with uniformly random actions before the policy acts.
    pub start_steps: u64,
    /// Std of the smoothing noise on target actions (deterministic agent).
    pub target_noise: f64,
    /// Clip bound of the smoothing noise.
    pub noise_clip: f64,
    /// Entropy temperature (stochastic agent).
    pub alpha: f64,
    /// Exploration noise process (deterministic agent), stepped once per action.
    pub exploration: OuParams,
    /// Length of the observation history fed to the recurrent networks.
    pub history: usize,
    pub buffer_capacity: usize,
    /// LSTM width of actor and critics.
    pub hidden: usize,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            gamma: 0.99,
            tau: 0.005,
            lr: 1e-3,
            batch_size: 256,
            max_steps: 500,
            max_episodes: 1500,
            start_steps: 2000,
            target_noise: 0.2,
            noise_clip: 0.5,
            alpha: 0.2,
            exploration: OuParams::new(0.15, 0.2),
            history: 8,
            buffer_capacity: 1_000_000,
            hidden: 256,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return fail(format!("gamma {} outside (0, 1]", self.gamma));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return fail(format!("tau {} outside (0, 1]", self.tau));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return fail(format!("learning rate {} must be positive", self.lr));
        }
        if self.batch_size == 0 {
            return fail("batch_size must be at least 1".into());
        }
        if self.max_steps == 0 {
            return fail("max_steps must be at least 1".into());
        }
        if !(self.noise_clip >= 0.0 && self.target_noise >= 0.0) {
            return fail("target noise and its clip must be non-negative".into());
        }
        if self.alpha.is_nan() || self.alpha < 0.0 {
            return fail(format!("alpha {} must be non-negative", self.alpha));
        }
        if !(self.exploration.theta > 0.0 && self.exploration.sigma >= 0.0) {
            return fail("exploration noise needs theta > 0 and sigma >= 0".into());
        }
        if self.history == 0 || self.hidden == 0 {
            return fail("history and hidden must be at least 1".into());
        }
        if self.buffer_capacity < self.batch_size {
            return fail(format!(
                "buffer capacity {} below batch size {}",
                self.buffer_capacity, self.batch_size
            ));
        }
        Ok(())
    }
}
