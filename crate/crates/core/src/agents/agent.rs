use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agents::buffer::ReplayBuffer;
use crate::agents::features::RawAction;
use crate::agents::hyper::HyperParams;
use crate::agents::policy::{select_action_det, select_action_sto, Architecture, ObsHistory};
use crate::agents::schedule::policy_freq;
use crate::agents::update::{
    actor_update_det, actor_update_sto, critic_update, sac_target, td3_target, BatchTensors,
};
use crate::agents::Algo;
use crate::env::OuProcess;
use crate::error::Result;
use crate::nn::{ParamSet, Role};
use crate::optim::{soft_update, AdamConfig, AdamState};
use crate::scalar::Scalar;

/// Progress counters carried across checkpoints.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub total_steps: u64,
    pub episodes: u64,
    pub critic_updates: u64,
    pub actor_updates: u64,
}

/// Losses from one training update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateStats {
    pub critic1_loss: f64,
    pub critic2_loss: f64,
    /// Present when the delayed actor step ran.
    pub actor_loss: Option<f64>,
}

/// A learning agent: six parameter sets, optimizers and counters.
#[derive(Debug, Clone, PartialEq)]
pub struct Agent<T> {
    pub algo: Algo,
    pub hp: HyperParams,
    pub arch: Architecture,
    pub actor: ParamSet<T>,
    pub critic1: ParamSet<T>,
    pub critic2: ParamSet<T>,
    pub target_actor: ParamSet<T>,
    pub target_critic1: ParamSet<T>,
    pub target_critic2: ParamSet<T>,
    pub actor_opt: AdamState<T>,
    pub critic1_opt: AdamState<T>,
    pub critic2_opt: AdamState<T>,
    pub counters: Counters,
}

impl<T: Scalar> Agent<T> {
    pub fn new<R: Rng + ?Sized>(algo: Algo, hp: HyperParams, rng: &mut R) -> Result<Self> {
        hp.validate()?;
        let arch = Architecture::new(algo, hp.hidden);
        let actor = arch.actor.init::<T, _>(Role::Actor, rng);
        let critic1 = arch.critic1.init::<T, _>(Role::Critic1, rng);
        let critic2 = arch.critic2.init::<T, _>(Role::Critic2, rng);
        let adam = AdamConfig {
            lr: hp.lr,
            ..AdamConfig::default()
        };
        Ok(Agent {
            algo,
            actor_opt: AdamState::new(&actor, adam),
            critic1_opt: AdamState::new(&critic1, adam),
            critic2_opt: AdamState::new(&critic2, adam),
            target_actor: actor.target_copy(),
            target_critic1: critic1.target_copy(),
            target_critic2: critic2.target_copy(),
            actor,
            critic1,
            critic2,
            arch,
            hp,
            counters: Counters::default(),
        })
    }

    pub fn new_history(&self) -> ObsHistory {
        ObsHistory::new(self.hp.history)
    }

    /// Fresh exploration noise process for the deterministic agent.
    pub fn new_noise(&self) -> OuProcess {
        OuProcess::new(self.hp.exploration, crate::agents::features::ACTION_DIM)
    }

    /// Noiseless action used for evaluation.
    pub fn greedy<R: Rng + ?Sized>(&self, history: &ObsHistory, rng: &mut R) -> Result<RawAction> {
        match self.algo {
            Algo::Det => select_action_det(&self.arch.actor, &self.actor, history, None, rng),
            Algo::Sto => Ok(select_action_sto(&self.arch.actor, &self.actor, history, true, rng)?.0),
        }
    }

    /// Training-time action: OU-perturbed for the deterministic agent, a
    /// policy sample for the stochastic one.
    pub fn explore<R: Rng + ?Sized>(&self, history: &ObsHistory, noise: &mut OuProcess, dt: f64, rng: &mut R) -> Result<RawAction> {
        match self.algo {
            Algo::Det => select_action_det(&self.arch.actor, &self.actor, history, Some((noise, dt)), rng),
            Algo::Sto => Ok(select_action_sto(&self.arch.actor, &self.actor, history, false, rng)?.0),
        }
    }

    /// One training update: both critics, then the actor and all target
    /// networks when `step_in_episode` is a multiple of the policy frequency.
    pub fn update<R: Rng + ?Sized>(&mut self, buffer: &ReplayBuffer, step_in_episode: u32, rng: &mut R) -> Result<UpdateStats> {
        let hp = &self.hp;
        let batch = buffer.sample(hp.batch_size, hp.history, rng)?;
        let b = BatchTensors::<T>::from_batch(&batch);
        let targets = match self.algo {
            Algo::Det => td3_target(
                &self.arch,
                &self.target_actor,
                &self.target_critic1,
                &self.target_critic2,
                &b,
                hp.gamma,
                hp.target_noise,
                hp.noise_clip,
                rng,
            )?,
            Algo::Sto => sac_target(
                &self.arch,
                &self.actor,
                &self.target_critic1,
                &self.target_critic2,
                &b,
                hp.gamma,
                hp.alpha,
                rng,
            )?,
        };
        let (critic1_loss, critic2_loss) = critic_update(
            &self.arch,
            &mut self.critic1,
            &mut self.critic2,
            &mut self.critic1_opt,
            &mut self.critic2_opt,
            &b,
            &targets,
        )?;
        self.counters.critic_updates += 1;

        let t = step_in_episode.min(hp.max_steps);
        let actor_loss = if t.is_multiple_of(policy_freq(t, hp.max_steps)) {
            let loss = match self.algo {
                Algo::Det => actor_update_det(&self.arch, &mut self.actor, &self.critic1, &mut self.actor_opt, &b)?,
                Algo::Sto => actor_update_sto(
                    &self.arch,
                    &mut self.actor,
                    &self.critic1,
                    &self.critic2,
                    &mut self.actor_opt,
                    &b,
                    hp.alpha,
                    rng,
                )?,
            };
            let tau = hp.tau;
            soft_update(&mut self.target_actor, &self.actor, tau)?;
            soft_update(&mut self.target_critic1, &self.critic1, tau)?;
            soft_update(&mut self.target_critic2, &self.critic2, tau)?;
            self.counters.actor_updates += 1;
            Some(loss)
        } else {
            None
        };
        Ok(UpdateStats {
            critic1_loss,
            critic2_loss,
            actor_loss,
        })
    }
}
