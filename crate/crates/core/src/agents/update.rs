//! Bootstrap targets and the critic and actor gradient steps.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::agents::buffer::Batch;
use crate::agents::features::ACTION_DIM;
use crate::agents::policy::{critic_window, normal_tensor, run_window, squashed_gaussian, Architecture};
use crate::autodiff::{Gradients, Tape, Tensor, Var};
use crate::env::OBS_DIM;
use crate::error::{Error, Result};
use crate::nn::ParamSet;
use crate::optim::AdamState;
use crate::scalar::Scalar;

/// A sampled batch converted to the network scalar type.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchTensors<T> {
    pub obs: Vec<Tensor<T>>,
    pub act: Vec<Tensor<T>>,
    pub next_obs: Vec<Tensor<T>>,
    /// Successor actions; the final step holds zeros until a bootstrap
    /// action is substituted.
    pub next_act: Vec<Tensor<T>>,
    /// `[batch, 1]`.
    pub reward: Tensor<T>,
    /// `[batch, 1]`, 1 for terminal transitions.
    pub done: Tensor<T>,
    pub lengths: Vec<usize>,
}

impl<T: Scalar> BatchTensors<T> {
    pub fn from_batch(b: &Batch) -> Self {
        let n = b.size;
        let conv = |rows: &Vec<Vec<f64>>, width: usize| -> Vec<Tensor<T>> {
            rows.iter()
                .map(|r| Tensor::from_fn(&[n, width], |i| T::of(r[i])))
                .collect()
        };
        BatchTensors {
            obs: conv(&b.obs, OBS_DIM),
            act: conv(&b.act, ACTION_DIM),
            next_obs: conv(&b.next_obs, OBS_DIM),
            next_act: conv(&b.next_act, ACTION_DIM),
            reward: Tensor::from_fn(&[n, 1], |i| T::of(b.reward[i])),
            done: Tensor::from_fn(&[n, 1], |i| T::of(b.done[i])),
            lengths: b.lengths.clone(),
        }
    }

    pub fn size(&self) -> usize {
        self.lengths.len()
    }

    pub fn history(&self) -> usize {
        self.obs.len()
    }

    fn bind(tape: &mut Tape<T>, rows: &[Tensor<T>]) -> Vec<Var> {
        rows.iter().map(|t| tape.constant(t.clone())).collect()
    }
}

/// `r + gamma * v`, or exactly `r` when `done` is set.
pub fn bootstrap<T: Scalar>(reward: &Tensor<T>, done: &Tensor<T>, gamma: f64, value: &Tensor<T>) -> Tensor<T> {
    let g = T::of(gamma);
    Tensor::from_fn(reward.shape(), |i| {
        let r = reward.data()[i];
        if done.data()[i] != T::zero() {
            r
        } else {
            r + g * value.data()[i]
        }
    })
}

/// Both critics on windows whose final action is `last_action`.
#[allow(clippy::too_many_arguments)]
fn twin_q<T: Scalar>(
    arch: &Architecture,
    tape: &mut Tape<T>,
    c1: &ParamSet<T>,
    c2: &ParamSet<T>,
    trainable: bool,
    obs: &[Var],
    act: &[Var],
    lengths: &[usize],
) -> Result<(Var, Var)> {
    let p1 = c1.bind(tape, trainable);
    let p2 = c2.bind(tape, trainable);
    let q1 = critic_window(&arch.critic1, tape, &p1, obs, act, lengths)?;
    let q2 = critic_window(&arch.critic2, tape, &p2, obs, act, lengths)?;
    Ok((q1, q2))
}

fn with_last<T: Scalar>(tape: &mut Tape<T>, rows: &[Tensor<T>], last: Var) -> Vec<Var> {
    let mut vars = BatchTensors::bind(tape, &rows[..rows.len() - 1]);
    vars.push(last);
    vars
}

/// Target of the deterministic agent: smoothed target-actor action on the
/// successor window, minimum of the two target critics.
#[allow(clippy::too_many_arguments)]
pub fn td3_target<T: Scalar, R: Rng + ?Sized>(
    arch: &Architecture,
    target_actor: &ParamSet<T>,
    target_c1: &ParamSet<T>,
    target_c2: &ParamSet<T>,
    b: &BatchTensors<T>,
    gamma: f64,
    target_noise: f64,
    noise_clip: f64,
    rng: &mut R,
) -> Result<Tensor<T>> {
    let mut tape = Tape::new();
    let pa = target_actor.bind(&mut tape, false);
    let next_obs = BatchTensors::bind(&mut tape, &b.next_obs);
    let mu = run_window(&arch.actor, &mut tape, &pa, &next_obs, &b.lengths)?;
    let noise = if target_noise > 0.0 {
        Some(Normal::new(0.0, target_noise).map_err(|e| Error::Config(e.to_string()))?)
    } else {
        None
    };
    let mut smoothed = tape.value(mu).clone();
    for x in smoothed.data_mut() {
        let eps = noise.map_or(0.0, |n| n.sample(rng)).clamp(-noise_clip, noise_clip);
        *x = (*x + T::of(eps)).max(-T::one()).min(T::one());
    }
    let a_next = tape.constant(smoothed);
    let next_act = with_last(&mut tape, &b.next_act, a_next);
    let (q1, q2) = twin_q(arch, &mut tape, target_c1, target_c2, false, &next_obs, &next_act, &b.lengths)?;
    let q = tape.min(q1, q2);
    Ok(bootstrap(&b.reward, &b.done, gamma, tape.value(q)))
}

/// Target of the stochastic agent: fresh policy sample on the successor
/// window, minimum target critic minus `alpha` times its log-density.
#[allow(clippy::too_many_arguments)]
pub fn sac_target<T: Scalar, R: Rng + ?Sized>(
    arch: &Architecture,
    actor: &ParamSet<T>,
    target_c1: &ParamSet<T>,
    target_c2: &ParamSet<T>,
    b: &BatchTensors<T>,
    gamma: f64,
    alpha: f64,
    rng: &mut R,
) -> Result<Tensor<T>> {
    let eps = normal_tensor(b.size(), ACTION_DIM, rng);
    sac_target_with_noise(arch, actor, target_c1, target_c2, b, gamma, alpha, &eps)
}

#[allow(clippy::too_many_arguments)]
pub fn sac_target_with_noise<T: Scalar>(
    arch: &Architecture,
    actor: &ParamSet<T>,
    target_c1: &ParamSet<T>,
    target_c2: &ParamSet<T>,
    b: &BatchTensors<T>,
    gamma: f64,
    alpha: f64,
    eps: &Tensor<T>,
) -> Result<Tensor<T>> {
    let mut tape = Tape::new();
    let pa = actor.bind(&mut tape, false);
    let next_obs = BatchTensors::bind(&mut tape, &b.next_obs);
    let head = run_window(&arch.actor, &mut tape, &pa, &next_obs, &b.lengths)?;
    let s = squashed_gaussian(&mut tape, head, eps);
    let next_act = with_last(&mut tape, &b.next_act, s.action);
    let (q1, q2) = twin_q(arch, &mut tape, target_c1, target_c2, false, &next_obs, &next_act, &b.lengths)?;
    let q = tape.min(q1, q2);
    let ent = tape.scale(s.log_prob, T::of(alpha));
    let soft = tape.sub(q, ent);
    Ok(bootstrap(&b.reward, &b.done, gamma, tape.value(soft)))
}

fn check_loss(what: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite {
            what,
            detail: format!("loss evaluated to {v}"),
        })
    }
}

/// Critic losses and their gradients, split per critic.
pub struct CriticGrads<T> {
    pub loss1: f64,
    pub loss2: f64,
    pub grads1: Gradients<T>,
    pub grads2: Gradients<T>,
}

/// Mean squared error of each critic against fixed `targets`.
pub fn critic_loss_grad<T: Scalar>(
    arch: &Architecture,
    c1: &ParamSet<T>,
    c2: &ParamSet<T>,
    b: &BatchTensors<T>,
    targets: &Tensor<T>,
) -> Result<CriticGrads<T>> {
    let mut tape = Tape::new();
    let obs = BatchTensors::bind(&mut tape, &b.obs);
    let act = BatchTensors::bind(&mut tape, &b.act);
    let (q1, q2) = twin_q(arch, &mut tape, c1, c2, true, &obs, &act, &b.lengths)?;
    let y = tape.constant(targets.clone());
    let mut mse = |q: Var| {
        let d = tape.sub(q, y);
        let d2 = tape.square(d);
        tape.mean(d2)
    };
    let l1 = mse(q1);
    let l2 = mse(q2);
    let (loss1, loss2) = (tape.value(l1).item().as_f64(), tape.value(l2).item().as_f64());
    check_loss("critic1 loss", loss1)?;
    check_loss("critic2 loss", loss2)?;
    let total = tape.add(l1, l2);
    let g = tape.backward(total)?;
    Ok(CriticGrads {
        loss1,
        loss2,
        grads1: g.with_prefix(&format!("{}.", arch.critic1.name)),
        grads2: g.with_prefix(&format!("{}.", arch.critic2.name)),
    })
}

/// One Adam step on each critic; returns both losses.
#[allow(clippy::too_many_arguments)]
pub fn critic_update<T: Scalar>(
    arch: &Architecture,
    c1: &mut ParamSet<T>,
    c2: &mut ParamSet<T>,
    opt1: &mut AdamState<T>,
    opt2: &mut AdamState<T>,
    b: &BatchTensors<T>,
    targets: &Tensor<T>,
) -> Result<(f64, f64)> {
    let g = critic_loss_grad(arch, c1, c2, b, targets)?;
    opt1.apply(c1, &g.grads1)?;
    opt2.apply(c2, &g.grads2)?;
    Ok((g.loss1, g.loss2))
}

/// `-mean Q1(s, mu(s))` with the actor output substituted at the final step,
/// and its gradient with respect to the actor.
pub fn actor_loss_grad_det<T: Scalar>(
    arch: &Architecture,
    actor: &ParamSet<T>,
    c1: &ParamSet<T>,
    b: &BatchTensors<T>,
) -> Result<(f64, Gradients<T>)> {
    actor_loss_grad_with(arch, actor, b, |tape, obs, act, lengths| {
        let pc = c1.bind(tape, false);
        critic_window(&arch.critic1, tape, &pc, obs, act, lengths)
    })
}

/// Deterministic actor objective under an arbitrary `critic`, which maps the
/// observation and action windows (and window lengths) to `[batch, 1]` values.
pub fn actor_loss_grad_with<T: Scalar>(
    arch: &Architecture,
    actor: &ParamSet<T>,
    b: &BatchTensors<T>,
    critic: impl FnOnce(&mut Tape<T>, &[Var], &[Var], &[usize]) -> Result<Var>,
) -> Result<(f64, Gradients<T>)> {
    let mut tape = Tape::new();
    let pa = actor.bind(&mut tape, true);
    let obs = BatchTensors::bind(&mut tape, &b.obs);
    let mu = run_window(&arch.actor, &mut tape, &pa, &obs, &b.lengths)?;
    let act = with_last(&mut tape, &b.act, mu);
    let q = critic(&mut tape, &obs, &act, &b.lengths)?;
    let mq = tape.mean(q);
    let loss = tape.neg(mq);
    let value = tape.value(loss).item().as_f64();
    check_loss("actor loss", value)?;
    let g = tape.backward(loss)?;
    Ok((value, g))
}

pub fn actor_update_det<T: Scalar>(
    arch: &Architecture,
    actor: &mut ParamSet<T>,
    c1: &ParamSet<T>,
    opt: &mut AdamState<T>,
    b: &BatchTensors<T>,
) -> Result<f64> {
    let (loss, g) = actor_loss_grad_det(arch, actor, c1, b)?;
    opt.apply(actor, &g)?;
    Ok(loss)
}

/// `mean(alpha * log pi(a|s) - min_i Q_i(s, a))` for reparameterized
/// samples `a` driven by `eps`, and its gradient with respect to the actor.
pub fn actor_loss_grad_sto<T: Scalar>(
    arch: &Architecture,
    actor: &ParamSet<T>,
    c1: &ParamSet<T>,
    c2: &ParamSet<T>,
    b: &BatchTensors<T>,
    alpha: f64,
    eps: &Tensor<T>,
) -> Result<(f64, Gradients<T>)> {
    let mut tape = Tape::new();
    let pa = actor.bind(&mut tape, true);
    let obs = BatchTensors::bind(&mut tape, &b.obs);
    let head = run_window(&arch.actor, &mut tape, &pa, &obs, &b.lengths)?;
    let s = squashed_gaussian(&mut tape, head, eps);
    let act = with_last(&mut tape, &b.act, s.action);
    let (q1, q2) = twin_q(arch, &mut tape, c1, c2, false, &obs, &act, &b.lengths)?;
    let q = tape.min(q1, q2);
    let ent = tape.scale(s.log_prob, T::of(alpha));
    let per = tape.sub(ent, q);
    let loss = tape.mean(per);
    let value = tape.value(loss).item().as_f64();
    check_loss("actor loss", value)?;
    let g = tape.backward(loss)?;
    Ok((value, g))
}

#[allow(clippy::too_many_arguments)]
pub fn actor_update_sto<T: Scalar, R: Rng + ?Sized>(
    arch: &Architecture,
    actor: &mut ParamSet<T>,
    c1: &ParamSet<T>,
    c2: &ParamSet<T>,
    opt: &mut AdamState<T>,
    b: &BatchTensors<T>,
    alpha: f64,
    rng: &mut R,
) -> Result<f64> {
    let eps = normal_tensor(b.size(), ACTION_DIM, rng);
    let (loss, g) = actor_loss_grad_sto(arch, actor, c1, c2, b, alpha, &eps)?;
    opt.apply(actor, &g)?;
    Ok(loss)
}
