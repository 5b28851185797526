//! Network layouts, windowed recurrent evaluation and action selection.

use std::collections::VecDeque;
use std::f64::consts::{LN_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::agents::features::{encode, RawAction, ACTION_DIM};
use crate::agents::Algo;
use crate::autodiff::{Tape, Tensor, Var};
use crate::env::{Observation, OuProcess, OBS_DIM};
use crate::error::{Error, Result};
use crate::nn::{Bound, Head, LstmNet, ParamSet};
use crate::scalar::Scalar;

pub const LOG_STD_MIN: f64 = -20.0;
pub const LOG_STD_MAX: f64 = 2.0;

/// The actor and the two critics of one agent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub actor: LstmNet,
    pub critic1: LstmNet,
    pub critic2: LstmNet,
}

impl Architecture {
    /// Deterministic actors emit a tanh-bounded action; stochastic actors
    /// emit a mean and a log-std per action component.
    pub fn new(algo: Algo, hidden: usize) -> Self {
        let actor = match algo {
            Algo::Det => LstmNet::new("actor", OBS_DIM, hidden, ACTION_DIM, Head::Tanh),
            Algo::Sto => LstmNet::new("actor", OBS_DIM, hidden, 2 * ACTION_DIM, Head::Linear),
        };
        let critic = |name: &str| LstmNet::new(name, OBS_DIM + ACTION_DIM, hidden, 1, Head::Linear);
        Architecture {
            actor,
            critic1: critic("critic1"),
            critic2: critic("critic2"),
        }
    }
}

/// Runs `inputs` (one `[batch, width]` var per time step) through `net` from
/// the zero state and returns the head output after the last step.
///
/// `lengths[b]` counts the trailing steps of sample `b` that are real; the
/// state of a sample stays zero across its leading padded steps.
pub fn run_window<T: Scalar>(net: &LstmNet, tape: &mut Tape<T>, p: &Bound, inputs: &[Var], lengths: &[usize]) -> Result<Var> {
    let steps = inputs.len();
    if steps == 0 {
        return Err(Error::Shape {
            layer: net.param_name("lstm"),
            expected: vec![1],
            got: vec![0],
        });
    }
    let batch = tape.value(inputs[0]).dims2().0;
    if lengths.len() != batch {
        return Err(Error::Shape {
            layer: net.param_name("lstm.window"),
            expected: vec![batch],
            got: vec![lengths.len()],
        });
    }
    let mut s = net.zero_state_vars(tape, batch);
    for (k, &x) in inputs.iter().enumerate() {
        let next = net.cell(tape, p, x, s)?;
        let padded = lengths.iter().any(|&len| steps - len.min(steps) > k);
        s = if padded {
            let hidden = net.hidden;
            let mask = Tensor::from_fn(&[batch, hidden], |i| {
                let len = lengths[i / hidden].min(steps);
                if k >= steps - len {
                    T::one()
                } else {
                    T::zero()
                }
            });
            let m = tape.constant(mask);
            let h = tape.mul(m, next.h);
            let c = tape.mul(m, next.c);
            crate::nn::StateVars { h, c }
        } else {
            next
        };
    }
    net.head(tape, p, s.h)
}

/// Critic over a window of observations and actions, joined per step.
pub fn critic_window<T: Scalar>(net: &LstmNet, tape: &mut Tape<T>, p: &Bound, obs: &[Var], act: &[Var], lengths: &[usize]) -> Result<Var> {
    let inputs: Vec<Var> = obs
        .iter()
        .zip(act)
        .map(|(&o, &a)| tape.concat_cols(&[o, a]))
        .collect();
    run_window(net, tape, p, &inputs, lengths)
}

/// Reparameterized draw from a tanh-squashed diagonal Gaussian.
#[derive(Debug, Clone, Copy)]
pub struct SquashedSample {
    /// `[batch, dims]` actions in `(-1, 1)`.
    pub action: Var,
    /// `[batch, 1]` log-density of `action`.
    pub log_prob: Var,
}

/// Splits `head` (`[batch, 2 * dims]`) into mean and log-std, draws
/// `u = mean + std * eps` and squashes it with `tanh`.
pub fn squashed_gaussian<T: Scalar>(tape: &mut Tape<T>, head: Var, eps: &Tensor<T>) -> SquashedSample {
    let dims = tape.value(head).dims2().1 / 2;
    let mean = tape.slice_cols(head, 0, dims);
    let raw_log_std = tape.slice_cols(head, dims, dims);
    let log_std = tape.clamp(raw_log_std, T::of(LOG_STD_MIN), T::of(LOG_STD_MAX));
    let std = tape.exp(log_std);
    let e = tape.constant(eps.clone());
    let spread = tape.mul(std, e);
    let u = tape.add(mean, spread);
    let action = tape.tanh(u);

    let half_sq = tape.constant(eps.map(|x| T::of(0.5) * x * x));
    let quad = tape.add(half_sq, log_std);
    let quad = tape.shift(quad, T::of(0.5 * (2.0 * PI).ln()));
    let gauss = tape.neg(quad);
    // log(1 - tanh(u)^2) = 2 (ln 2 - u - softplus(-2u))
    let m2u = tape.scale(u, T::of(-2.0));
    let sp = tape.softplus(m2u);
    let s = tape.add(u, sp);
    let s = tape.neg(s);
    let s = tape.shift(s, T::of(LN_2));
    let jac = tape.scale(s, T::of(2.0));
    let per_dim = tape.sub(gauss, jac);
    let log_prob = tape.sum_cols(per_dim);
    SquashedSample { action, log_prob }
}

/// Standard normal noise of the given shape.
pub fn normal_tensor<T: Scalar, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Tensor<T> {
    Tensor::from_fn(&[rows, cols], |_| T::of(rng.sample::<f64, _>(StandardNormal)))
}

/// The most recent encoded observations of the current episode segment,
/// which together stand in for the actor's recurrent state while acting.
#[derive(Debug, Clone, PartialEq)]
pub struct ObsHistory {
    capacity: usize,
    steps: VecDeque<[f64; OBS_DIM]>,
}

impl ObsHistory {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "history capacity must be positive");
        ObsHistory {
            capacity,
            steps: VecDeque::with_capacity(capacity),
        }
    }

    pub fn push(&mut self, obs: &Observation) {
        if self.steps.len() == self.capacity {
            self.steps.pop_front();
        }
        self.steps.push_back(encode(obs));
    }

    pub fn clear(&mut self) {
        self.steps.clear();
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    fn bind<T: Scalar>(&self, tape: &mut Tape<T>) -> Vec<Var> {
        self.steps
            .iter()
            .map(|row| tape.constant(Tensor::from_fn(&[1, OBS_DIM], |i| T::of(row[i]))))
            .collect()
    }
}

fn actor_head<T: Scalar>(net: &LstmNet, actor: &ParamSet<T>, history: &ObsHistory, tape: &mut Tape<T>) -> Result<Var> {
    if history.is_empty() {
        return Err(Error::Config("action requested before any observation".into()));
    }
    let p = actor.bind(tape, false);
    let inputs = history.bind(tape);
    let n = inputs.len();
    run_window(net, tape, &p, &inputs, &[n])
}

/// Deterministic policy: tanh head output, plus the next exploration noise
/// value when `noise` is given, clamped to `[-1, 1]`.
pub fn select_action_det<T: Scalar, R: Rng + ?Sized>(
    net: &LstmNet,
    actor: &ParamSet<T>,
    history: &ObsHistory,
    noise: Option<(&mut OuProcess, f64)>,
    rng: &mut R,
) -> Result<RawAction> {
    let mut tape = Tape::new();
    let out = actor_head(net, actor, history, &mut tape)?;
    let v = tape.value(out).data();
    let mut a: RawAction = std::array::from_fn(|i| v[i].as_f64());
    if let Some((ou, dt)) = noise {
        ou.step(dt, rng);
        for (x, n) in a.iter_mut().zip(&ou.value) {
            *x += n;
        }
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            what: "actor output",
            detail: format!("{a:?}"),
        });
    }
    Ok(a.map(|x| x.clamp(-1.0, 1.0)))
}

/// Stochastic policy: a squashed-Gaussian sample and its log-density, or
/// `tanh(mean)` when `deterministic` (log-density then taken at the mean).
pub fn select_action_sto<T: Scalar, R: Rng + ?Sized>(
    net: &LstmNet,
    actor: &ParamSet<T>,
    history: &ObsHistory,
    deterministic: bool,
    rng: &mut R,
) -> Result<(RawAction, f64)> {
    let mut tape = Tape::new();
    let out = actor_head(net, actor, history, &mut tape)?;
    let dims = tape.value(out).dims2().1 / 2;
    let eps = if deterministic {
        Tensor::zeros(&[1, dims])
    } else {
        normal_tensor(1, dims, rng)
    };
    let s = squashed_gaussian(&mut tape, out, &eps);
    let v = tape.value(s.action).data();
    let a: RawAction = std::array::from_fn(|i| v[i].as_f64());
    let lp = tape.value(s.log_prob).item().as_f64();
    if a.iter().any(|x| !x.is_finite()) || lp.is_nan() {
        return Err(Error::NonFinite {
            what: "policy sample",
            detail: format!("action {a:?}, log-prob {lp}"),
        });
    }
    Ok((a, lp))
}
