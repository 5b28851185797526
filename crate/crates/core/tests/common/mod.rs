#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use hydronav::agents::policy::{critic_window, run_window, squashed_gaussian};
use hydronav::agents::update::{sac_target_with_noise, td3_target, BatchTensors};
use hydronav::agents::{policy_freq, Algo, Architecture, HyperParams};
use hydronav::autodiff::{Gradients, Tape, Tensor, Var};
use hydronav::env::reward::{reward, DoneReason};
use hydronav::env::sensors::{assemble_observation, LIDAR_MAX_RANGE, SONAR_MAX_RANGE};
use hydronav::env::{scenario, Action, Medium, OuParams, OuProcess, Point, VehicleState, World, OBS_DIM};
use hydronav::agents::EpisodeLog;
use hydronav::harness::{emit_table, read_jsonl, run_training, AgentKind, EvalSummary, RunConfig, Stat, TaskArg};
use hydronav::nn::{Head, LstmNet, ParamSet, Role};

/// Outcome of one check: a detail line either way.
pub type Check = Result<String, String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_tensor(shape: &[usize], rng: &mut ChaCha8Rng) -> Tensor<f64> {
    Tensor::from_fn(shape, |_| normal(rng))
}

// ---------------------------------------------------------------- gradients

pub const FD_STEP: f64 = 1e-5;
pub const FD_TOLERANCE: f64 = 1e-4;

/// `|a - f| / max(|a|, |f|, 1e-6)`.
pub fn rel_err(a: f64, f: f64) -> f64 {
    (a - f).abs() / a.abs().max(f.abs()).max(1e-6)
}

/// Largest relative error between `grads` and central differences of `loss`
/// at `probes` random coordinates of `params`.
pub fn fd_probe(
    params: &ParamSet<f64>,
    grads: &Gradients<f64>,
    probes: usize,
    rng: &mut ChaCha8Rng,
    loss: impl Fn(&ParamSet<f64>) -> f64,
) -> f64 {
    let names: Vec<String> = params.iter().map(|(n, _)| n.clone()).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let name = &names[rng.random_range(0..names.len())];
        let len = params.get(name).unwrap().len();
        let i = rng.random_range(0..len);
        let mut plus = params.clone();
        plus.get_mut(name).unwrap().data_mut()[i] += FD_STEP;
        let mut minus = params.clone();
        minus.get_mut(name).unwrap().data_mut()[i] -= FD_STEP;
        let fd = (loss(&plus) - loss(&minus)) / (2.0 * FD_STEP);
        let ad = grads.get(name).map_or(0.0, |g| g.data()[i]);
        worst = worst.max(rel_err(ad, fd));
    }
    worst
}

/// A small recurrent net, a padded input window and fixed output weights.
pub struct WindowProbe {
    pub net: LstmNet,
    pub params: ParamSet<f64>,
    pub inputs: Vec<Tensor<f64>>,
    pub lengths: Vec<usize>,
    pub weights: Tensor<f64>,
    critic: bool,
}

impl WindowProbe {
    pub fn actor(seed: u64) -> Self {
        Self::build(LstmNet::new("actor", OBS_DIM, 6, 3, Head::Tanh), Role::Actor, false, seed)
    }

    pub fn critic(seed: u64) -> Self {
        Self::build(LstmNet::new("critic1", OBS_DIM + 3, 6, 1, Head::Linear), Role::Critic1, true, seed)
    }

    fn build(net: LstmNet, role: Role, critic: bool, seed: u64) -> Self {
        let mut r = rng(seed);
        let params = net.init(role, &mut r);
        let (batch, steps) = (3, 4);
        let inputs = (0..steps).map(|_| random_tensor(&[batch, net.input], &mut r)).collect();
        let weights = random_tensor(&[batch, net.output], &mut r);
        WindowProbe {
            net,
            params,
            inputs,
            lengths: vec![4, 2, 1],
            weights,
            critic,
        }
    }

    fn record(&self, params: &ParamSet<f64>, tape: &mut Tape<f64>, trainable: bool) -> Var {
        let p = params.bind(tape, trainable);
        let out = if self.critic {
            let obs: Vec<Var> = self
                .inputs
                .iter()
                .map(|t| tape.constant(Tensor::from_fn(&[t.dims2().0, OBS_DIM], |k| t.data()[(k / OBS_DIM) * (OBS_DIM + 3) + k % OBS_DIM])))
                .collect();
            let act: Vec<Var> = self
                .inputs
                .iter()
                .map(|t| tape.constant(Tensor::from_fn(&[t.dims2().0, 3], |k| t.data()[(k / 3) * (OBS_DIM + 3) + OBS_DIM + k % 3])))
                .collect();
            critic_window(&self.net, tape, &p, &obs, &act, &self.lengths).unwrap()
        } else {
            let xs: Vec<Var> = self.inputs.iter().map(|t| tape.constant(t.clone())).collect();
            run_window(&self.net, tape, &p, &xs, &self.lengths).unwrap()
        };
        let w = tape.constant(self.weights.clone());
        let prod = tape.mul(out, w);
        tape.sum(prod)
    }

    pub fn loss(&self, params: &ParamSet<f64>) -> f64 {
        let mut tape = Tape::new();
        let l = self.record(params, &mut tape, false);
        tape.value(l).item()
    }

    pub fn grads(&self) -> Gradients<f64> {
        let mut tape = Tape::new();
        let l = self.record(&self.params, &mut tape, true);
        tape.backward(l).unwrap()
    }

    pub fn max_rel_err(&self, probes: usize, seed: u64) -> f64 {
        fd_probe(&self.params, &self.grads(), probes, &mut rng(seed), |p| self.loss(p))
    }
}

pub fn check_gradients() -> Check {
    let probes = 150;
    let actor = WindowProbe::actor(11).max_rel_err(probes, 12);
    let critic = WindowProbe::critic(13).max_rel_err(probes, 14);
    let msg = format!("{probes} probes each, max rel err actor {actor:.2e}, critic {critic:.2e} (h={FD_STEP:e})");
    if actor < FD_TOLERANCE && critic < FD_TOLERANCE {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ---------------------------------------------------------------- schedule

pub fn check_policy_freq() -> Check {
    let m = 500;
    let anchors = [(0, 2), (250, 3), (500, 6)];
    for (t, want) in anchors {
        let got = policy_freq(t, m);
        if got != want {
            return Err(format!("policy_freq({t}) = {got}, expected {want}"));
        }
    }
    let values: Vec<u32> = (0..=m).map(|t| policy_freq(t, m)).collect();
    if let Some(t) = values.windows(2).position(|w| w[1] < w[0]) {
        return Err(format!("decreases between t={t} and t={}", t + 1));
    }
    let mut distinct = values.clone();
    distinct.dedup();
    if distinct != vec![2, 3, 4, 5, 6] {
        return Err(format!("takes values {distinct:?}"));
    }
    Ok("2, 3, 6 at t = 0, 250, 500; non-decreasing over 0..=500 through {2,...,6}".into())
}

// ---------------------------------------------------------------- reward

/// Decision table: arrival, then collision, then the step cap.
pub fn reward_table(d: f64, min_range: f64, step: u32) -> (f64, DoneReason) {
    match (d < 0.5, min_range < 0.5, step >= 500) {
        (true, _, _) => (100.0, DoneReason::ReachedGoal),
        (false, true, _) => (-10.0, DoneReason::Collision),
        (false, false, true) => (-10.0, DoneReason::StepLimit),
        (false, false, false) => (0.0, DoneReason::Running),
    }
}

pub fn check_reward_grid() -> Check {
    let mut n = 0;
    for d in [0.49, 0.5, 5.0] {
        for m in [0.49, 0.5, 5.0] {
            for step in [1, 499, 500] {
                let got = reward(d, m, step);
                let want = reward_table(d, m, step);
                if got != want {
                    return Err(format!("d={d} min_range={m} step={step}: got {got:?}, expected {want:?}"));
                }
                n += 1;
            }
        }
    }
    Ok(format!("{n} grid cells match"))
}

// ---------------------------------------------------------------- raycast

pub fn add(a: Point, b: Point, t: f64) -> Point {
    [a[0] + t * b[0], a[1] + t * b[1], a[2] + t * b[2]]
}

/// First sample along the ray, at `step` spacing, that is blocked.
pub fn march(world: &World, origin: Point, dir: Point, max_range: f64, step: f64) -> f64 {
    let mut k = 1u64;
    loop {
        let t = k as f64 * step;
        if t >= max_range {
            return max_range;
        }
        if world.is_blocked(add(origin, dir, t)) {
            return t;
        }
        k += 1;
    }
}

pub fn unit_vector(rng: &mut ChaCha8Rng) -> Point {
    loop {
        let v = [normal(rng), normal(rng), normal(rng)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-9 {
            return v.map(|x| x / n);
        }
    }
}

/// Uniform point of the tank that is outside every obstacle by `margin`.
pub fn free_point(world: &World, margin: f64, rng: &mut ChaCha8Rng) -> Point {
    let (lo, hi) = world.bounds();
    loop {
        let p: Point = std::array::from_fn(|i| rng.random_range(lo[i] + margin..hi[i] - margin));
        if world.clearance(p) > margin && !world.is_blocked(p) {
            return p;
        }
    }
}

/// Largest disagreement between the analytic raycast and 1 mm marching.
pub fn raycast_disagreement(world: &World, rays: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let max_range = 20.0;
    let mut worst: f64 = 0.0;
    for _ in 0..rays {
        let o = free_point(world, 0.01, &mut r);
        let d = unit_vector(&mut r);
        let analytic = world.raycast(o, d, max_range).unwrap();
        let marched = march(world, o, d, max_range, 1e-3);
        worst = worst.max((analytic - marched).abs());
    }
    worst
}

pub fn check_raycast() -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    for id in 0..=2 {
        let w = scenario::builtin(id).unwrap();
        let worst = raycast_disagreement(&w, 1000, 100 + u64::from(id));
        ok &= worst <= 2e-3;
        parts.push(format!("scenario {id}: {:.3} mm", worst * 1e3));
    }
    let msg = format!("1000 rays per scenario, max |analytic - marched| {}", parts.join(", "));
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ---------------------------------------------------------------- observation

/// Random pose in either medium with a random previous command.
pub fn random_vehicle(world: &World, rng: &mut ChaCha8Rng) -> VehicleState {
    let p = free_point(world, 0.01, rng);
    let mut v = VehicleState::at_rest(world, p, rng.random_range(-PI..PI));
    v.prev_action = Action::new(
        rng.random_range(0.0..=0.25),
        rng.random_range(-0.25..=0.25),
        rng.random_range(-0.25..=0.25),
    );
    v
}

pub fn check_observation_contract() -> Check {
    let worlds: Vec<World> = (0..=2).map(|i| scenario::builtin(i).unwrap()).collect();
    let mut r = rng(21);
    let (mut air_max, mut water_max) = (0.0f64, 0.0f64);
    let states = 10_000;
    for k in 0..states {
        let w = &worlds[k % worlds.len()];
        let v = random_vehicle(w, &mut r);
        let target = free_point(w, 0.01, &mut r);
        let obs = assemble_observation(w, &v, target).map_err(|e| e.to_string())?;
        let x = obs.to_array();
        if x.len() != 26 || hydronav::agents::encode(&obs).len() != 26 {
            return Err(format!("observation has {} values", x.len()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(format!("non-finite observation {x:?}"));
        }
        let hi = obs.ranges.iter().copied().fold(0.0, f64::max);
        let lo = obs.ranges.iter().copied().fold(f64::INFINITY, f64::min);
        let cap = match v.medium {
            Medium::Air => {
                air_max = air_max.max(hi);
                LIDAR_MAX_RANGE
            }
            Medium::Water => {
                water_max = water_max.max(hi);
                SONAR_MAX_RANGE
            }
        };
        if hi > cap || lo < 0.0 {
            return Err(format!("{:?} ranges {:?} outside [0, {cap}]", v.medium, obs.ranges));
        }
    }
    Ok(format!(
        "{states} states: 26 values each, largest air range {air_max:.3} m (cap 10), water {water_max:.3} m (cap 20)"
    ))
}

// ---------------------------------------------------------------- targets

/// Random batch of `n` windows of length `steps`; `done` marks every other sample.
pub fn synthetic_batch(n: usize, steps: usize, rng: &mut ChaCha8Rng) -> BatchTensors<f64> {
    let seq = |w: usize, r: &mut ChaCha8Rng| (0..steps).map(|_| random_tensor(&[n, w], r)).collect::<Vec<_>>();
    let obs = seq(OBS_DIM, rng);
    let act = seq(3, rng).into_iter().map(|t| t.map(f64::tanh)).collect();
    let next_obs = seq(OBS_DIM, rng);
    let mut next_act: Vec<Tensor<f64>> = seq(3, rng).into_iter().map(|t| t.map(f64::tanh)).collect();
    *next_act.last_mut().unwrap() = Tensor::zeros(&[n, 3]);
    BatchTensors {
        obs,
        act,
        next_obs,
        next_act,
        reward: Tensor::from_fn(&[n, 1], |_| rng.random_range(-10.0..100.0)),
        done: Tensor::from_fn(&[n, 1], |i| if i % 2 == 0 { 1.0 } else { 0.0 }),
        lengths: (0..n).map(|i| 1 + i % steps).collect(),
    }
}

/// Critic whose output is `value` for every input.
pub fn constant_critic(net: &LstmNet, role: Role, value: f64) -> ParamSet<f64> {
    let mut p = net.zeros(role);
    p.get_mut(&net.param_name("head.b")).unwrap().data_mut()[0] = value;
    p
}

fn terminal_exact(targets: &Tensor<f64>, b: &BatchTensors<f64>) -> Result<usize, String> {
    let mut n = 0;
    for i in 0..b.size() {
        if b.done.data()[i] == 1.0 {
            n += 1;
            if targets.data()[i].to_bits() != b.reward.data()[i].to_bits() {
                return Err(format!("sample {i}: target {} != r {}", targets.data()[i], b.reward.data()[i]));
            }
        }
    }
    Ok(n)
}

pub fn check_target_semantics() -> Check {
    let mut r = rng(31);
    let b = synthetic_batch(16, 4, &mut r);
    let mut total = 0;
    for algo in [Algo::Det, Algo::Sto] {
        let arch = Architecture::new(algo, 5);
        let actor = arch.actor.init(Role::TargetActor, &mut r);
        let c1 = arch.critic1.init(Role::TargetCritic1, &mut r);
        let c2 = arch.critic2.init(Role::TargetCritic2, &mut r);
        let hp = HyperParams::default();
        let t = match algo {
            Algo::Det => td3_target(&arch, &actor, &c1, &c2, &b, hp.gamma, hp.target_noise, hp.noise_clip, &mut r),
            Algo::Sto => {
                let eps = random_tensor(&[b.size(), 3], &mut r);
                sac_target_with_noise(&arch, &actor, &c1, &c2, &b, hp.gamma, hp.alpha, &eps)
            }
        }
        .map_err(|e| e.to_string())?;
        total += terminal_exact(&t, &b)?;
    }
    Ok(format!("{total} terminal entries over td3_target and sac_target equal r bit for bit"))
}

/// `(td3 target, sac target)` with constant critics `q1`, `q2`, the given
/// reward, `d = 0`, and a stochastic actor whose zero-noise sample has
/// log-density `log_prob`.
pub fn constant_targets(q1: f64, q2: f64, r: f64, gamma: f64, alpha: f64, log_prob: f64) -> (Vec<f64>, Vec<f64>) {
    let mut g = rng(41);
    let mut b = synthetic_batch(4, 3, &mut g);
    b.reward = Tensor::full(&[4, 1], r);
    b.done = Tensor::zeros(&[4, 1]);

    let det = Architecture::new(Algo::Det, 4);
    let c1 = constant_critic(&det.critic1, Role::TargetCritic1, q1);
    let c2 = constant_critic(&det.critic2, Role::TargetCritic2, q2);
    let actor = det.actor.init(Role::TargetActor, &mut g);
    let td3 = td3_target(&det, &actor, &c1, &c2, &b, gamma, 0.2, 0.5, &mut g).unwrap();

    // zero weights, mean 0: log pi = -3 log_std - 1.5 ln(2 pi)
    let sto = Architecture::new(Algo::Sto, 4);
    let mut actor = sto.actor.zeros(Role::Actor);
    let log_std = -(log_prob + 1.5 * (2.0 * PI).ln()) / 3.0;
    for x in &mut actor.get_mut(&sto.actor.param_name("head.b")).unwrap().data_mut()[3..] {
        *x = log_std;
    }
    let eps = Tensor::zeros(&[4, 3]);
    let sac = sac_target_with_noise(&sto, &actor, &c1, &c2, &b, gamma, alpha, &eps).unwrap();
    (td3.into_data(), sac.into_data())
}

// ---------------------------------------------------------------- entropy

/// Entropy of `tanh(u)`, `u ~ N(mean, std^2)`, by Simpson's rule in `u`.
pub fn squashed_entropy_quadrature(mean: f64, std: f64) -> f64 {
    let n = 40_000;
    let (a, b) = (mean - 12.0 * std, mean + 12.0 * std);
    let h = (b - a) / n as f64;
    let f = |u: f64| {
        let z = (u - mean) / std;
        let pu = (-0.5 * z * z).exp() / (std * (2.0 * PI).sqrt());
        if pu == 0.0 {
            return 0.0;
        }
        let jac = 1.0 - u.tanh().powi(2);
        // density of a = tanh(u) is pu / jac
        -pu * (pu / jac).ln()
    };
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// Monte-Carlo entropy of one component from the policy's own log-densities.
pub fn squashed_entropy_mc(mean: f64, std: f64, samples: usize, rng: &mut ChaCha8Rng) -> f64 {
    let chunk = 50_000;
    let mut sum = 0.0;
    let mut done = 0;
    while done < samples {
        let n = chunk.min(samples - done);
        let mut tape = Tape::new();
        let head = tape.constant(Tensor::from_fn(&[n, 2], |k| if k % 2 == 0 { mean } else { std.ln() }));
        let eps = random_tensor(&[n, 1], rng);
        let s = squashed_gaussian(&mut tape, head, &eps);
        sum += tape.value(s.log_prob).data().iter().sum::<f64>();
        done += n;
    }
    -sum / samples as f64
}

pub fn check_sac_entropy() -> Check {
    let mut r = rng(51);
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for _ in 0..5 {
        let mean = r.random_range(-1.0..1.0);
        let std = r.random_range(0.05f64..0.5).max(0.05);
        let exact = squashed_entropy_quadrature(mean, std);
        let mc = squashed_entropy_mc(mean, std, 1_000_000, &mut r);
        let rel = (mc - exact).abs() / exact.abs();
        worst = worst.max(rel);
        parts.push(format!("({mean:.2},{std:.2}) {mc:.4}/{exact:.4}"));
    }
    let msg = format!("max rel diff {:.3}% over 5 pairs: {}", worst * 100.0, parts.join(" "));
    if worst < 0.01 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ---------------------------------------------------------------- OU

pub fn ou_empirical_variance(params: OuParams, dt: f64, steps: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut ou = OuProcess::new(params, 1);
    for _ in 0..10_000 {
        ou.step(dt, &mut r);
    }
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..steps {
        ou.step(dt, &mut r);
        let x = ou.value[0];
        s += x;
        s2 += x * x;
    }
    let n = steps as f64;
    s2 / n - (s / n).powi(2)
}

pub fn check_ou_variance() -> Check {
    let params = OuParams::new(0.15, 0.2);
    let var = ou_empirical_variance(params, 0.1, 1_000_000, 61);
    let want = params.sigma * params.sigma / (2.0 * params.theta);
    let rel = (var - want).abs() / want;
    let msg = format!("variance {var:.5} vs sigma^2/(2 theta) = {want:.5} ({:.2}% off)", rel * 100.0);
    if rel < 0.05 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ---------------------------------------------------------------- table

pub fn det_row_summary() -> EvalSummary {
    EvalSummary {
        env: "1".into(),
        task: "A-W".into(),
        agent: "Det.".into(),
        trials: 100,
        successes: 94,
        t_air: Some(Stat { mean: 76.28, std: 63.20 }),
        t_water: Some(Stat { mean: 12.51, std: 20.71 }),
    }
}

pub fn check_table() -> Check {
    let failed = EvalSummary {
        successes: 0,
        t_air: None,
        t_water: None,
        agent: "BBA".into(),
        ..det_row_summary()
    };
    let (text, csv) = emit_table(&[det_row_summary(), failed]).map_err(|e| e.to_string())?;
    let lines: Vec<&str> = text.lines().collect();
    let cells = |l: &str| l.split("  ").map(str::trim).filter(|c| !c.is_empty()).map(String::from).collect::<Vec<_>>();
    let row = cells(lines[2]);
    let want = ["1", "A-W Det.", "76.28 ± 63.20", "12.51 ± 20.71", "94"];
    if row != want {
        return Err(format!("row {row:?}, expected {want:?}"));
    }
    let empty = cells(lines[3]);
    if empty != ["1", "A-W BBA", "-", "-", "0"] {
        return Err(format!("zero-success row {empty:?}"));
    }
    if !csv.contains("1,A-W Det.,76.28,63.20,12.51,20.71,94,100") {
        return Err(format!("csv {csv:?}"));
    }
    Ok(format!("rendered `{}`", lines[2].split_whitespace().collect::<Vec<_>>().join(" ")))
}


// ---------------------------------------------------------------- determinism

/// Tiny but complete training profile: warmup, updates and delayed steps all
/// happen within a few short episodes.
pub fn tiny_hyper() -> HyperParams {
    HyperParams {
        hidden: 6,
        batch_size: 16,
        history: 3,
        start_steps: 60,
        max_steps: 40,
        ..HyperParams::default()
    }
}

pub fn tiny_run(algo: Algo, out: &std::path::Path, episodes: u32, seed: u64) -> RunConfig {
    RunConfig {
        algo,
        agent: match algo {
            Algo::Det => AgentKind::Det,
            Algo::Sto => AgentKind::Sto,
        },
        scenario: 1,
        task: TaskArg::Aw,
        episodes: Some(episodes),
        seed,
        out_dir: out.to_path_buf(),
        checkpoint_every: 5,
        hyper: tiny_hyper(),
        ..RunConfig::default()
    }
}

/// Trains the same configuration twice into separate directories and
/// compares logs (wall time aside) and every checkpoint byte for byte.
pub fn determinism_report(algo: Algo, episodes: u32) -> Result<String, String> {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut logs = Vec::new();
    let mut ckpts = Vec::new();
    for d in &dirs {
        let rep = run_training(&tiny_run(algo, d.path(), episodes, 77)).map_err(|e| e.to_string())?;
        let log: Vec<EpisodeLog> = read_jsonl(&rep.log).map_err(|e| e.to_string())?;
        logs.push(log.iter().map(EpisodeLog::timeless).collect::<Vec<_>>());
        let mut files: Vec<_> = std::fs::read_dir(d.path().join("checkpoints"))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.push(rep.checkpoint.clone());
        files.sort();
        ckpts.push(files.iter().map(|f| std::fs::read(f).unwrap()).collect::<Vec<_>>());
    }
    if logs[0].len() != episodes as usize {
        return Err(format!("{} log lines for {episodes} episodes", logs[0].len()));
    }
    if logs[0] != logs[1] {
        return Err(format!("{algo}: training logs differ"));
    }
    if ckpts[0] != ckpts[1] {
        return Err(format!("{algo}: checkpoints differ"));
    }
    let updates = logs[0].iter().filter(|l| l.actor_loss.is_some()).count();
    Ok(format!(
        "{algo}: {episodes} episodes, {} log lines and {} checkpoints identical ({updates} episodes with actor updates)",
        logs[0].len(),
        ckpts[0].len()
    ))
}

pub fn check_determinism() -> Check {
    let det = determinism_report(Algo::Det, 10)?;
    let sto = determinism_report(Algo::Sto, 10)?;
    Ok(format!("{det}; {sto}"))
}

/// Reduced network and batch sizes with a faster target tracking rate, so
/// the training criteria fit a single desktop core.
pub fn desk_profile() -> HyperParams {
    HyperParams {
        hidden: 32,
        batch_size: 64,
        history: 4,
        tau: 0.05,
        ..HyperParams::default()
    }
}
