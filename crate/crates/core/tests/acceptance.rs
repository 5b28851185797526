//! Acceptance criteria, one PASS/FAIL line each. Extra command-line words
//! select criteria by substring, e.g. `cargo test --test acceptance -- smoke`.

mod common;

use std::time::{Duration, Instant};

use common::*;
use hydronav::agents::{Agent, Algo, Trainer};
use hydronav::env::{scenario, EnvConfig, NavEnv, Task};
use hydronav::harness::{evaluate, evaluate_sampled, run_eval, run_training, split_rng, AgentKind, Greedy, RunConfig, TaskArg};

type Criterion = (&'static str, fn() -> Check);

const SMOKE_EPISODES: u64 = 300;
const SMOKE_EVAL_EVERY: u64 = 10;
const SMOKE_TRIALS: u32 = 50;
const SMOKE_BUDGET: Duration = Duration::from_secs(30 * 60);

/// Trains on the empty-tank goal-ahead task, evaluating on sampled poses
/// every few episodes, until the success rate reaches `need`.
fn smoke(algo: Algo, need: f64, seed: u64) -> Check {
    let world = scenario::builtin(0).map_err(|e| e.to_string())?;
    let agent: Agent<f64> = Agent::new(algo, desk_profile(), &mut split_rng(seed, 0)).map_err(|e| e.to_string())?;
    let env = NavEnv::new(world.clone(), EnvConfig::default(), Task::Straight, true, 0).with_rng(split_rng(seed, 1));
    let mut trainer = Trainer::new(agent, env, split_rng(seed, 2));
    let started = Instant::now();
    let mut best = 0.0f64;
    for ep in 1..=SMOKE_EPISODES {
        trainer.run_episode().map_err(|e| e.to_string())?;
        if ep % SMOKE_EVAL_EVERY != 0 {
            continue;
        }
        let (s, _) = evaluate_sampled(
            &world,
            EnvConfig::default(),
            Task::Straight,
            &mut Greedy::new(&trainer.agent),
            SMOKE_TRIALS,
            seed + 1000,
            "0",
            "smoke",
        )
        .map_err(|e| e.to_string())?;
        best = best.max(s.success_rate());
        if s.success_rate() >= need {
            let took = started.elapsed();
            let line = format!(
                "{algo}: {}/{SMOKE_TRIALS} after {ep} episodes in {:.0} s",
                s.successes,
                took.as_secs_f64()
            );
            return if took < SMOKE_BUDGET { Ok(line) } else { Err(format!("{line}, over the 30 min budget")) };
        }
    }
    Err(format!(
        "{algo}: best success rate {:.0}% within {SMOKE_EPISODES} episodes (need {:.0}%), {:.0} s",
        100.0 * best,
        100.0 * need,
        started.elapsed().as_secs_f64()
    ))
}

fn check_smoke() -> Check {
    let sto = smoke(Algo::Sto, 0.8, 1);
    let det = smoke(Algo::Det, 0.6, 1);
    match (sto, det) {
        (Ok(s), Ok(d)) => Ok(format!("{s}; {d}")),
        (s, d) => Err(format!("{}; {}", s.unwrap_or_else(|e| e), d.unwrap_or_else(|e| e))),
    }
}

const MILESTONE_EPISODES: u32 = 1500;
const MILESTONE_TRIALS: u32 = 100;

fn check_milestone() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let train = RunConfig {
        algo: Algo::Sto,
        agent: AgentKind::Sto,
        scenario: 1,
        task: TaskArg::Aw,
        episodes: Some(MILESTONE_EPISODES),
        seed: 1,
        out_dir: dir.path().join("train"),
        checkpoint_every: 500,
        hyper: desk_profile(),
        ..RunConfig::default()
    };
    let started = Instant::now();
    let rep = run_training(&train).map_err(|e| e.to_string())?;
    let goals: u32 = rep.episodes.iter().map(|l| l.goals).sum();
    let eval = RunConfig {
        ckpt: Some(rep.checkpoint.clone()),
        trials: MILESTONE_TRIALS,
        seed: 2,
        out_dir: dir.path().join("eval"),
        ..train.clone()
    };
    let sto = run_eval(&eval).map_err(|e| e.to_string())?.summary;

    let world = scenario::builtin(1).map_err(|e| e.to_string())?;
    let (bba, _) = evaluate(
        &world,
        EnvConfig::default(),
        Task::AirToWater,
        &mut hydronav::baseline::Bba::default(),
        MILESTONE_TRIALS,
        2,
        "1",
        "BBA",
    )
    .map_err(|e| e.to_string())?;

    let line = format!(
        "Sto. {}/{MILESTONE_TRIALS} (need 60) after {MILESTONE_EPISODES} episodes ({goals} training goals, {:.0} s); BBA {}/{MILESTONE_TRIALS} (need 80)",
        sto.successes,
        started.elapsed().as_secs_f64(),
        bba.successes
    );
    if sto.success_rate() >= 0.6 && bba.success_rate() >= 0.8 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn timed(limit: Duration, f: fn() -> Check) -> Check {
    let started = Instant::now();
    let detail = f()?;
    let took = started.elapsed();
    let line = format!("{detail} ({:.1} s)", took.as_secs_f64());
    if took < limit {
        Ok(line)
    } else {
        Err(format!("{line}, over the {} s limit", limit.as_secs()))
    }
}

fn check_gradients_timed() -> Check {
    timed(Duration::from_secs(60), check_gradients)
}

fn check_raycast_timed() -> Check {
    timed(Duration::from_secs(60), check_raycast)
}

const CRITERIA: &[Criterion] = &[
    ("gradient correctness", check_gradients_timed),
    ("policy_freq schedule", check_policy_freq),
    ("reward function grid", check_reward_grid),
    ("raycast oracle", check_raycast_timed),
    ("observation contract", check_observation_contract),
    ("target semantics", check_target_semantics),
    ("SAC log-prob entropy", check_sac_entropy),
    ("OU stationary variance", check_ou_variance),
    ("determinism", check_determinism),
    ("smoke training", check_smoke),
    ("medium-transition milestone", check_milestone),
    ("table emission", check_table),
];

fn main() {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (name, check) in CRITERIA {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
