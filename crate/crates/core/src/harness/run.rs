//! Training, evaluation and table runs writing into an output directory.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agents::checkpoint;
use crate::agents::{Agent, EpisodeLog, Trainer};
use crate::baseline::Bba;
use crate::env::{NavEnv, TraceWriter};
use crate::error::{Error, Result};
use crate::harness::config::RunConfig;
use crate::harness::eval::{run_trial, Controller, EvalSummary, Greedy, TrialRecord};
use crate::harness::table::emit_table;

pub const TRAIN_LOG: &str = "train_log.jsonl";
pub const FINAL_CHECKPOINT: &str = "final.ckpt";
pub const LAST_CHECKPOINT: &str = "last.ckpt";
pub const DIAGNOSTICS: &str = "diagnostics.json";
pub const SUMMARY: &str = "eval_summary.json";
pub const TRIALS: &str = "trials.jsonl";

/// Independent generator `stream` of `seed`.
pub fn split_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

fn write_lines<S: Serialize>(w: &mut impl Write, path: &Path, items: &[S]) -> Result<()> {
    for it in items {
        serde_json::to_writer(&mut *w, it)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_jsonl<D: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<D>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Diagnostics {
    pub episode: u64,
    pub total_steps: u64,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub checkpoint: PathBuf,
    pub log: PathBuf,
    pub episodes: Vec<EpisodeLog>,
    pub agent: Agent<f64>,
}

/// Trains (or continues training) an agent. Writes the episode log, a
/// checkpoint every `checkpoint_every` episodes and a final checkpoint.
/// On failure the current agent is saved as `last.ckpt` next to a
/// diagnostics file before the error is returned.
pub fn run_training(cfg: &RunConfig) -> Result<TrainReport> {
    cfg.validate()?;
    let out = &cfg.out_dir;
    create_dir(out)?;
    let ckpt_dir = out.join("checkpoints");
    create_dir(&ckpt_dir)?;
    fs::write(out.join("config.toml"), cfg.to_toml()?).map_err(|e| Error::io(out.join("config.toml"), e))?;

    let agent = match &cfg.from {
        Some(path) => {
            let a: Agent<f64> = checkpoint::load(path)?;
            if a.algo != cfg.algo {
                return Err(Error::Config(format!(
                    "checkpoint {} holds a `{}` agent, not `{}`",
                    path.display(),
                    a.algo,
                    cfg.algo
                )));
            }
            a
        }
        None => Agent::new(cfg.algo, cfg.hyper.clone(), &mut split_rng(cfg.seed, 0))?,
    };
    // continuation runs draw fresh streams
    let base = 3 * agent.counters.episodes + 1;
    let world = cfg.world()?;
    let env = NavEnv::new(world, cfg.env_config(), cfg.task.task(), true, 0).with_rng(split_rng(cfg.seed, base));
    let mut trainer = Trainer::new(agent, env, split_rng(cfg.seed, base + 1));

    let log_path = out.join(TRAIN_LOG);
    let log_file = if cfg.from.is_some() {
        fs::OpenOptions::new().create(true).append(true).open(&log_path)
    } else {
        File::create(&log_path)
    }
    .map_err(|e| Error::io(&log_path, e))?;
    let mut log = BufWriter::new(log_file);
    let every = u64::from(cfg.checkpoint_every);
    let result = trainer.train(u64::from(cfg.episodes()), |rec, agent| {
        write_lines(&mut log, &log_path, std::slice::from_ref(rec))?;
        if rec.episode % every == 0 {
            checkpoint::save(agent, &ckpt_dir.join(format!("ep_{:06}.ckpt", rec.episode)))?;
        }
        Ok(())
    });
    match result {
        Ok(episodes) => {
            let path = out.join(FINAL_CHECKPOINT);
            checkpoint::save(&trainer.agent, &path)?;
            Ok(TrainReport {
                checkpoint: path,
                log: log_path,
                episodes,
                agent: trainer.agent,
            })
        }
        Err(e) => {
            let c = trainer.agent.counters;
            write_json(
                &out.join(DIAGNOSTICS),
                &Diagnostics {
                    episode: c.episodes + 1,
                    total_steps: c.total_steps,
                    error: e.to_string(),
                },
            )?;
            checkpoint::save(&trainer.agent, &out.join(LAST_CHECKPOINT))?;
            Err(e)
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub summary: EvalSummary,
    pub trials: Vec<TrialRecord>,
}

fn eval_with<C: Controller + ?Sized>(cfg: &RunConfig, controller: &mut C) -> Result<EvalReport> {
    let world = cfg.world()?;
    let task = cfg.task.task();
    let trace_dir = cfg.out_dir.join("traces");
    if cfg.traces {
        create_dir(&trace_dir)?;
    }
    let mut records = Vec::with_capacity(cfg.trials as usize);
    for trial in 0..cfg.trials {
        let rec = if cfg.traces {
            let mut w = TraceWriter::create(&trace_dir.join(format!("trial_{trial:03}.jsonl")))?;
            run_trial(&world, cfg.env_config(), task, controller, trial, cfg.seed, Some(&mut w))?
        } else {
            run_trial::<C, std::io::Sink>(&world, cfg.env_config(), task, controller, trial, cfg.seed, None)?
        };
        records.push(rec);
    }
    let summary = EvalSummary::from_trials(&cfg.env_label(), task.label(), cfg.agent.label(), &records);
    Ok(EvalReport {
        summary,
        trials: records,
    })
}

/// Evaluates a checkpoint or the behavior-based controller from the task's
/// fixed poses and writes the summary and per-trial records.
pub fn run_eval(cfg: &RunConfig) -> Result<EvalReport> {
    cfg.validate()?;
    let report = match cfg.agent.algo() {
        None => eval_with(cfg, &mut Bba::new(cfg.bba))?,
        Some(algo) => {
            let path = cfg
                .ckpt
                .as_ref()
                .ok_or_else(|| Error::Config(format!("agent `{}` needs a checkpoint", algo)))?;
            let agent: Agent<f64> = checkpoint::load(path)?;
            if agent.algo != algo {
                return Err(Error::Config(format!(
                    "checkpoint {} holds a `{}` agent, not `{}`",
                    path.display(),
                    agent.algo,
                    algo
                )));
            }
            eval_with(cfg, &mut Greedy::new(&agent))?
        }
    };
    create_dir(&cfg.out_dir)?;
    write_json(&cfg.out_dir.join(SUMMARY), &report.summary)?;
    let trials_path = cfg.out_dir.join(TRIALS);
    let f = File::create(&trials_path).map_err(|e| Error::io(&trials_path, e))?;
    write_lines(&mut BufWriter::new(f), &trials_path, &report.trials)?;
    Ok(report)
}

/// Reads summary files and renders them; the CSV is written to `csv_path`
/// when given. Returns the text table.
pub fn run_table(inputs: &[PathBuf], csv_path: Option<&Path>) -> Result<String> {
    if inputs.is_empty() {
        return Err(Error::Config("no summaries given".into()));
    }
    let mut summaries = Vec::with_capacity(inputs.len());
    for p in inputs {
        let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
        summaries.push(serde_json::from_str::<EvalSummary>(&text)?);
    }
    let (text, csv) = emit_table(&summaries)?;
    if let Some(path) = csv_path {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                create_dir(dir)?;
            }
        }
        fs::write(path, csv).map_err(|e| Error::io(path, e))?;
    }
    Ok(text)
}
