use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hydronav::agents::Algo;
use hydronav::harness::{format_stat, run_eval, run_table, run_training, AgentKind, RunConfig, TaskArg};

const USAGE: u8 = 1;
const RUNTIME: u8 = 2;

/// Train, evaluate and tabulate hybrid aerial-underwater navigation agents.
#[derive(Parser, Debug)]
#[command(name = "hydronav", version)]
struct Cli {
    /// Output root; each run writes into a subdirectory of it.
    #[arg(long, global = true, env = "HYDRONAV_OUT", default_value = "runs")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a deterministic or stochastic agent.
    Train(TrainArgs),
    /// Evaluate a checkpoint or the behavior-based baseline on fixed poses.
    Eval(EvalArgs),
    /// Render evaluation summaries as a results table.
    Table(TableArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// TOML run configuration; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = ["0", "1", "2"])]
    scenario: Option<String>,
    /// Scenario description file, replacing --scenario.
    #[arg(long)]
    scenario_file: Option<PathBuf>,
    #[arg(long, value_parser = ["aw", "wa", "straight"])]
    task: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long, value_parser = ["det", "sto"])]
    algo: Option<String>,
    #[arg(long)]
    episodes: Option<u32>,
    /// Continue from this checkpoint.
    #[arg(long)]
    from: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, value_parser = ["det", "sto", "bba"])]
    agent: Option<String>,
    #[arg(long)]
    ckpt: Option<PathBuf>,
    #[arg(long)]
    trials: Option<u32>,
    /// Write a per-step trace for every trial.
    #[arg(long)]
    traces: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// Evaluation summary files.
    #[arg(long, num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,
    /// CSV destination; defaults to `table.csv` under the output root.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn runtime(e: impl ToString) -> Failure {
    Failure::Runtime(e.to_string())
}

fn base_config(common: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p).map_err(usage)?,
        None => RunConfig::default(),
    };
    if let Some(s) = &common.scenario {
        cfg.scenario = s.parse().map_err(usage)?;
        cfg.scenario_file = None;
    }
    if let Some(f) = &common.scenario_file {
        cfg.scenario_file = Some(f.clone());
    }
    if let Some(t) = &common.task {
        cfg.task = t.parse::<TaskArg>().map_err(usage)?;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn run_dir(root: &Path, kind: &str, who: &str, cfg: &RunConfig) -> PathBuf {
    root.join(format!("{kind}-{who}-s{}-{}-seed{}", cfg.env_label(), cfg.task, cfg.seed))
}

fn train(root: &Path, args: TrainArgs) -> Result<(), Failure> {
    let mut cfg = base_config(&args.common)?;
    if let Some(a) = &args.algo {
        cfg.algo = a.parse::<Algo>().map_err(usage)?;
    }
    if let Some(n) = args.episodes {
        cfg.episodes = Some(n);
    }
    if let Some(f) = args.from {
        cfg.from = Some(f);
    }
    cfg.out_dir = run_dir(root, "train", &cfg.algo.to_string(), &cfg);
    cfg.validate().map_err(usage)?;
    let rep = run_training(&cfg).map_err(runtime)?;
    let goals: u32 = rep.episodes.iter().map(|l| l.goals).sum();
    println!(
        "trained {} episodes ({} in total, {} steps, {goals} goals)",
        rep.episodes.len(),
        rep.agent.counters.episodes,
        rep.agent.counters.total_steps
    );
    println!("log: {}", rep.log.display());
    println!("checkpoint: {}", rep.checkpoint.display());
    Ok(())
}

fn eval(root: &Path, args: EvalArgs) -> Result<(), Failure> {
    let mut cfg = base_config(&args.common)?;
    if let Some(a) = &args.agent {
        cfg.agent = a.parse::<AgentKind>().map_err(usage)?;
    }
    if let Some(c) = args.ckpt {
        cfg.ckpt = Some(c);
    }
    if let Some(n) = args.trials {
        cfg.trials = n;
    }
    cfg.traces |= args.traces;
    let who = match cfg.agent {
        AgentKind::Det => "det",
        AgentKind::Sto => "sto",
        AgentKind::Bba => "bba",
    };
    if cfg.agent != AgentKind::Bba && cfg.ckpt.is_none() {
        return Err(usage(format!("--agent {who} needs --ckpt")));
    }
    cfg.out_dir = run_dir(root, "eval", who, &cfg);
    cfg.validate().map_err(usage)?;
    let rep = run_eval(&cfg).map_err(runtime)?;
    let s = &rep.summary;
    println!(
        "{} {} scenario {}: {}/{} successes, T_air {}, T_water {}",
        s.agent,
        s.task,
        s.env,
        s.successes,
        s.trials,
        format_stat(s.t_air),
        format_stat(s.t_water)
    );
    println!("results: {}", cfg.out_dir.display());
    Ok(())
}

fn table(root: &Path, args: TableArgs) -> Result<(), Failure> {
    let csv = args.csv.unwrap_or_else(|| root.join("table.csv"));
    let text = run_table(&args.inputs, Some(&csv)).map_err(runtime)?;
    print!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Train(a) => train(&cli.out, a),
        Command::Eval(a) => eval(&cli.out, a),
        Command::Table(a) => table(&cli.out, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(USAGE)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(RUNTIME)
        }
    }
}
