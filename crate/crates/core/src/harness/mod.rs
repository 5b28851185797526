//! Run configuration, training and evaluation runs, and result tables.

pub mod config;
pub mod eval;
pub mod run;
pub mod table;

pub use config::{AgentKind, RunConfig, TaskArg};
pub use eval::{evaluate, evaluate_sampled, run_sampled_trial, run_trial, trial_rng, Controller, EvalSummary, Greedy, Stat, TrialRecord};
pub use run::{read_jsonl, run_eval, run_table, run_training, split_rng, Diagnostics, EvalReport, TrainReport};
pub use table::{emit_table, format_stat, parse_csv, render_csv, render_text, CsvRow};
