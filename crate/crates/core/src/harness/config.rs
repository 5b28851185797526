use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::agents::{Algo, HyperParams};
use crate::baseline::BbaGains;
use crate::env::{scenario, EnvConfig, Task, World};
use crate::error::{Error, Result};

/// Evaluated controller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Det,
    Sto,
    Bba,
}

impl AgentKind {
    /// Label used in result tables.
    pub fn label(self) -> &'static str {
        match self {
            AgentKind::Det => "Det.",
            AgentKind::Sto => "Sto.",
            AgentKind::Bba => "BBA",
        }
    }

    pub fn algo(self) -> Option<Algo> {
        match self {
            AgentKind::Det => Some(Algo::Det),
            AgentKind::Sto => Some(Algo::Sto),
            AgentKind::Bba => None,
        }
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "det" => Ok(AgentKind::Det),
            "sto" => Ok(AgentKind::Sto),
            "bba" => Ok(AgentKind::Bba),
            other => Err(Error::Config(format!("unknown agent `{other}` (expected det, sto or bba)"))),
        }
    }
}

/// Task names accepted in configuration and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskArg {
    Aw,
    Wa,
    Straight,
}

impl TaskArg {
    pub fn task(self) -> Task {
        match self {
            TaskArg::Aw => Task::AirToWater,
            TaskArg::Wa => Task::WaterToAir,
            TaskArg::Straight => Task::Straight,
        }
    }
}

impl FromStr for TaskArg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aw" => Ok(TaskArg::Aw),
            "wa" => Ok(TaskArg::Wa),
            "straight" => Ok(TaskArg::Straight),
            other => Err(Error::Config(format!("unknown task `{other}` (expected aw, wa or straight)"))),
        }
    }
}

impl fmt::Display for TaskArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TaskArg::Aw => "aw",
            TaskArg::Wa => "wa",
            TaskArg::Straight => "straight",
        })
    }
}

/// Everything a training or evaluation run needs. Loaded from TOML; every
/// field is optional there and unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub algo: Algo,
    pub agent: AgentKind,
    /// Built-in scenario: 0 empty tank, 1 risers, 2 platform.
    pub scenario: u8,
    /// Scenario description file; replaces `scenario` when set.
    pub scenario_file: Option<PathBuf>,
    pub task: TaskArg,
    /// Training episodes for this run; defaults to `hyper.max_episodes`.
    pub episodes: Option<u32>,
    pub seed: u64,
    pub trials: u32,
    pub out_dir: PathBuf,
    /// Checkpoint to continue training from.
    pub from: Option<PathBuf>,
    /// Checkpoint to evaluate.
    pub ckpt: Option<PathBuf>,
    pub checkpoint_every: u32,
    /// Write a per-step trace file for every evaluation trial.
    pub traces: bool,
    pub hyper: HyperParams,
    pub bba: BbaGains,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algo: Algo::Sto,
            agent: AgentKind::Sto,
            scenario: 1,
            scenario_file: None,
            task: TaskArg::Aw,
            episodes: None,
            seed: 0,
            trials: 100,
            out_dir: PathBuf::from("runs"),
            from: None,
            ckpt: None,
            checkpoint_every: 100,
            traces: false,
            hyper: HyperParams::default(),
            bba: BbaGains::default(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.hyper.validate()?;
        if self.scenario_file.is_none() && self.scenario > 2 {
            return Err(Error::Config(format!("scenario {} is not 0, 1 or 2", self.scenario)));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.checkpoint_every == 0 {
            return Err(Error::Config("checkpoint_every must be at least 1".into()));
        }
        Ok(())
    }

    pub fn episodes(&self) -> u32 {
        self.episodes.unwrap_or(self.hyper.max_episodes)
    }

    pub fn world(&self) -> Result<World> {
        match &self.scenario_file {
            Some(p) => scenario::load(p),
            None => scenario::builtin(self.scenario),
        }
    }

    /// Label of the scenario in result tables.
    pub fn env_label(&self) -> String {
        match &self.scenario_file {
            Some(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "custom".into()),
            None => self.scenario.to_string(),
        }
    }

    pub fn env_config(&self) -> EnvConfig {
        EnvConfig {
            max_steps: self.hyper.max_steps,
            ..EnvConfig::default()
        }
    }
}
