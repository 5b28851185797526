//! Recurrent double-critic agents: a deterministic agent with smoothed
//! target actions and delayed policy updates, and a stochastic
//! entropy-regularized agent, sharing replay memory and training loop.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod agent;
pub mod buffer;
pub mod checkpoint;
pub mod features;
pub mod hyper;
pub mod policy;
pub mod schedule;
mod train;
pub mod update;

pub use agent::{Agent, Counters, UpdateStats};
pub use buffer::{Batch, ReplayBuffer, Transition};
pub use features::{encode, random_action, scale_action, unscale_action, RawAction, ACTION_DIM};
pub use hyper::HyperParams;
pub use policy::{select_action_det, select_action_sto, Architecture, ObsHistory};
pub use schedule::policy_freq;
pub use train::{EpisodeLog, Trainer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Det,
    Sto,
}

impl Algo {
    pub fn tag(self) -> &'static str {
        match self {
            Algo::Det => "det",
            Algo::Sto => "sto",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "det" => Ok(Algo::Det),
            "sto" => Ok(Algo::Sto),
            other => Err(Error::Config(format!("unknown algorithm `{other}` (expected det or sto)"))),
        }
    }
}
