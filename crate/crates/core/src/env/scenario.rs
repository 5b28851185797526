//! Scenario files: tank dimensions, water level and obstacle primitives.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::geometry::{Obstacle, World};
use crate::error::{Error, Result};

const EMPTY: &str = include_str!("../../scenarios/empty.toml");
const RISERS: &str = include_str!("../../scenarios/risers.toml");
const PLATFORM: &str = include_str!("../../scenarios/platform.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TankSpec {
    /// Length, width and total height in meters.
    pub size: [f64; 3],
    pub water_depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub tank: TankSpec,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Scenario(e.to_string()))
    }

    /// Builds the world with the water surface at `z = 0`.
    pub fn into_world(self) -> Result<World> {
        let [sx, sy, sz] = self.tank.size;
        if !(sx > 0.0 && sy > 0.0 && sz > 0.0) {
            return Err(Error::Scenario(format!("tank size {:?} must be positive", self.tank.size)));
        }
        if !(self.tank.water_depth >= 0.0 && self.tank.water_depth <= sz) {
            return Err(Error::Scenario(format!(
                "water depth {} outside 0..{sz}",
                self.tank.water_depth
            )));
        }
        let world = World {
            name: self.name,
            half_x: sx / 2.0,
            half_y: sy / 2.0,
            floor: -self.tank.water_depth,
            surface: 0.0,
            ceiling: sz - self.tank.water_depth,
            obstacles: self.obstacles,
        };
        for (i, o) in world.obstacles.iter().enumerate() {
            let (lo, hi) = o.bounds();
            if !(world.inside_tank(lo) && world.inside_tank(hi)) {
                return Err(Error::Scenario(format!("obstacle {i} extends beyond the tank")));
            }
        }
        Ok(world)
    }
}

/// Built-in scenarios: 0 is the empty tank, 1 the risers, 2 the platform.
pub fn builtin(id: u8) -> Result<World> {
    let text = match id {
        0 => EMPTY,
        1 => RISERS,
        2 => PLATFORM,
        _ => return Err(Error::Scenario(format!("no built-in scenario {id}"))),
    };
    ScenarioFile::parse(text)?.into_world()
}

pub fn load(path: &Path) -> Result<World> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ScenarioFile::parse(&text)?.into_world()
}
