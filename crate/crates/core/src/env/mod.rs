//! Seedable water-tank world for a hybrid aerial-underwater vehicle.
//!
//! The tank uses a frame with the water surface at `z = 0`, a 1 m water
//! column below it and 5 m of air above. The vehicle flies with LIDAR in
//! air and sonar underwater; wind gusts act only while it is airborne.

pub mod geometry;
pub mod ou;
pub mod reward;
pub mod scenario;
pub mod sensors;
pub mod trace;
pub mod vehicle;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use geometry::{Obstacle, Point, World};
pub use ou::{OuParams, OuProcess};
pub use reward::{reward, DoneReason};
pub use sensors::{assemble_observation, Observation, OBS_DIM};
pub use trace::{TraceRecord, TraceWriter};
pub use vehicle::{step_dynamics, Action, Kinematics, Medium, VehicleState};

use crate::error::{Error, Result};

/// Fixed start of the air-to-water evaluation.
pub const AW_START: Point = [0.0, 0.0, 2.5];
/// Fixed target of the air-to-water evaluation.
pub const AW_TARGET: Point = [3.6, -2.4, -1.0];
/// Same-medium short-range task: start and a goal 2 m straight ahead.
pub const STRAIGHT_START: Point = [-1.0, 0.0, 2.5];
pub const STRAIGHT_TARGET: Point = [1.0, 0.0, 2.5];
pub const STRAIGHT_DISTANCE: f64 = 2.0;

const SAMPLE_ATTEMPTS: usize = 1000;
const AIR_BAND: (f64, f64) = (0.3, 4.0);
const WATER_BAND: (f64, f64) = (-1.0, -0.2);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    /// Start airborne, finish at a submerged target.
    AirToWater,
    /// Start submerged, finish at an airborne target.
    WaterToAir,
    /// Reach a goal 2 m ahead without leaving the starting medium.
    Straight,
}

impl Task {
    pub fn label(self) -> &'static str {
        match self {
            Task::AirToWater => "A-W",
            Task::WaterToAir => "W-A",
            Task::Straight => "S",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub kinematics: Kinematics,
    pub wind: OuParams,
    pub max_steps: u32,
    /// Minimum clearance of sampled starts and goals from walls and obstacles.
    pub clearance: f64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            kinematics: Kinematics::default(),
            wind: OuParams::new(0.5, 0.05),
            max_steps: reward::MAX_STEPS,
            clearance: 1.0,
        }
    }
}

/// Result of one environment step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
    pub done_reason: DoneReason,
    /// Medium at the end of the step.
    pub medium: Medium,
    /// Medium the step was flown in.
    pub step_medium: Medium,
}

fn band(medium: Medium) -> (f64, f64) {
    match medium {
        Medium::Air => AIR_BAND,
        Medium::Water => WATER_BAND,
    }
}

/// Uniform point in `medium` with at least `clearance` from walls and obstacles.
pub fn sample_free_point<R: Rng + ?Sized>(world: &World, medium: Medium, clearance: f64, rng: &mut R) -> Result<Point> {
    let (z_lo, z_hi) = band(medium);
    for _ in 0..SAMPLE_ATTEMPTS {
        let p = [
            rng.random_range(-world.half_x..world.half_x),
            rng.random_range(-world.half_y..world.half_y),
            rng.random_range(z_lo..=z_hi),
        ];
        if world.clearance(p) >= clearance {
            return Ok(p);
        }
    }
    Err(Error::SamplingFailed {
        what: "point",
        attempts: SAMPLE_ATTEMPTS,
    })
}

fn sample_ahead<R: Rng + ?Sized>(world: &World, from: Point, heading: Option<f64>, clearance: f64, rng: &mut R) -> Result<Point> {
    for _ in 0..SAMPLE_ATTEMPTS {
        let h = heading.unwrap_or_else(|| rng.random_range(-PI..PI));
        let p = [
            from[0] + STRAIGHT_DISTANCE * h.cos(),
            from[1] + STRAIGHT_DISTANCE * h.sin(),
            from[2],
        ];
        if world.clearance(p) >= clearance {
            return Ok(p);
        }
        if heading.is_some() {
            break;
        }
    }
    Err(Error::SamplingFailed {
        what: "goal",
        attempts: SAMPLE_ATTEMPTS,
    })
}

/// Initial vehicle state and target for `task`.
///
/// Without `randomize_goal` the fixed evaluation poses are used (the
/// water-to-air task swaps the air-to-water start and target). With it, the
/// start is drawn in the start medium and the target in the opposite one.
pub fn reset_pose<R: Rng + ?Sized>(world: &World, task: Task, rng: &mut R, randomize_goal: bool, clearance: f64) -> Result<(VehicleState, Point)> {
    if !randomize_goal {
        let (start, target) = match task {
            Task::AirToWater => (AW_START, AW_TARGET),
            Task::WaterToAir => (AW_TARGET, AW_START),
            Task::Straight => (STRAIGHT_START, STRAIGHT_TARGET),
        };
        return Ok((VehicleState::at_rest(world, start, 0.0), target));
    }
    match task {
        Task::AirToWater | Task::WaterToAir => {
            let start_medium = if task == Task::AirToWater { Medium::Air } else { Medium::Water };
            let start = sample_free_point(world, start_medium, clearance, rng)?;
            let target = sample_free_point(world, start_medium.opposite(), clearance, rng)?;
            let yaw = rng.random_range(-PI..PI);
            Ok((VehicleState::at_rest(world, start, yaw), target))
        }
        Task::Straight => {
            for _ in 0..SAMPLE_ATTEMPTS {
                let start = sample_free_point(world, Medium::Air, clearance, rng)?;
                let yaw = rng.random_range(-PI..PI);
                if let Ok(target) = sample_ahead(world, start, Some(yaw), clearance, rng) {
                    return Ok((VehicleState::at_rest(world, start, yaw), target));
                }
            }
            Err(Error::SamplingFailed {
                what: "start",
                attempts: SAMPLE_ATTEMPTS,
            })
        }
    }
}

/// A world, a vehicle and its target, with a private seeded generator.
#[derive(Debug, Clone)]
pub struct NavEnv {
    pub world: World,
    pub config: EnvConfig,
    pub task: Task,
    /// Training mode: random starts and goals, new goal after each arrival.
    pub randomize_goal: bool,
    vehicle: VehicleState,
    target: Point,
    wind: OuProcess,
    rng: ChaCha8Rng,
    step_index: u32,
}

impl NavEnv {
    pub fn new(world: World, config: EnvConfig, task: Task, randomize_goal: bool, seed: u64) -> Self {
        NavEnv {
            vehicle: VehicleState::at_rest(&world, AW_START, 0.0),
            target: AW_TARGET,
            wind: OuProcess::new(config.wind, 2),
            rng: ChaCha8Rng::seed_from_u64(seed),
            world,
            config,
            task,
            randomize_goal,
            step_index: 0,
        }
    }

    /// Replaces the generator, e.g. with a per-trial stream.
    pub fn with_rng(mut self, rng: ChaCha8Rng) -> Self {
        self.rng = rng;
        self
    }

    pub fn vehicle(&self) -> &VehicleState {
        &self.vehicle
    }

    pub fn target(&self) -> Point {
        self.target
    }

    pub fn step_index(&self) -> u32 {
        self.step_index
    }

    pub fn wind(&self) -> &OuProcess {
        &self.wind
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn observe(&self) -> Result<Observation> {
        assemble_observation(&self.world, &self.vehicle, self.target)
    }

    pub fn reset(&mut self) -> Result<Observation> {
        let (v, t) = reset_pose(&self.world, self.task, &mut self.rng, self.randomize_goal, self.config.clearance)?;
        self.vehicle = v;
        self.target = t;
        self.wind.reset();
        self.step_index = 0;
        self.observe()
    }

    /// Places the vehicle and target explicitly and restarts the step count.
    pub fn reset_to(&mut self, vehicle: VehicleState, target: Point) -> Result<Observation> {
        self.vehicle = vehicle;
        self.target = target;
        self.wind.reset();
        self.step_index = 0;
        self.observe()
    }

    /// Draws a new training goal after an arrival and returns the fresh
    /// observation. The step count keeps running.
    pub fn regenerate_goal(&mut self) -> Result<Observation> {
        let clearance = self.config.clearance;
        self.target = match self.task {
            Task::AirToWater | Task::WaterToAir => {
                sample_free_point(&self.world, self.vehicle.medium.opposite(), clearance, &mut self.rng)?
            }
            Task::Straight => sample_ahead(&self.world, self.vehicle.position, None, clearance, &mut self.rng)?,
        };
        self.observe()
    }

    pub fn step(&mut self, action: Action) -> Result<StepOutcome> {
        let action = if action.is_finite() { action.clamped() } else { action };
        let step_medium = self.vehicle.medium;
        let wind = match step_medium {
            Medium::Air => {
                self.wind.step(self.config.kinematics.dt, &mut self.rng);
                [self.wind.value[0], self.wind.value[1]]
            }
            Medium::Water => {
                self.wind.reset();
                [0.0, 0.0]
            }
        };
        let mut next = step_dynamics(&self.world, &self.vehicle, action, wind, &self.config.kinematics)?;
        self.step_index += 1;
        let blocked = self.world.is_blocked(next.position);
        if blocked {
            // contact: the vehicle stays where it was
            next.position = self.vehicle.position;
            next.medium = self.vehicle.medium;
        }
        self.vehicle = next;
        let observation = self.observe()?;
        let min_range = if blocked { 0.0 } else { observation.min_range() };
        let (r, reason) = reward::reward_with_limit(
            observation.target_distance,
            min_range,
            self.step_index,
            self.config.max_steps,
        );
        Ok(StepOutcome {
            observation,
            reward: r,
            done: reason.is_terminal(),
            done_reason: reason,
            medium: self.vehicle.medium,
            step_medium,
        })
    }
}
