//! Binary arrival/failure reward.

use serde::{Deserialize, Serialize};

pub const R_ARRIVE: f64 = 100.0;
pub const R_COLLIDE: f64 = -10.0;
/// Arrival radius around the target.
pub const GOAL_DISTANCE: f64 = 0.5;
/// Minimum range reading below which the vehicle counts as collided.
pub const COLLISION_RANGE: f64 = 0.5;
pub const MAX_STEPS: u32 = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoneReason {
    ReachedGoal,
    Collision,
    StepLimit,
    Running,
}

impl DoneReason {
    pub fn is_terminal(self) -> bool {
        self != DoneReason::Running
    }
}

/// Reward for the step numbered `step_index` (1-based) with an episode cap of
/// `max_steps`. Arrival wins over collision and over the step limit.
pub fn reward_with_limit(distance: f64, min_range: f64, step_index: u32, max_steps: u32) -> (f64, DoneReason) {
    if distance < GOAL_DISTANCE {
        (R_ARRIVE, DoneReason::ReachedGoal)
    } else if min_range < COLLISION_RANGE {
        (R_COLLIDE, DoneReason::Collision)
    } else if step_index >= max_steps {
        (R_COLLIDE, DoneReason::StepLimit)
    } else {
        (0.0, DoneReason::Running)
    }
}

pub fn reward(distance: f64, min_range: f64, step_index: u32) -> (f64, DoneReason) {
    reward_with_limit(distance, min_range, step_index, MAX_STEPS)
}
