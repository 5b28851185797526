//! Behavior-based controller: three behaviors under fixed-priority
//! arbitration, reading the same observation as the learning agents.

use serde::{Deserialize, Serialize};

use crate::env::sensors::NUM_RANGES;
use crate::env::vehicle::{MAX_DELTA_YAW, MAX_LINEAR, MAX_VERTICAL};
use crate::env::{Action, Observation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Behavior {
    GoToTarget,
    AdjustDepth,
    AvoidObstacle,
}

impl Behavior {
    /// Higher wins ties in weight.
    fn priority(self) -> u8 {
        match self {
            Behavior::GoToTarget => 0,
            Behavior::AdjustDepth => 1,
            Behavior::AvoidObstacle => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BehaviorOutput {
    pub behavior: Behavior,
    /// In `[0, 1]`; zero means inactive.
    pub weight: f64,
    pub action: Action,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BbaGains {
    /// Heading-rate gain on the target bearing.
    pub yaw_gain: f64,
    /// Avoidance switches on below this range (m).
    pub avoid_distance: f64,
    /// Avoidance stays on until the range exceeds `avoid_distance + hysteresis`.
    pub hysteresis: f64,
    /// Forward-speed fraction kept while avoiding at the collision range.
    pub avoid_min_speed: f64,
    /// Depth control takes over above this target elevation magnitude (rad).
    pub steep_elevation: f64,
    /// Vertical offsets below this (m) are left to the pursuit behavior.
    pub depth_deadband: f64,
}

impl Default for BbaGains {
    fn default() -> Self {
        BbaGains {
            yaw_gain: 0.8,
            avoid_distance: 1.5,
            hysteresis: 0.2,
            avoid_min_speed: 0.2,
            steep_elevation: 0.6,
            depth_deadband: 0.05,
        }
    }
}

/// The controller. Its only memory is the avoidance hysteresis flag.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Bba {
    pub gains: BbaGains,
    avoiding: bool,
}

fn sign_with_deadband(x: f64, band: f64) -> f64 {
    if x > band {
        1.0
    } else if x < -band {
        -1.0
    } else {
        0.0
    }
}

impl Bba {
    pub fn new(gains: BbaGains) -> Self {
        Bba { gains, avoiding: false }
    }

    pub fn reset(&mut self) {
        self.avoiding = false;
    }

    pub fn avoiding(&self) -> bool {
        self.avoiding
    }

    fn vertical_offset(obs: &Observation) -> f64 {
        obs.target_distance * obs.target_elevation.sin()
    }

    /// Full forward speed, proportional heading correction and full vertical
    /// rate toward the target's side of the horizontal plane.
    pub fn go_to_target(&self, obs: &Observation) -> BehaviorOutput {
        let g = &self.gains;
        let dz = Self::vertical_offset(obs);
        BehaviorOutput {
            behavior: Behavior::GoToTarget,
            weight: 0.5,
            action: Action::new(
                MAX_LINEAR,
                MAX_VERTICAL * sign_with_deadband(dz, g.depth_deadband),
                (g.yaw_gain * obs.target_bearing).clamp(-MAX_DELTA_YAW, MAX_DELTA_YAW),
            ),
        }
    }

    /// When the target lies steeply above or below, climb or dive at full
    /// rate while slowing forward motion by the cosine of the elevation.
    pub fn adjust_depth(&self, obs: &Observation) -> BehaviorOutput {
        let g = &self.gains;
        let dz = Self::vertical_offset(obs);
        let active = obs.target_elevation.abs() > g.steep_elevation && dz.abs() > g.depth_deadband;
        BehaviorOutput {
            behavior: Behavior::AdjustDepth,
            weight: if active { 1.0 } else { 0.0 },
            action: Action::new(
                MAX_LINEAR * obs.target_elevation.cos().max(0.0),
                MAX_VERTICAL * sign_with_deadband(dz, g.depth_deadband),
                (g.yaw_gain * obs.target_bearing).clamp(-MAX_DELTA_YAW, MAX_DELTA_YAW),
            ),
        }
    }

    /// Turns at full rate away from the side of the closest return and slows
    /// down the closer it is. Updates the hysteresis flag.
    pub fn avoid_obstacle(&mut self, obs: &Observation) -> BehaviorOutput {
        let g = self.gains;
        let (closest, min) = obs
            .ranges
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, r)| if r < acc.1 { (i, r) } else { acc });
        self.avoiding = if self.avoiding {
            min <= g.avoid_distance + g.hysteresis
        } else {
            min < g.avoid_distance
        };
        // rays are ordered right to left
        let away = if closest < NUM_RANGES / 2 { 1.0 } else { -1.0 };
        let closeness = ((min - 0.5) / (g.avoid_distance - 0.5)).clamp(0.0, 1.0);
        let speed = g.avoid_min_speed + (1.0 - g.avoid_min_speed) * closeness;
        let dz = Self::vertical_offset(obs);
        BehaviorOutput {
            behavior: Behavior::AvoidObstacle,
            weight: if self.avoiding { 1.0 } else { 0.0 },
            action: Action::new(
                MAX_LINEAR * speed,
                MAX_VERTICAL * sign_with_deadband(dz, g.depth_deadband),
                MAX_DELTA_YAW * away,
            ),
        }
    }

    /// Evaluates all behaviors and returns the winner: highest weight, ties
    /// broken by AvoidObstacle > AdjustDepth > GoToTarget.
    pub fn decide_with(&mut self, obs: &Observation) -> BehaviorOutput {
        let candidates = [self.avoid_obstacle(obs), self.adjust_depth(obs), self.go_to_target(obs)];
        let mut best = candidates[0];
        for c in &candidates[1..] {
            if c.weight > best.weight || (c.weight == best.weight && c.behavior.priority() > best.behavior.priority()) {
                best = *c;
            }
        }
        best.action = best.action.clamped();
        best
    }

    pub fn decide(&mut self, obs: &Observation) -> Action {
        self.decide_with(obs).action
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open(bearing: f64, elevation: f64) -> Observation {
        Observation {
            ranges: [5.0; NUM_RANGES],
            prev_action: Action::default(),
            target_distance: 3.0,
            target_bearing: bearing,
            target_elevation: elevation,
        }
    }

    #[test]
    fn pure_pursuit_dead_ahead() {
        let mut b = Bba::default();
        let out = b.decide_with(&open(0.0, 0.0));
        assert_eq!(out.behavior, Behavior::GoToTarget);
        assert_eq!(out.action, Action::new(0.25, 0.0, 0.0));
    }

    #[test]
    fn turns_right_away_from_close_left_return() {
        let mut b = Bba::default();
        let mut o = open(0.0, 0.0);
        o.ranges[13] = 0.6;
        let out = b.decide_with(&o);
        assert_eq!(out.behavior, Behavior::AvoidObstacle);
        assert!(out.action.delta_yaw < 0.0);
        let mut o = open(0.0, 0.0);
        o.ranges[4] = 0.6;
        assert!(b.decide(&o).delta_yaw > 0.0);
    }

    #[test]
    fn avoidance_hysteresis() {
        let mut b = Bba::default();
        let mut o = open(0.0, 0.0);
        o.ranges[15] = 1.4;
        b.decide(&o);
        assert!(b.avoiding());
        o.ranges[15] = 1.6;
        assert_eq!(b.decide_with(&o).behavior, Behavior::AvoidObstacle);
        o.ranges[15] = 1.8;
        assert_eq!(b.decide_with(&o).behavior, Behavior::GoToTarget);
        o.ranges[15] = 1.6;
        assert_eq!(b.decide_with(&o).behavior, Behavior::GoToTarget);
    }

    #[test]
    fn steep_target_hands_over_to_depth_control() {
        let mut b = Bba::default();
        let out = b.decide_with(&open(0.2, -1.2));
        assert_eq!(out.behavior, Behavior::AdjustDepth);
        assert_eq!(out.action.vertical, -0.25);
        assert!(out.action.linear < 0.25 * 0.5);
    }
}
