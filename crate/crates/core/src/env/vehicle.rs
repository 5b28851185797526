//! Vehicle state, commands and kinematics.

use serde::{Deserialize, Serialize};

use crate::env::geometry::{Point, World};
use crate::error::{Error, Result};

pub const MAX_LINEAR: f64 = 0.25;
pub const MAX_VERTICAL: f64 = 0.25;
pub const MAX_DELTA_YAW: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Medium {
    Air,
    Water,
}

impl Medium {
    pub fn at(world: &World, z: f64) -> Medium {
        if z < world.surface {
            Medium::Water
        } else {
            Medium::Air
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Medium::Air => "air",
            Medium::Water => "water",
        }
    }

    pub fn opposite(self) -> Medium {
        match self {
            Medium::Air => Medium::Water,
            Medium::Water => Medium::Air,
        }
    }
}

/// A command in physical units: forward speed (m/s), vertical speed (m/s)
/// and heading change per step (rad).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub linear: f64,
    pub vertical: f64,
    pub delta_yaw: f64,
}

impl Action {
    pub fn new(linear: f64, vertical: f64, delta_yaw: f64) -> Self {
        Action {
            linear,
            vertical,
            delta_yaw,
        }
    }

    pub fn clamped(self) -> Self {
        Action {
            linear: self.linear.clamp(0.0, MAX_LINEAR),
            vertical: self.vertical.clamp(-MAX_VERTICAL, MAX_VERTICAL),
            delta_yaw: self.delta_yaw.clamp(-MAX_DELTA_YAW, MAX_DELTA_YAW),
        }
    }

    pub fn within_bounds(&self) -> bool {
        (0.0..=MAX_LINEAR).contains(&self.linear)
            && (-MAX_VERTICAL..=MAX_VERTICAL).contains(&self.vertical)
            && (-MAX_DELTA_YAW..=MAX_DELTA_YAW).contains(&self.delta_yaw)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.linear, self.vertical, self.delta_yaw]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub position: Point,
    pub yaw: f64,
    pub medium: Medium,
    pub prev_action: Action,
}

impl VehicleState {
    pub fn at_rest(world: &World, position: Point, yaw: f64) -> Self {
        VehicleState {
            position,
            yaw: wrap_angle(yaw),
            medium: Medium::at(world, position[2]),
            prev_action: Action::default(),
        }
    }
}

/// Kinematic parameters of the vehicle model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kinematics {
    /// Control period in seconds.
    pub dt: f64,
    /// Vertical speed multiplier while submerged.
    pub water_gain: f64,
}

impl Default for Kinematics {
    fn default() -> Self {
        Kinematics {
            dt: 0.1,
            water_gain: 0.7,
        }
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut r = a.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

/// Advances the vehicle one control period. `wind` is the horizontal wind
/// velocity, applied only while airborne. Altitude is bounded by floor and
/// ceiling; horizontal motion is not constrained here.
pub fn step_dynamics(world: &World, vehicle: &VehicleState, action: Action, wind: [f64; 2], k: &Kinematics) -> Result<VehicleState> {
    if !action.is_finite() {
        return Err(Error::NonFinite {
            what: "action",
            detail: format!("{action:?}"),
        });
    }
    let yaw = wrap_angle(vehicle.yaw + action.delta_yaw);
    let wind = match vehicle.medium {
        Medium::Air => wind,
        Medium::Water => [0.0, 0.0],
    };
    let gain = match vehicle.medium {
        Medium::Air => 1.0,
        Medium::Water => k.water_gain,
    };
    let [x, y, z] = vehicle.position;
    let position = [
        x + (action.linear * yaw.cos() + wind[0]) * k.dt,
        y + (action.linear * yaw.sin() + wind[1]) * k.dt,
        (z + action.vertical * k.dt * gain).clamp(world.floor, world.ceiling),
    ];
    Ok(VehicleState {
        position,
        yaw,
        medium: Medium::at(world, position[2]),
        prev_action: action,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn air_at(z: f64) -> VehicleState {
        VehicleState::at_rest(&World::empty(), [0.0, 0.0, z], 0.0)
    }

    #[test]
    fn zero_action_keeps_pose() {
        let w = World::empty();
        let v = air_at(2.5);
        let n = step_dynamics(&w, &v, Action::default(), [0.0, 0.0], &Kinematics::default()).unwrap();
        assert_eq!(n.position, v.position);
        assert_eq!(n.medium, Medium::Air);
    }

    #[test]
    fn forward_step_length() {
        let w = World::empty();
        let n = step_dynamics(&w, &air_at(2.5), Action::new(0.25, 0.0, 0.0), [0.0, 0.0], &Kinematics::default()).unwrap();
        assert!((n.position[0] - 0.025).abs() < 1e-15);
    }

    #[test]
    fn crossing_the_surface_switches_medium_and_drops_wind() {
        let w = World::empty();
        let k = Kinematics::default();
        let v = air_at(0.01);
        let n = step_dynamics(&w, &v, Action::new(0.0, -0.25, 0.0), [0.3, 0.0], &k).unwrap();
        assert_eq!(n.medium, Medium::Water);
        assert!((n.position[0] - 0.03).abs() < 1e-15);
        let m = step_dynamics(&w, &n, Action::default(), [0.3, 0.0], &k).unwrap();
        assert_eq!(m.position[0], n.position[0]);
    }

    #[test]
    fn water_slows_vertical_motion() {
        let w = World::empty();
        let v = VehicleState::at_rest(&w, [0.0, 0.0, -0.5], 0.0);
        let n = step_dynamics(&w, &v, Action::new(0.0, -0.25, 0.0), [0.0; 2], &Kinematics::default()).unwrap();
        assert!((n.position[2] - (-0.5 - 0.0175)).abs() < 1e-15);
    }

    #[test]
    fn non_finite_action_is_rejected() {
        let w = World::empty();
        assert!(step_dynamics(&w, &air_at(1.0), Action::new(f64::NAN, 0.0, 0.0), [0.0; 2], &Kinematics::default()).is_err());
    }

    #[test]
    fn wrap_is_half_open() {
        use std::f64::consts::PI;
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
    }
}
