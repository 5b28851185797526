//! Range sensing and assembly of the agent observation.
//!
//! Both sensors are modelled as horizontal rays in the vehicle's heading
//! frame. In air, 20 rays tile a 270 degree scan with 13.5 degree spacing,
//! each centered in its sector. Underwater, 20 of the sonar's 256 beams are
//! picked across the 90 degree forward fan and each reports the first hit.

use serde::{Deserialize, Serialize};

use crate::env::geometry::{Point, World};
use crate::env::vehicle::{wrap_angle, Action, Medium, VehicleState};
use crate::error::{Error, Result};

pub const NUM_RANGES: usize = 20;
pub const OBS_DIM: usize = NUM_RANGES + 6;
pub const LIDAR_MAX_RANGE: f64 = 10.0;
pub const SONAR_MAX_RANGE: f64 = 20.0;
pub const SONAR_BEAMS: usize = 256;
const LIDAR_FOV_DEG: f64 = 270.0;
const LIDAR_SPACING_DEG: f64 = 13.5;
const SONAR_FOV_DEG: f64 = 90.0;

/// Ray angles relative to the heading, in radians.
pub fn lidar_angles() -> [f64; NUM_RANGES] {
    std::array::from_fn(|i| (-LIDAR_FOV_DEG / 2.0 + LIDAR_SPACING_DEG * (i as f64 + 0.5)).to_radians())
}

/// Indices of the sonar beams used, out of [`SONAR_BEAMS`].
pub fn sonar_beam_indices() -> [usize; NUM_RANGES] {
    std::array::from_fn(|j| ((j * (SONAR_BEAMS - 1)) as f64 / (NUM_RANGES - 1) as f64).round() as usize)
}

pub fn sonar_angles() -> [f64; NUM_RANGES] {
    let idx = sonar_beam_indices();
    std::array::from_fn(|j| {
        (-SONAR_FOV_DEG / 2.0 + SONAR_FOV_DEG * idx[j] as f64 / (SONAR_BEAMS - 1) as f64).to_radians()
    })
}

fn scan(world: &World, origin: Point, yaw: f64, angles: &[f64; NUM_RANGES], max_range: f64) -> Result<[f64; NUM_RANGES]> {
    let mut out = [0.0; NUM_RANGES];
    for (o, a) in out.iter_mut().zip(angles) {
        let h = yaw + a;
        *o = world.raycast(origin, [h.cos(), h.sin(), 0.0], max_range)?;
    }
    Ok(out)
}

pub fn sample_lidar(world: &World, vehicle: &VehicleState) -> Result<[f64; NUM_RANGES]> {
    if vehicle.medium != Medium::Air {
        return Err(Error::WrongMedium {
            sensor: "lidar",
            medium: vehicle.medium.name(),
        });
    }
    scan(world, vehicle.position, vehicle.yaw, &lidar_angles(), LIDAR_MAX_RANGE)
}

pub fn sample_sonar(world: &World, vehicle: &VehicleState) -> Result<[f64; NUM_RANGES]> {
    if vehicle.medium != Medium::Water {
        return Err(Error::WrongMedium {
            sensor: "sonar",
            medium: vehicle.medium.name(),
        });
    }
    scan(world, vehicle.position, vehicle.yaw, &sonar_angles(), SONAR_MAX_RANGE)
}

/// The 26-value agent input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub ranges: [f64; NUM_RANGES],
    pub prev_action: Action,
    pub target_distance: f64,
    /// Horizontal bearing of the target relative to the heading, in `(-pi, pi]`.
    pub target_bearing: f64,
    /// Angle of the target above the horizontal plane.
    pub target_elevation: f64,
}

impl Observation {
    pub fn to_array(&self) -> [f64; OBS_DIM] {
        let mut out = [0.0; OBS_DIM];
        out[..NUM_RANGES].copy_from_slice(&self.ranges);
        out[NUM_RANGES..NUM_RANGES + 3].copy_from_slice(&self.prev_action.to_array());
        out[NUM_RANGES + 3] = self.target_distance;
        out[NUM_RANGES + 4] = self.target_bearing;
        out[NUM_RANGES + 5] = self.target_elevation;
        out
    }

    pub fn min_range(&self) -> f64 {
        self.ranges.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Distance, bearing and elevation of `target` seen from `vehicle`. A target
/// directly above or below (or at) the vehicle has bearing 0.
pub fn target_relative(vehicle: &VehicleState, target: Point) -> (f64, f64, f64) {
    let [x, y, z] = vehicle.position;
    let (dx, dy, dz) = (target[0] - x, target[1] - y, target[2] - z);
    let horizontal = dx.hypot(dy);
    let distance = (horizontal * horizontal + dz * dz).sqrt();
    let bearing = if horizontal == 0.0 {
        0.0
    } else {
        wrap_angle(dy.atan2(dx) - vehicle.yaw)
    };
    let elevation = if distance == 0.0 { 0.0 } else { dz.atan2(horizontal) };
    (distance, bearing, elevation)
}

pub fn assemble_observation(world: &World, vehicle: &VehicleState, target: Point) -> Result<Observation> {
    let ranges = match vehicle.medium {
        Medium::Air => sample_lidar(world, vehicle)?,
        Medium::Water => sample_sonar(world, vehicle)?,
    };
    let (target_distance, target_bearing, target_elevation) = target_relative(vehicle, target);
    Ok(Observation {
        ranges,
        prev_action: vehicle.prev_action,
        target_distance,
        target_bearing,
        target_elevation,
    })
}
