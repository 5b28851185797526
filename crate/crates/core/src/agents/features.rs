//! Fixed scaling of observations into network inputs, and of raw policy
//! outputs into physical commands.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use crate::env::sensors::{LIDAR_MAX_RANGE, NUM_RANGES};
use crate::env::vehicle::{MAX_DELTA_YAW, MAX_LINEAR, MAX_VERTICAL};
use crate::env::{Action, Observation, OBS_DIM};

pub const ACTION_DIM: usize = 3;

/// Policy output in `[-1, 1]^3`.
pub type RawAction = [f64; ACTION_DIM];

/// Maps a raw action to forward speed `[0, 0.25]`, vertical speed
/// `[-0.25, 0.25]` and heading change `[-0.25, 0.25]`.
pub fn scale_action(raw: RawAction) -> Action {
    let r = raw.map(|x| x.clamp(-1.0, 1.0));
    Action::new(
        0.5 * MAX_LINEAR * (r[0] + 1.0),
        MAX_VERTICAL * r[1],
        MAX_DELTA_YAW * r[2],
    )
}

/// Inverse of [`scale_action`].
pub fn unscale_action(a: Action) -> RawAction {
    [
        a.linear / (0.5 * MAX_LINEAR) - 1.0,
        a.vertical / MAX_VERTICAL,
        a.delta_yaw / MAX_DELTA_YAW,
    ]
}

pub fn random_action<R: Rng + ?Sized>(rng: &mut R) -> RawAction {
    std::array::from_fn(|_| rng.random_range(-1.0..=1.0))
}

/// Network input for an observation: ranges over the LIDAR span, the previous
/// command in raw units, distance over 10 m and angles over their half range.
pub fn encode(obs: &Observation) -> [f64; OBS_DIM] {
    let mut out = [0.0; OBS_DIM];
    for (o, r) in out.iter_mut().zip(&obs.ranges) {
        *o = r / LIDAR_MAX_RANGE;
    }
    out[NUM_RANGES..NUM_RANGES + ACTION_DIM].copy_from_slice(&unscale_action(obs.prev_action));
    out[NUM_RANGES + 3] = obs.target_distance / 10.0;
    out[NUM_RANGES + 4] = obs.target_bearing / PI;
    out[NUM_RANGES + 5] = obs.target_elevation / FRAC_PI_2;
    out
}
