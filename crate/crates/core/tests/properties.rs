use std::f64::consts::PI;

use hydronav::agents::{policy_freq, scale_action, unscale_action};
use hydronav::env::vehicle::wrap_angle;
use hydronav::env::{reward, scenario, Action, DoneReason};
use proptest::prelude::*;

fn unit(theta: f64, phi: f64) -> [f64; 3] {
    [phi.cos() * theta.cos(), phi.cos() * theta.sin(), phi.sin()]
}

proptest! {
    #[test]
    fn scaled_actions_stay_in_physical_bounds(r in prop::array::uniform3(-3.0f64..3.0)) {
        let a = scale_action(r);
        prop_assert!((0.0..=0.25).contains(&a.linear));
        prop_assert!((-0.25..=0.25).contains(&a.vertical));
        prop_assert!((-0.25..=0.25).contains(&a.delta_yaw));
        prop_assert_eq!(a, a.clamped());
    }

    #[test]
    fn unscale_inverts_scale(r in prop::array::uniform3(-1.0f64..=1.0)) {
        let back = unscale_action(scale_action(r));
        for (x, y) in back.iter().zip(r) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn clamped_action_is_idempotent(l in -1.0f64..1.0, v in -1.0f64..1.0, y in -1.0f64..1.0) {
        let a = Action::new(l, v, y).clamped();
        prop_assert_eq!(a, a.clamped());
    }

    #[test]
    fn wrapped_angle_lies_in_half_open_interval(a in -100.0f64..100.0) {
        let w = wrap_angle(a);
        prop_assert!(w > -PI && w <= PI);
        let turns = (a - w) / (2.0 * PI);
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn raycast_never_exceeds_its_cap(
        id in 0u8..=2,
        x in -4.9f64..4.9, y in -4.9f64..4.9, z in -0.95f64..4.95,
        theta in -PI..PI, phi in -1.5f64..1.5, cap in 0.1f64..25.0,
    ) {
        let w = scenario::builtin(id).unwrap();
        prop_assume!(!w.is_blocked([x, y, z]));
        let d = w.raycast([x, y, z], unit(theta, phi), cap).unwrap();
        prop_assert!((0.0..=cap).contains(&d));
    }

    #[test]
    fn policy_freq_is_monotone(max_steps in 1u32..2000, a in 0u32..2000, b in 0u32..2000) {
        let (lo, hi) = (a.min(b).min(max_steps), a.max(b).min(max_steps));
        let (f_lo, f_hi) = (policy_freq(lo, max_steps), policy_freq(hi, max_steps));
        prop_assert!(f_lo <= f_hi);
        prop_assert!((2..=6).contains(&f_lo) && (2..=6).contains(&f_hi));
    }

    #[test]
    fn reward_outcomes_are_consistent(d in 0.0f64..10.0, m in 0.0f64..10.0, step in 1u32..=500) {
        let (r, why) = reward(d, m, step);
        match why {
            DoneReason::ReachedGoal => prop_assert!(r == 100.0 && d < 0.5),
            DoneReason::Collision => prop_assert!(r == -10.0 && m < 0.5 && d >= 0.5),
            DoneReason::StepLimit => prop_assert!(r == -10.0 && step == 500 && m >= 0.5 && d >= 0.5),
            DoneReason::Running => prop_assert!(r == 0.0 && d >= 0.5 && m >= 0.5 && step < 500),
        }
    }
}
