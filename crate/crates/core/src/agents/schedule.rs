/// Delayed-update period `floor(1 / (0.5 - t / (3 * max_steps)))`.
///
/// Evaluated exactly in integers as `floor(6 M / (3 M - 2 t))`, which is
/// 2 at `t = 0` and rises to 6 at `t = max_steps`.
pub fn policy_freq(t: u32, max_steps: u32) -> u32 {
    assert!(max_steps > 0, "max_steps must be positive");
    let t = u64::from(t.min(max_steps));
    let m = u64::from(max_steps);
    ((6 * m) / (3 * m - 2 * t)) as u32
}
