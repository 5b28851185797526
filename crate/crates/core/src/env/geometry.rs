//! Tank geometry: obstacle primitives, analytic ray intersection, clearance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 3];

const INSIDE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// A solid obstacle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Obstacle {
    /// Axis-aligned box given by its center and edge lengths.
    Box { center: Point, size: Point },
    /// Cylinder of finite length whose axis is parallel to `axis`.
    Cylinder {
        axis: Axis,
        center: Point,
        radius: f64,
        length: f64,
    },
}

impl Obstacle {
    /// Vertical cylinder spanning `z_min..z_max`.
    pub fn column(x: f64, y: f64, radius: f64, z_min: f64, z_max: f64) -> Self {
        Obstacle::Cylinder {
            axis: Axis::Z,
            center: [x, y, 0.5 * (z_min + z_max)],
            radius,
            length: z_max - z_min,
        }
    }

    pub fn boxed(min: Point, max: Point) -> Self {
        Obstacle::Box {
            center: [0.5 * (min[0] + max[0]), 0.5 * (min[1] + max[1]), 0.5 * (min[2] + max[2])],
            size: [max[0] - min[0], max[1] - min[1], max[2] - min[2]],
        }
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounds(&self) -> (Point, Point) {
        match *self {
            Obstacle::Box { center, size } => (
                [center[0] - size[0] / 2.0, center[1] - size[1] / 2.0, center[2] - size[2] / 2.0],
                [center[0] + size[0] / 2.0, center[1] + size[1] / 2.0, center[2] + size[2] / 2.0],
            ),
            Obstacle::Cylinder {
                axis,
                center,
                radius,
                length,
            } => {
                let mut lo = [center[0] - radius, center[1] - radius, center[2] - radius];
                let mut hi = [center[0] + radius, center[1] + radius, center[2] + radius];
                let a = axis.index();
                lo[a] = center[a] - length / 2.0;
                hi[a] = center[a] + length / 2.0;
                (lo, hi)
            }
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Obstacle::Box { .. } => {
                let (lo, hi) = self.bounds();
                (0..3).all(|i| p[i] >= lo[i] - INSIDE_TOL && p[i] <= hi[i] + INSIDE_TOL)
            }
            Obstacle::Cylinder {
                axis,
                center,
                radius,
                length,
            } => {
                let (a, u, v) = axis_frame(axis);
                let du = p[u] - center[u];
                let dv = p[v] - center[v];
                du * du + dv * dv <= radius * radius + INSIDE_TOL
                    && (p[a] - center[a]).abs() <= length / 2.0 + INSIDE_TOL
            }
        }
    }

    /// Euclidean distance from `p` to the solid (zero inside).
    pub fn distance(&self, p: Point) -> f64 {
        match *self {
            Obstacle::Box { .. } => {
                let (lo, hi) = self.bounds();
                let d: f64 = (0..3)
                    .map(|i| {
                        let e = (lo[i] - p[i]).max(p[i] - hi[i]).max(0.0);
                        e * e
                    })
                    .sum();
                d.sqrt()
            }
            Obstacle::Cylinder {
                axis,
                center,
                radius,
                length,
            } => {
                let (a, u, v) = axis_frame(axis);
                let radial = ((p[u] - center[u]).powi(2) + (p[v] - center[v]).powi(2)).sqrt();
                let dr = (radial - radius).max(0.0);
                let da = ((p[a] - center[a]).abs() - length / 2.0).max(0.0);
                (dr * dr + da * da).sqrt()
            }
        }
    }

    /// Smallest `t >= 0` with `origin + t * dir` on the solid, if any.
    pub fn intersect(&self, origin: Point, dir: Point) -> Option<f64> {
        if self.contains(origin) {
            return Some(0.0);
        }
        match *self {
            Obstacle::Box { .. } => {
                let (lo, hi) = self.bounds();
                ray_box_entry(origin, dir, lo, hi)
            }
            Obstacle::Cylinder {
                axis,
                center,
                radius,
                length,
            } => ray_cylinder_entry(origin, dir, axis, center, radius, length),
        }
    }
}

fn axis_frame(axis: Axis) -> (usize, usize, usize) {
    match axis {
        Axis::X => (0, 1, 2),
        Axis::Y => (1, 0, 2),
        Axis::Z => (2, 0, 1),
    }
}

fn ray_box_entry(o: Point, d: Point, lo: Point, hi: Point) -> Option<f64> {
    let mut t_near = f64::NEG_INFINITY;
    let mut t_far = f64::INFINITY;
    for i in 0..3 {
        if d[i] == 0.0 {
            if o[i] < lo[i] || o[i] > hi[i] {
                return None;
            }
        } else {
            let t1 = (lo[i] - o[i]) / d[i];
            let t2 = (hi[i] - o[i]) / d[i];
            t_near = t_near.max(t1.min(t2));
            t_far = t_far.min(t1.max(t2));
        }
    }
    (t_near <= t_far && t_far >= 0.0).then_some(t_near.max(0.0))
}

fn ray_cylinder_entry(o: Point, d: Point, axis: Axis, c: Point, r: f64, len: f64) -> Option<f64> {
    let (a, u, v) = axis_frame(axis);
    let half = len / 2.0;
    let mut best: Option<f64> = None;
    let mut consider = |t: f64| {
        if t >= 0.0 && best.is_none_or(|b| t < b) {
            best = Some(t);
        }
    };

    // lateral surface
    let (ou, ov) = (o[u] - c[u], o[v] - c[v]);
    let qa = d[u] * d[u] + d[v] * d[v];
    if qa > 0.0 {
        let qb = 2.0 * (ou * d[u] + ov * d[v]);
        let qc = ou * ou + ov * ov - r * r;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
                if (o[a] + t * d[a] - c[a]).abs() <= half {
                    consider(t);
                }
            }
        }
    }
    // end caps
    if d[a] != 0.0 {
        for cap in [c[a] - half, c[a] + half] {
            let t = (cap - o[a]) / d[a];
            let pu = o[u] + t * d[u] - c[u];
            let pv = o[v] + t * d[v] - c[v];
            if pu * pu + pv * pv <= r * r {
                consider(t);
            }
        }
    }
    best
}

/// The walled tank. Water fills `floor..surface`; air fills `surface..ceiling`.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub name: String,
    pub half_x: f64,
    pub half_y: f64,
    pub floor: f64,
    pub surface: f64,
    pub ceiling: f64,
    pub obstacles: Vec<Obstacle>,
}

impl World {
    /// A 10 x 10 x 6 m tank with a 1 m water column and no obstacles.
    pub fn empty() -> Self {
        World {
            name: "empty".into(),
            half_x: 5.0,
            half_y: 5.0,
            floor: -1.0,
            surface: 0.0,
            ceiling: 5.0,
            obstacles: Vec::new(),
        }
    }

    pub fn bounds(&self) -> (Point, Point) {
        (
            [-self.half_x, -self.half_y, self.floor],
            [self.half_x, self.half_y, self.ceiling],
        )
    }

    pub fn inside_tank(&self, p: Point) -> bool {
        let (lo, hi) = self.bounds();
        (0..3).all(|i| p[i] >= lo[i] - INSIDE_TOL && p[i] <= hi[i] + INSIDE_TOL)
    }

    /// True when `p` is outside the tank or inside an obstacle.
    pub fn is_blocked(&self, p: Point) -> bool {
        !self.inside_tank(p) || self.obstacles.iter().any(|o| o.contains(p))
    }

    /// Distance along `dir` (unit) to the first wall or obstacle, clipped to `max_range`.
    pub fn raycast(&self, origin: Point, dir: Point, max_range: f64) -> Result<f64> {
        if !self.inside_tank(origin) {
            return Err(Error::OriginOutsideTank(origin));
        }
        let (lo, hi) = self.bounds();
        let mut best = f64::INFINITY;
        for i in 0..3 {
            if dir[i] > 0.0 {
                best = best.min((hi[i] - origin[i]) / dir[i]);
            } else if dir[i] < 0.0 {
                best = best.min((lo[i] - origin[i]) / dir[i]);
            }
        }
        for o in &self.obstacles {
            if let Some(t) = o.intersect(origin, dir) {
                best = best.min(t);
            }
        }
        Ok(best.max(0.0).min(max_range))
    }

    /// Horizontal distance to the side walls combined with the 3D distance to
    /// every obstacle; floor, ceiling and water surface do not count.
    pub fn clearance(&self, p: Point) -> f64 {
        let walls = (self.half_x - p[0].abs()).min(self.half_y - p[1].abs());
        self.obstacles
            .iter()
            .map(|o| o.distance(p))
            .fold(walls, f64::min)
    }
}
