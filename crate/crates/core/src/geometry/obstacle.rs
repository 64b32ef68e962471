use serde::{Deserialize, Serialize};

use super::{dist, dist2, Point, Segment};
use crate::error::{check_dim, Error, Result};

/// Uniform subsamples used to bracket torus crossings along a segment.
pub const TORUS_SUBSAMPLES: usize = 256;

/// Obstacle shapes. Torus and ring live in the plane of the first two axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Obstacle {
    /// A single configuration.
    Point { center: Point },
    /// The sphere `||x - center|| = radius`.
    Shell { center: Point, radius: f64 },
    /// The closed ball `||x - center|| <= radius`.
    Ball { center: Point, radius: f64 },
    /// Boundary of the ring: points whose distance to the circle of radius
    /// `major` around `center` equals `minor`.
    Torus { center: Point, major: f64, minor: f64 },
    /// Solid tube of radius `minor` around the circle of radius `major`.
    Ring { center: Point, major: f64, minor: f64 },
    #[serde(rename = "box")]
    AxisBox { lo: Point, hi: Point },
}

impl Obstacle {
    pub fn dim(&self) -> usize {
        match self {
            Obstacle::Point { center }
            | Obstacle::Shell { center, .. }
            | Obstacle::Ball { center, .. }
            | Obstacle::Torus { center, .. }
            | Obstacle::Ring { center, .. } => center.dim(),
            Obstacle::AxisBox { lo, .. } => lo.dim(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Obstacle::Point { .. } => Ok(()),
            Obstacle::Shell { radius, .. } | Obstacle::Ball { radius, .. } => {
                if *radius >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::domain(format!("obstacle radius must be nonnegative, got {radius}")))
                }
            }
            Obstacle::Torus { center, major, minor } | Obstacle::Ring { center, major, minor } => {
                if center.dim() < 2 {
                    return Err(Error::domain("torus and ring obstacles need d >= 2"));
                }
                if !(*major >= 0.0 && *minor >= 0.0) {
                    return Err(Error::domain("torus radii must be nonnegative"));
                }
                Ok(())
            }
            Obstacle::AxisBox { lo, hi } => {
                check_dim(lo.dim(), hi.dim())?;
                if lo.coords().iter().zip(hi.coords()).any(|(l, h)| l > h) {
                    return Err(Error::domain("box needs lo <= hi on every axis"));
                }
                Ok(())
            }
        }
    }

    /// Euclidean distance from `q` to the obstacle's point set.
    pub fn distance(&self, q: &[f64]) -> f64 {
        match self {
            Obstacle::Point { center } => dist(q, center.coords()),
            Obstacle::Shell { center, radius } => (dist(q, center.coords()) - radius).abs(),
            Obstacle::Ball { center, radius } => (dist(q, center.coords()) - radius).max(0.0),
            Obstacle::Torus { center, major, minor } => (tube_distance(center.coords(), *major, q) - minor).abs(),
            Obstacle::Ring { center, major, minor } => {
                (tube_distance(center.coords(), *major, q) - minor).max(0.0)
            }
            Obstacle::AxisBox { lo, hi } => q
                .iter()
                .zip(lo.coords().iter().zip(hi.coords()))
                .map(|(&x, (&l, &h))| {
                    let g = (l - x).max(x - h).max(0.0);
                    g * g
                })
                .sum::<f64>()
                .sqrt(),
        }
    }

    pub fn contains(&self, q: &[f64], tol: f64) -> bool {
        self.distance(q) <= tol
    }

    /// Whether the segment from `a` to `b` comes within `tol` of the obstacle.
    pub fn hits_segment(&self, a: &[f64], b: &[f64], tol: f64) -> bool {
        // Canonical endpoint order keeps the predicate exactly symmetric.
        let (a, b) = if a.partial_cmp(b) == Some(std::cmp::Ordering::Greater) { (b, a) } else { (a, b) };
        match self {
            Obstacle::Point { center } => {
                let (_, m) = closest_on_segment(a, b, center.coords());
                m <= tol
            }
            Obstacle::Ball { center, radius } => {
                let (_, m) = closest_on_segment(a, b, center.coords());
                m <= radius + tol
            }
            Obstacle::Shell { center, radius } => {
                // Distance to the center is convex along the segment: its range
                // is [closest approach, farther endpoint].
                let (_, m) = closest_on_segment(a, b, center.coords());
                let far = dist(a, center.coords()).max(dist(b, center.coords()));
                m <= radius + tol && far >= radius - tol
            }
            Obstacle::AxisBox { lo, hi } => segment_hits_box(a, b, lo.coords(), hi.coords(), tol),
            Obstacle::Torus { center, major, minor } => {
                let f = |t: f64| tube_distance(center.coords(), *major, &lerp(a, b, t)) - minor;
                torus_crossing(f, tol).is_some()
            }
            Obstacle::Ring { center, major, minor } => {
                let f = |t: f64| tube_distance(center.coords(), *major, &lerp(a, b, t)) - minor;
                ring_touch(f, tol)
            }
        }
    }
}

/// Distance from `q` to the circle of radius `major` around `center` in the
/// plane of the first two axes.
pub(crate) fn tube_distance(center: &[f64], major: f64, q: &[f64]) -> f64 {
    let u1 = q[0] - center[0];
    let u2 = q[1] - center[1];
    let radial = u1.hypot(u2) - major;
    let off: f64 = q[2..].iter().zip(&center[2..]).map(|(x, c)| (x - c) * (x - c)).sum();
    (radial * radial + off).sqrt()
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Parameter `t` of the point of `a + t(b-a)` closest to `c`, and its distance.
fn closest_on_segment(a: &[f64], b: &[f64], c: &[f64]) -> (f64, f64) {
    let len2 = dist2(a, b);
    let t = if len2 == 0.0 {
        0.0
    } else {
        let dot: f64 = a.iter().zip(b).zip(c).map(|((x, y), z)| (y - x) * (z - x)).sum();
        (dot / len2).clamp(0.0, 1.0)
    };
    (t, dist(&lerp(a, b, t), c))
}

fn segment_hits_box(a: &[f64], b: &[f64], lo: &[f64], hi: &[f64], tol: f64) -> bool {
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for i in 0..a.len() {
        let (l, h) = (lo[i] - tol, hi[i] + tol);
        let dir = b[i] - a[i];
        if dir == 0.0 {
            if a[i] < l || a[i] > h {
                return false;
            }
            continue;
        }
        let (mut ta, mut tb) = ((l - a[i]) / dir, (h - a[i]) / dir);
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
        }
        t0 = t0.max(ta);
        t1 = t1.min(tb);
        if t0 > t1 {
            return false;
        }
    }
    true
}

fn samples<F: Fn(f64) -> f64>(f: &F) -> Vec<f64> {
    (0..=TORUS_SUBSAMPLES)
        .map(|i| f(i as f64 / TORUS_SUBSAMPLES as f64))
        .collect()
}

/// Golden-section minimisation of `g` on `[lo, hi]`.
fn golden_min<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut g1, mut g2) = (g(x1), g(x2));
    for _ in 0..80 {
        if g1 <= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - INV_PHI * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + INV_PHI * (hi - lo);
            g2 = g(x2);
        }
    }
    let t = 0.5 * (lo + hi);
    (t, g(t))
}

fn bracket(i: usize) -> (f64, f64) {
    let n = TORUS_SUBSAMPLES as f64;
    ((i.saturating_sub(1)) as f64 / n, ((i + 1).min(TORUS_SUBSAMPLES)) as f64 / n)
}

/// Parameter where the surface `f = 0` is met. A sign change between
/// neighbouring subsamples is bisected to `tol`; local minima of `|f|` that
/// do not change sign (tangential contact) are refined by golden section.
pub(crate) fn torus_crossing<F: Fn(f64) -> f64>(f: F, tol: f64) -> Option<f64> {
    let vals = samples(&f);
    let n = TORUS_SUBSAMPLES as f64;
    for (i, v) in vals.iter().enumerate() {
        if v.abs() <= tol {
            return Some(i as f64 / n);
        }
    }
    for i in 0..TORUS_SUBSAMPLES {
        if vals[i].signum() != vals[i + 1].signum() {
            let (mut lo, mut hi) = (i as f64 / n, (i + 1) as f64 / n);
            let neg_lo = vals[i] < 0.0;
            while hi - lo > tol.max(1e-15) {
                let mid = 0.5 * (lo + hi);
                if (f(mid) < 0.0) == neg_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
    }
    for i in 0..=TORUS_SUBSAMPLES {
        let here = vals[i].abs();
        let left = if i > 0 { vals[i - 1].abs() } else { f64::INFINITY };
        let right = if i < TORUS_SUBSAMPLES { vals[i + 1].abs() } else { f64::INFINITY };
        if here <= left && here <= right {
            let (lo, hi) = bracket(i);
            let (t, g) = golden_min(|t| f(t).abs(), lo, hi);
            if g <= tol {
                return Some(t);
            }
        }
    }
    None
}

/// Whether `f <= tol` somewhere on `[0, 1]` (solid ring membership along a segment).
pub(crate) fn ring_touch<F: Fn(f64) -> f64>(f: F, tol: f64) -> bool {
    let vals = samples(&f);
    if vals.iter().any(|&v| v <= tol) {
        return true;
    }
    (0..=TORUS_SUBSAMPLES).any(|i| {
        let left = if i > 0 { vals[i - 1] } else { f64::INFINITY };
        let right = if i < TORUS_SUBSAMPLES { vals[i + 1] } else { f64::INFINITY };
        if vals[i] <= left && vals[i] <= right {
            let (lo, hi) = bracket(i);
            golden_min(&f, lo, hi).1 <= tol
        } else {
            false
        }
    })
}

/// Free space `[0,1]^d` minus the union of obstacles, with start and goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub dim: usize,
    pub start: Point,
    pub goal: Point,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
}

impl Environment {
    pub fn new(start: Point, goal: Point, obstacles: Vec<Obstacle>) -> Result<Self> {
        let env = Environment {
            dim: start.dim(),
            start,
            goal,
            obstacles,
        };
        env.validate()?;
        Ok(env)
    }

    pub fn empty(start: Point, goal: Point) -> Result<Self> {
        Environment::new(start, goal, Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim, self.start.dim())?;
        check_dim(self.dim, self.goal.dim())?;
        for o in &self.obstacles {
            check_dim(self.dim, o.dim())?;
            o.validate()?;
        }
        Ok(())
    }

    /// Distance from `q` to the nearest obstacle or to the cube boundary.
    pub fn clearance(&self, q: &[f64]) -> f64 {
        let wall = q.iter().fold(f64::INFINITY, |m, &x| m.min(x).min(1.0 - x));
        self.obstacles.iter().fold(wall, |m, o| m.min(o.distance(q)))
    }
}

/// `q` lies in the unit cube and farther than `tol` from every obstacle.
pub fn point_in_free_space(env: &Environment, q: &Point, tol: f64) -> bool {
    q.dim() == env.dim && q.in_unit_cube(tol) && env.obstacles.iter().all(|o| !o.contains(q.coords(), tol))
}

/// Whether the segment meets any obstacle of `env` (within `tol`).
pub fn segment_collides(env: &Environment, seg: &Segment, tol: f64) -> bool {
    env.obstacles
        .iter()
        .any(|o| o.hits_segment(seg.a.coords(), seg.b.coords(), tol))
}
