//! d-dimensional primitives in the rescaled configuration space `[0,1]^d`.

mod obstacle;
mod volume;

pub(crate) use obstacle::tube_distance;
pub use obstacle::{point_in_free_space, segment_collides, Environment, Obstacle, TORUS_SUBSAMPLES};
pub use volume::{inflated_cube_side, stirling_ball_volume, unit_ball_volume, BallVolume};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// A configuration: a finite list of `d >= 1` finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::domain("a point needs at least one coordinate"));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::domain(format!("non-finite coordinate {c}")));
        }
        Ok(Point(coords))
    }

    /// Crate-internal constructor for coordinates known to be valid.
    pub(crate) fn from_vec(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty() && coords.iter().all(|c| c.is_finite()));
        Point(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point::from_vec(vec![0.0; dim])
    }

    /// The point with every coordinate equal to `value`.
    pub fn splat(dim: usize, value: f64) -> Self {
        Point::from_vec(vec![value; dim])
    }

    /// Standard basis direction `e_axis` (zero based) scaled by `scale`.
    pub fn axis(dim: usize, axis: usize, scale: f64) -> Self {
        let mut v = vec![0.0; dim];
        v[axis] = scale;
        Point::from_vec(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn add(&self, other: &Point) -> Point {
        Point::from_vec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point::from_vec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: f64) -> Point {
        Point::from_vec(self.0.iter().map(|a| a * s).collect())
    }

    pub fn in_unit_cube(&self, tol: f64) -> bool {
        self.0.iter().all(|&c| c >= -tol && c <= 1.0 + tol)
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L2,
    Linf,
}

impl Norm {
    pub fn of(self, v: &[f64]) -> f64 {
        match self {
            Norm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }
}

/// Distance between two points under `norm`.
pub fn distance(a: &Point, b: &Point, norm: Norm) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    Ok(match norm {
        Norm::L2 => dist(a.coords(), b.coords()),
        Norm::Linf => a
            .coords()
            .iter()
            .zip(b.coords())
            .fold(0.0, |m, (x, y)| m.max((x - y).abs())),
    })
}

#[inline]
pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

/// Closed ball `B_norm(center, radius)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
    pub norm: Norm,
}

impl Ball {
    pub fn new(center: Point, radius: f64, norm: Norm) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(Error::domain(format!("ball radius must be nonnegative, got {radius}")));
        }
        Ok(Ball { center, radius, norm })
    }

    pub fn contains(&self, y: &Point) -> Result<bool> {
        Ok(distance(y, &self.center, self.norm)? <= self.radius)
    }
}

/// Straight segment `co({a, b})`, parameterised as `beta*a + (1-beta)*b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self> {
        check_dim(a.dim(), b.dim())?;
        Ok(Segment { a, b })
    }

    pub fn at(&self, beta: f64) -> Point {
        Point::from_vec(
            self.a
                .coords()
                .iter()
                .zip(self.b.coords())
                .map(|(x, y)| beta * x + (1.0 - beta) * y)
                .collect(),
        )
    }

    pub fn length(&self) -> f64 {
        dist(self.a.coords(), self.b.coords())
    }
}
