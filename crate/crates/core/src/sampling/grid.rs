use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{params, SampleSet};
use crate::error::{check_dim, Error, Result};
use crate::geometry::Point;

/// Refuse to materialize grids larger than this.
const MAX_GRID_POINTS: usize = 50_000_000;

/// Cell-centre lattice with spacing `w` over the box `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub w: f64,
    pub dim: usize,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl GridSpec {
    pub fn unit_cube(dim: usize, w: f64) -> Self {
        GridSpec { w, dim, lo: vec![0.0; dim], hi: vec![1.0; dim] }
    }

    /// Grid over the sub-cube `[margin, 1 - margin]^dim`.
    pub fn inner_cube(dim: usize, w: f64, margin: f64) -> Self {
        GridSpec { w, dim, lo: vec![margin; dim], hi: vec![1.0 - margin; dim] }
    }

    fn is_unit_cube(&self) -> bool {
        self.lo.iter().all(|&l| l == 0.0) && self.hi.iter().all(|&h| h == 1.0)
    }

    /// Points per axis.
    pub fn per_axis(&self) -> Result<Vec<usize>> {
        if self.dim == 0 {
            return Err(Error::domain("grid needs d >= 1"));
        }
        check_dim(self.dim, self.lo.len())?;
        check_dim(self.dim, self.hi.len())?;
        if !(self.w > 0.0 && self.w.is_finite()) {
            return Err(Error::domain(format!("grid spacing must be positive, got {}", self.w)));
        }
        if self.is_unit_cube() {
            let inv = 1.0 / self.w;
            let m = inv.round();
            if m < 1.0 || (inv - m).abs() > 1e-9 * inv.max(1.0) {
                return Err(Error::domain(format!("1/w must be a positive integer on the unit cube, got 1/w = {inv}")));
            }
            return Ok(vec![m as usize; self.dim]);
        }
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| {
                if !(l <= h) || l < 0.0 || h > 1.0 {
                    return Err(Error::domain(format!("grid box axis [{l}, {h}] must lie inside [0, 1]")));
                }
                Ok(((h - l) / self.w - 1e-9).ceil().max(1.0) as usize)
            })
            .collect()
    }
}

/// Sukharev grid: on the unit cube the points with `x_i / w + 1/2` in
/// `{1, ..., 1/w}`; on a sub-box the centred lattice of `ceil(len / w)`
/// points per axis with spacing `w`.
pub fn grid(spec: &GridSpec) -> Result<SampleSet> {
    let m = spec.per_axis()?;
    let total = m
        .iter()
        .try_fold(1usize, |acc, &c| acc.checked_mul(c))
        .filter(|&t| t <= MAX_GRID_POINTS)
        .ok_or_else(|| Error::domain("grid has too many points"))?;
    let axes: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(a, &ma)| {
            let mid = 0.5 * (spec.lo[a] + spec.hi[a]);
            (0..ma).map(|i| mid + (i as f64 - (ma as f64 - 1.0) / 2.0) * spec.w).collect()
        })
        .collect();
    let mut points = Vec::with_capacity(total);
    let mut idx = vec![0usize; spec.dim];
    for _ in 0..total {
        points.push(Point::from_vec(idx.iter().enumerate().map(|(a, &i)| axes[a][i]).collect()));
        for a in (0..spec.dim).rev() {
            idx[a] += 1;
            if idx[a] < m[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    let meta = params(&[
        ("w", spec.w.into()),
        ("lo", Value::from(spec.lo.clone())),
        ("hi", Value::from(spec.hi.clone())),
    ]);
    SampleSet::new(spec.dim, points, "grid", meta, 0)
}
