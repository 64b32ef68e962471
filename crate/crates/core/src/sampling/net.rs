use rayon::prelude::*;
use serde_json::Value;

use super::{params, SampleSet};
use crate::error::{check_dim, Error, Result};
use crate::geometry::Point;
use crate::rng::uniform_box;
use crate::spatial::CellGrid;

const BATCH: usize = 4096;

/// What Build-Net runs over.
#[derive(Debug, Clone)]
pub enum NetInput {
    /// An explicit finite point set, processed in the given order.
    Points(Vec<Point>),
    /// An axis box discretized by `dense_n` seeded uniform points.
    Region { lo: Vec<f64>, hi: Vec<f64>, dense_n: usize },
}

/// Greedy Build-Net: scan the input in order and keep every point farther
/// than `eps` from all points kept so far.
///
/// The result covers every input point within `eps` and its members are
/// pairwise more than `eps` apart.
pub fn build_net(input: &NetInput, eps: f64, seed: u64) -> Result<SampleSet> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::domain(format!("net radius must be positive, got {eps}")));
    }
    match input {
        NetInput::Points(pts) => {
            // An empty input has no dimension of its own; report it as d = 1.
            let Some(first) = pts.first() else {
                return SampleSet::new(1, Vec::new(), "build_net", params(&[("eps", eps.into())]), seed);
            };
            let d = first.dim();
            for p in pts {
                check_dim(d, p.dim())?;
            }
            let flat: Vec<f64> = pts.iter().flat_map(|p| p.coords().iter().copied()).collect();
            let (lo, hi) = bounding_box(d, &flat);
            let idx = greedy_net(d, &flat, &lo, &hi, eps);
            let points = idx.into_iter().map(|i| pts[i].clone()).collect();
            SampleSet::new(d, points, "build_net", params(&[("eps", eps.into())]), seed)
        }
        NetInput::Region { lo, hi, dense_n } => {
            check_dim(lo.len(), hi.len())?;
            if lo.is_empty() {
                return Err(Error::domain("region needs d >= 1"));
            }
            if lo.iter().zip(hi).any(|(l, h)| !(l <= h) || !l.is_finite() || !h.is_finite()) {
                return Err(Error::domain("region needs finite lo <= hi"));
            }
            let d = lo.len();
            let flat = uniform_box(lo, hi, *dense_n, seed);
            let idx = greedy_net(d, &flat, lo, hi, eps);
            let points = idx.iter().map(|&i| Point::from_vec(flat[i * d..(i + 1) * d].to_vec())).collect();
            let meta = params(&[
                ("eps", eps.into()),
                ("lo", Value::from(lo.clone())),
                ("hi", Value::from(hi.clone())),
                ("dense_n", (*dense_n).into()),
            ]);
            SampleSet::new(d, points, "build_net", meta, seed)
        }
    }
}

fn bounding_box(d: usize, flat: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in flat.chunks_exact(d) {
        for a in 0..d {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    (lo, hi)
}

/// Indices of the greedy `eps`-net of the row-major points `flat`, in
/// selection order. Points inside `[lo, hi]` get the best pruning; points
/// outside are still handled exactly.
///
/// Batches are screened in parallel against the net as it stood before the
/// batch; survivors are then re-checked sequentially, so the selection is the
/// same as a plain sequential scan.
pub fn greedy_net(d: usize, flat: &[f64], lo: &[f64], hi: &[f64], eps: f64) -> Vec<usize> {
    let mut net = CellGrid::new(lo, hi, eps, false);
    let mut chosen = Vec::new();
    let n = flat.len() / d.max(1);
    let mut start = 0;
    while start < n {
        let end = (start + BATCH).min(n);
        let candidates: Vec<usize> = if net.is_empty() {
            (start..end).collect()
        } else {
            (start..end)
                .into_par_iter()
                .filter(|&i| net.any_within(&flat[i * d..(i + 1) * d], eps).is_none())
                .collect()
        };
        for i in candidates {
            let p = &flat[i * d..(i + 1) * d];
            if net.any_within(p, eps).is_none() {
                net.insert(p);
                chosen.push(i);
            }
        }
        start = end;
    }
    chosen
}
