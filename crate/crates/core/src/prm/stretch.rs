use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{dist, Point};
use crate::sampling::SampleSet;
use crate::spatial::CellGrid;

/// Outcome of snapping a path's waypoints to a net.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StretchReport {
    /// Chord length between consecutive waypoints, `2 sqrt(1 - α²) δ_min`.
    pub gap: f64,
    pub waypoints: Vec<Point>,
    pub snapped: Vec<Point>,
    pub max_segment_length: f64,
    /// `2 (α + sqrt(1 - α²)) δ_min`.
    pub segment_bound: f64,
    /// `Σ ||z_j - z_{j+1}|| / Σ ||p_j - p_{j+1}||`.
    pub stretch: f64,
    /// `α / sqrt(1 - α²)`.
    pub eps: f64,
    /// Largest `||z_j - z_{j+1}|| / ||p_j - p_{j+1}||` over segments whose
    /// waypoints are a full gap apart.
    pub max_full_gap_ratio: f64,
    /// Same ratio for the closing segment, when it is shorter than a gap.
    pub remainder_ratio: Option<f64>,
}

/// Places waypoints along the polyline `path` at chord spacing
/// `2 sqrt(1 - α²) δ_min`, snaps the interior ones to their nearest sample
/// (start and goal stay put) and measures the snapped polyline against the
/// waypoint polyline.
///
/// Fails with [`Error::NotANet`] when a waypoint is farther than `α δ_min`
/// from every sample.
pub fn waypoint_stretch_oracle(path: &[Point], delta_min: f64, alpha: f64, samples: &SampleSet) -> Result<StretchReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !(delta_min > 0.0) {
        return Err(Error::domain("delta_min must be positive"));
    }
    let Some(first) = path.first() else {
        return Err(Error::domain("path needs at least one point"));
    };
    let d = first.dim();
    for p in path {
        check_dim(d, p.dim())?;
    }
    let beta = (1.0 - alpha * alpha).sqrt();
    let gap = 2.0 * beta * delta_min;
    let net_radius = alpha * delta_min;

    let (waypoints, ends_short) = place_waypoints(path, gap);
    let m = waypoints.len();

    let index = CellGrid::from_points(&vec![0.0; d], &vec![1.0; d], net_radius.max(1e-3), false, &samples.flat());
    let mut snapped = Vec::with_capacity(m);
    for (j, w) in waypoints.iter().enumerate() {
        if j == 0 || j + 1 == m {
            snapped.push(w.clone());
            continue;
        }
        let (i, dz) = index.nearest(w.coords()).ok_or(Error::NotANet {
            index: j,
            distance: f64::INFINITY,
            radius: net_radius,
        })?;
        if dz > net_radius + 1e-12 {
            return Err(Error::NotANet { index: j, distance: dz, radius: net_radius });
        }
        snapped.push(samples.points[i as usize].clone());
    }

    let mut z_total = 0.0;
    let mut p_total = 0.0;
    let mut max_seg: f64 = 0.0;
    let mut max_ratio: f64 = 0.0;
    let mut remainder_ratio = None;
    for j in 0..m.saturating_sub(1) {
        let zl = dist(snapped[j].coords(), snapped[j + 1].coords());
        let pl = dist(waypoints[j].coords(), waypoints[j + 1].coords());
        z_total += zl;
        p_total += pl;
        max_seg = max_seg.max(zl);
        let ratio = if pl > 0.0 { zl / pl } else { 1.0 };
        if ends_short && j + 2 == m {
            remainder_ratio = Some(ratio);
        } else {
            max_ratio = max_ratio.max(ratio);
        }
    }
    Ok(StretchReport {
        gap,
        waypoints,
        snapped,
        max_segment_length: max_seg,
        segment_bound: 2.0 * (alpha + beta) * delta_min,
        stretch: if p_total > 0.0 { z_total / p_total } else { 1.0 },
        eps: alpha / beta,
        max_full_gap_ratio: max_ratio,
        remainder_ratio,
    })
}

/// Waypoints at chord distance exactly `gap`, each the first point along the
/// path at that distance from its predecessor, closed by the path's end.
/// Also reports whether the closing segment is shorter than a gap.
fn place_waypoints(path: &[Point], gap: f64) -> (Vec<Point>, bool) {
    let mut out = vec![path[0].clone()];
    let mut cur = path[0].coords().to_vec();
    let mut seg = 0;
    let mut u = 0.0;
    while seg + 1 < path.len() {
        let a = path[seg].coords();
        let b = path[seg + 1].coords();
        let v: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
        let w: Vec<f64> = a.iter().zip(&cur).map(|(x, y)| x - y).collect();
        // ||w + s v||² = gap²
        let qa: f64 = v.iter().map(|x| x * x).sum();
        let qb: f64 = 2.0 * v.iter().zip(&w).map(|(x, y)| x * y).sum::<f64>();
        let qc: f64 = w.iter().map(|x| x * x).sum::<f64>() - gap * gap;
        let root = if qa == 0.0 {
            None
        } else {
            let disc = qb * qb - 4.0 * qa * qc;
            (disc >= 0.0).then(|| (-qb + disc.sqrt()) / (2.0 * qa)).filter(|&s| s >= u && s <= 1.0)
        };
        match root {
            Some(s) => {
                cur = a.iter().zip(&v).map(|(x, y)| x + s * y).collect();
                out.push(Point::from_vec(cur.clone()));
                u = s;
            }
            None => {
                seg += 1;
                u = 0.0;
            }
        }
    }
    let end = path.last().unwrap();
    let last = out.last().unwrap();
    let rest = dist(last.coords(), end.coords());
    if rest > 1e-12 * gap.max(1.0) || out.len() == 1 {
        out.push(end.clone());
        (out, rest < gap)
    } else {
        // the last gap landed on the endpoint itself
        let n = out.len();
        out[n - 1] = end.clone();
        (out, false)
    }
}
