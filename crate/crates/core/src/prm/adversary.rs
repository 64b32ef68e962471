use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{tube_distance, Environment, Obstacle, Point};
use crate::rng::{substream, uniform_box};
use crate::sampling::SampleSet;
use crate::spatial::CellGrid;

/// Objective evaluations allowed to the witness search by default.
pub const DEFAULT_SEARCH_BUDGET: usize = 20_000;

const REFINE_STARTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Point obstacle at the witness inside a sphere of radius `2δ`.
    Shell,
    /// Torus of radii `(δ, δ)` around the witness.
    Ring,
}

/// A delta-clear planning problem whose roadmap over the given samples is
/// disconnected for every connection radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarialInstance {
    pub variant: Variant,
    pub env: Environment,
    pub witness: Point,
    pub delta: f64,
    /// Length of the recorded delta-clear solution, a half circle of
    /// radius `δ`.
    pub opt_delta: f64,
    /// How far the witness clears the exclusion threshold.
    pub margin: f64,
}

impl AdversarialInstance {
    /// Point `t ∈ [0, 1]` of the recorded solution, from start to goal.
    pub fn solution_point(&self, t: f64) -> Point {
        let mut c = self.witness.coords().to_vec();
        let (cos, sin) = ((PI * t).cos(), (PI * t).sin());
        match self.variant {
            Variant::Shell => {
                c[0] -= self.delta * cos;
                c[1] += self.delta * sin;
            }
            Variant::Ring => {
                c[0] += self.delta * cos;
                c[1] += self.delta * sin;
            }
        }
        Point::from_vec(c)
    }

    pub fn solution_path(&self, points: usize) -> Vec<Point> {
        let k = points.max(2);
        (0..k).map(|i| self.solution_point(i as f64 / (k - 1) as f64)).collect()
    }

    /// Smallest clearance (obstacles and cube walls) over `points` evenly
    /// spaced solution points.
    pub fn solution_clearance(&self, points: usize) -> f64 {
        self.solution_path(points)
            .iter()
            .map(|p| self.env.clearance(p.coords()))
            .fold(f64::INFINITY, f64::min)
    }

    /// Polyline length of the sampled solution; tends to `opt_delta`.
    pub fn solution_length(&self, points: usize) -> f64 {
        self.solution_path(points)
            .windows(2)
            .map(|w| crate::geometry::dist(w[0].coords(), w[1].coords()))
            .sum()
    }
}

fn check(samples: &SampleSet, delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(Error::domain(format!("delta must lie in (0, 1/4), got {delta}")));
    }
    let d = samples.dim;
    if d < 2 {
        return Err(Error::domain("adversarial instances need d >= 2"));
    }
    Ok(d)
}

/// Maximizes `objective` over the box by seeded probing, then hill-climbs
/// from the best probes. Returns the first point whose value exceeds
/// `threshold`, with its value.
fn search<F>(lo: &[f64], hi: &[f64], objective: F, threshold: f64, budget: usize, seed: u64) -> Option<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let d = lo.len();
    let probes = (budget / 2).max(1);
    let flat = uniform_box(lo, hi, probes, seed);
    let mut scored: Vec<(usize, f64)> = flat.par_chunks_exact(d).map(|p| objective(p)).enumerate().collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let (best, value) = scored[0];
    if value > threshold {
        return Some((flat[best * d..(best + 1) * d].to_vec(), value));
    }

    let mut left = budget.saturating_sub(probes);
    let mut rng = substream(seed, u64::MAX);
    let width = lo.iter().zip(hi).map(|(l, h)| h - l).fold(0.0, f64::max);
    let starts = scored.len().min(REFINE_STARTS);
    for &(i, v0) in scored.iter().take(starts) {
        let mut y = flat[i * d..(i + 1) * d].to_vec();
        let mut v = v0;
        let mut step = width / 8.0;
        let mut misses = 0;
        let per_start = left / (starts.max(1));
        for _ in 0..per_start {
            let cand: Vec<f64> = (0..d)
                .map(|a| (y[a] + step * rng.gen_range(-1.0..=1.0)).clamp(lo[a], hi[a]))
                .collect();
            let cv = objective(&cand);
            left = left.saturating_sub(1);
            if cv > v {
                y = cand;
                v = cv;
                misses = 0;
                if v > threshold {
                    return Some((y, v));
                }
            } else {
                misses += 1;
                if misses >= 4 * d {
                    step *= 0.5;
                    misses = 0;
                    if step < 1e-9 * width {
                        break;
                    }
                }
            }
        }
    }
    None
}

/// Looks for `y ∈ [2δ, 1-2δ]^d` farther than `2δ` from every sample. On
/// success the obstacles are the point `y` and the sphere of radius `2δ`
/// around it, with start and goal `y ∓ δ e_1`: every roadmap edge out of
/// start or goal would cross one of them.
pub fn adversarial_shell(samples: &SampleSet, delta: f64, budget: usize, seed: u64) -> Result<Option<AdversarialInstance>> {
    let d = check(samples, delta)?;
    let lo = vec![2.0 * delta; d];
    let hi = vec![1.0 - 2.0 * delta; d];
    let threshold = 2.0 * delta;
    let found = if samples.is_empty() {
        Some((vec![0.5; d], f64::INFINITY))
    } else {
        let index = CellGrid::from_points(&vec![0.0; d], &vec![1.0; d], threshold, false, &samples.flat());
        let objective = |y: &[f64]| index.nearest(y).map_or(f64::INFINITY, |(_, r)| r);
        search(&lo, &hi, objective, threshold, budget, seed)
    };
    let Some((y, value)) = found else {
        return Ok(None);
    };
    let center = Point::from_vec(y);
    let start = center.sub(&Point::axis(d, 0, delta));
    let goal = center.add(&Point::axis(d, 0, delta));
    let env = Environment::new(
        start,
        goal,
        vec![
            Obstacle::Point { center: center.clone() },
            Obstacle::Shell { center: center.clone(), radius: threshold },
        ],
    )?;
    Ok(Some(AdversarialInstance {
        variant: Variant::Shell,
        env,
        witness: center,
        delta,
        opt_delta: PI * delta,
        margin: value - threshold,
    }))
}

/// Looks for `x* ∈ [2δ, 1-2δ]² × [δ, 1-δ]^(d-2)` whose solid ring
/// `R(x*, δ, δ)` holds no sample. On success the obstacle is the torus
/// bounding that ring, with start and goal `x* ± δ e_1` on the ring's core
/// circle, joined by the half circle `x* + δ (cos πt, sin πt, 0, ...)`.
pub fn adversarial_ring(samples: &SampleSet, delta: f64, budget: usize, seed: u64) -> Result<Option<AdversarialInstance>> {
    let d = check(samples, delta)?;
    let mut lo = vec![delta; d];
    let mut hi = vec![1.0 - delta; d];
    for a in 0..2 {
        lo[a] = 2.0 * delta;
        hi[a] = 1.0 - 2.0 * delta;
    }
    // Samples farther than 3δ from x* have s > 2δ, so the objective is capped
    // there and only nearby samples are scanned.
    let cap = 2.0 * delta;
    let found = if samples.is_empty() {
        Some((vec![0.5; d], cap))
    } else {
        let index = CellGrid::from_points(&vec![0.0; d], &vec![1.0; d], 3.0 * delta, false, &samples.flat());
        let objective = |y: &[f64]| {
            let mut best = cap;
            index.visit_within(y, 3.0 * delta, |i, _| {
                best = best.min(tube_distance(y, delta, index.point(i)));
                false
            });
            best
        };
        search(&lo, &hi, objective, delta, budget, seed)
    };
    let Some((x, value)) = found else {
        return Ok(None);
    };
    let center = Point::from_vec(x);
    let start = center.add(&Point::axis(d, 0, delta));
    let goal = center.sub(&Point::axis(d, 0, delta));
    let env = Environment::new(
        start,
        goal,
        vec![Obstacle::Torus { center: center.clone(), major: delta, minor: delta }],
    )?;
    Ok(Some(AdversarialInstance {
        variant: Variant::Ring,
        env,
        witness: center,
        delta,
        opt_delta: PI * delta,
        margin: value - delta,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prm::{build_prm, shortest_path};
    use crate::rng::uniform_box;
    use crate::sampling::{grid, points_from_flat, GridSpec};
    use crate::DEFAULT_TOL;

    fn random_samples(d: usize, n: usize, seed: u64) -> SampleSet {
        SampleSet::from_points(d, points_from_flat(d, &uniform_box(&vec![0.0; d], &vec![1.0; d], n, seed))).unwrap()
    }

    fn assert_sound(inst: &AdversarialInstance, samples: &SampleSet) {
        let d = samples.dim;
        assert!(inst.solution_clearance(1000) >= inst.delta - 1e-12);
        assert!((inst.opt_delta - PI * inst.delta).abs() < 1e-15);
        assert!((inst.solution_length(100_001) - inst.opt_delta).abs() < 1e-9);
        for r in [0.1, 0.5, 1.0, (d as f64).sqrt()] {
            let g = build_prm(&inst.env, samples, r, DEFAULT_TOL).unwrap();
            assert!(!shortest_path(&g).found, "{:?} r={r}", inst.variant);
        }
    }

    #[test]
    fn empty_samples_use_the_center() {
        let s = SampleSet::from_points(3, vec![]).unwrap();
        for inst in [
            adversarial_shell(&s, 0.1, 10, 0).unwrap().unwrap(),
            adversarial_ring(&s, 0.1, 10, 0).unwrap().unwrap(),
        ] {
            assert_eq!(inst.witness, Point::splat(3, 0.5));
            assert_sound(&inst, &s);
        }
    }

    #[test]
    fn few_random_samples_are_beaten() {
        for seed in 0..20 {
            let s = random_samples(2, 10, seed);
            let inst = adversarial_shell(&s, 0.05, DEFAULT_SEARCH_BUDGET, seed).unwrap().expect("witness");
            assert!(s.points.iter().all(|p| crate::geometry::dist(p.coords(), inst.witness.coords()) > 0.1));
            let g = build_prm(&inst.env, &s, 0.5, DEFAULT_TOL).unwrap();
            assert_eq!(g.degree(g.start.unwrap()), 0);
            assert_eq!(g.degree(g.goal.unwrap()), 0);
            assert_sound(&inst, &s);
            for d in [2, 3] {
                let s = random_samples(d, 10, seed);
                let inst = adversarial_ring(&s, 0.05, DEFAULT_SEARCH_BUDGET, seed).unwrap().expect("witness");
                assert!(s.points.iter().all(|p| tube_distance(inst.witness.coords(), 0.05, p.coords()) > 0.05));
                assert_sound(&inst, &s);
            }
        }
    }

    #[test]
    fn covering_grid_has_no_shell_witness() {
        let delta = 0.05;
        // a 2δ-net of the square: spacing 2·2δ/√2 rounded down to 1/m
        let m = (2f64.sqrt() / (4.0 * delta)).ceil();
        let g = grid(&GridSpec::unit_cube(2, 1.0 / m)).unwrap();
        assert!(adversarial_shell(&g, delta, 5000, 1).unwrap().is_none());
    }

    #[test]
    fn ring_membership_is_symmetric() {
        let flat = uniform_box(&[0.0; 4], &[1.0; 4], 20_000, 9);
        for pair in flat.chunks_exact(8) {
            let (a, b) = pair.split_at(4);
            let delta = 0.2;
            assert_eq!(tube_distance(a, delta, b) <= delta, tube_distance(b, delta, a) <= delta);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let s = random_samples(2, 5, 0);
        assert!(adversarial_shell(&s, 0.25, 10, 0).is_err());
        assert!(adversarial_ring(&random_samples(1, 5, 0), 0.1, 10, 0).is_err());
    }
}
