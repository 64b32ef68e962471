//! Roadmap construction and queries, the completeness check, the waypoint
//! stretch oracle and adversarial instances.

mod adversary;
mod stretch;

pub use adversary::{adversarial_ring, adversarial_shell, AdversarialInstance, Variant, DEFAULT_SEARCH_BUDGET};
pub use stretch::{waypoint_stretch_oracle, StretchReport};

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{dist2, point_in_free_space, Environment, Point};
use crate::sampling::{Eps, SampleSet};
use crate::spatial::CellGrid;

/// Roadmap over `(samples ∪ {start, goal}) ∩ F` with collision-free edges of
/// length at most `radius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrmGraph {
    pub radius: f64,
    /// Free samples in input order, then start and goal when free.
    pub vertices: Vec<Point>,
    pub start: Option<usize>,
    pub goal: Option<usize>,
    /// `(i, j, length)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize, f64)>,
}

impl PrmGraph {
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v || e.1 == v).count()
    }

    fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(i, j, w) in &self.edges {
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        adj
    }
}

fn edge_is_free(env: &Environment, a: &[f64], b: &[f64], tol: f64) -> bool {
    !env.obstacles.iter().any(|o| o.hits_segment(a, b, tol))
}

/// Builds the PRM graph. Candidate neighbours come from a cell grid, but the
/// edge set is exactly the all-pairs definition.
pub fn build_prm(env: &Environment, samples: &SampleSet, radius: f64, tol: f64) -> Result<PrmGraph> {
    env.validate()?;
    if !samples.is_empty() {
        check_dim(env.dim, samples.dim)?;
    }
    if !(radius > 0.0) {
        return Err(Error::domain(format!("connection radius must be positive, got {radius}")));
    }
    let mut vertices: Vec<Point> = samples
        .points
        .par_iter()
        .filter(|p| point_in_free_space(env, p, tol))
        .cloned()
        .collect();
    let mut push_if_free = |p: &Point| {
        point_in_free_space(env, p, tol).then(|| {
            vertices.push(p.clone());
            vertices.len() - 1
        })
    };
    let start = push_if_free(&env.start);
    let goal = push_if_free(&env.goal);

    let d = env.dim;
    let flat: Vec<f64> = vertices.iter().flat_map(|p| p.coords().iter().copied()).collect();
    let index = CellGrid::from_points(&vec![0.0; d], &vec![1.0; d], radius, false, &flat);
    let r2 = radius * radius;
    let edges: Vec<(usize, usize, f64)> = (0..vertices.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let a = vertices[i].coords();
            index
                .all_within(a, radius)
                .into_iter()
                .map(|j| j as usize)
                .filter(move |&j| j > i)
                .filter_map(|j| {
                    let b = vertices[j].coords();
                    let d2 = dist2(a, b);
                    (d2 <= r2 && edge_is_free(env, a, b, tol)).then(|| (i, j, d2.sqrt()))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(PrmGraph { radius, vertices, start, goal, edges })
}

/// Shortest start-goal path. `length` is `None` when none exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub found: bool,
    pub length: Option<f64>,
    pub path: Vec<Point>,
    #[serde(default)]
    pub vertex_ids: Vec<usize>,
}

impl PathResult {
    pub fn not_found() -> Self {
        PathResult { found: false, length: None, path: Vec::new(), vertex_ids: Vec::new() }
    }
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Dijkstra with Euclidean edge weights.
pub fn shortest_path(g: &PrmGraph) -> PathResult {
    let (Some(s), Some(t)) = (g.start, g.goal) else {
        return PathResult::not_found();
    };
    let adj = g.adjacency();
    let mut dist = vec![f64::INFINITY; g.vertices.len()];
    let mut prev = vec![usize::MAX; g.vertices.len()];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(Entry(0.0, s));
    while let Some(Entry(du, u)) = heap.pop() {
        if du > dist[u] {
            continue;
        }
        if u == t {
            break;
        }
        for &(v, w) in &adj[u] {
            let nd = du + w;
            if nd < dist[v] {
                dist[v] = nd;
                prev[v] = u;
                heap.push(Entry(nd, v));
            }
        }
    }
    if !dist[t].is_finite() {
        return PathResult::not_found();
    }
    let mut ids = vec![t];
    while *ids.last().unwrap() != s {
        ids.push(prev[*ids.last().unwrap()]);
    }
    ids.reverse();
    PathResult {
        found: true,
        length: Some(dist[t]),
        path: ids.iter().map(|&i| g.vertices[i].clone()).collect(),
        vertex_ids: ids,
    }
}

/// `found` and `length < (1 + eps) * opt_delta`; feasibility only when
/// `eps` is infinite.
pub fn completeness_check(opt_delta: f64, result: &PathResult, eps: Eps) -> Result<bool> {
    if !(opt_delta > 0.0) {
        return Err(Error::domain(format!("opt_delta must be positive, got {opt_delta}")));
    }
    Ok(match (result.found, result.length, eps) {
        (true, Some(_), Eps::Infinite) => true,
        (true, Some(len), Eps::Finite(e)) => len < (1.0 + e) * opt_delta,
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{segment_collides, Obstacle, Segment};
    use crate::rng::uniform_box;
    use crate::sampling::points_from_flat;
    use crate::DEFAULT_TOL;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn none(d: usize) -> SampleSet {
        SampleSet::from_points(d, vec![]).unwrap()
    }

    #[test]
    fn start_goal_only() {
        let env = Environment::empty(p(&[0.2, 0.5]), p(&[0.5, 0.5])).unwrap();
        let g = build_prm(&env, &none(2), 0.5, DEFAULT_TOL).unwrap();
        assert_eq!(g.edges.len(), 1);
        assert!((g.edges[0].2 - 0.3).abs() < 1e-15);
        let r = shortest_path(&g);
        assert!(r.found && (r.length.unwrap() - 0.3).abs() < 1e-15);

        let far = Environment::empty(p(&[0.2, 0.5]), p(&[0.8, 0.5])).unwrap();
        let g = build_prm(&far, &none(2), 0.5, DEFAULT_TOL).unwrap();
        assert!(g.edges.is_empty());
        let r = shortest_path(&g);
        assert!(!r.found && r.length.is_none());
        assert_eq!(serde_json::to_value(&r).unwrap()["length"], serde_json::Value::Null);
    }

    #[test]
    fn detour_around_blocked_edge() {
        // the direct edge is within radius but passes through a point obstacle
        let s = p(&[0.25, 0.5]);
        let t = p(&[0.75, 0.5]);
        let mid = p(&[0.5, 0.5]);
        let env = Environment::new(s.clone(), t.clone(), vec![Obstacle::Point { center: mid }]).unwrap();
        let a = p(&[0.5, 0.65]);
        let samples = SampleSet::from_points(2, vec![a.clone()]).unwrap();
        let g = build_prm(&env, &samples, 0.6, DEFAULT_TOL).unwrap();
        let r = shortest_path(&g);
        let leg = (0.0625f64 + 0.0225).sqrt();
        assert!(segment_collides(&env, &Segment::new(s, t).unwrap(), DEFAULT_TOL));
        assert!(r.found);
        assert!((r.length.unwrap() - 2.0 * leg).abs() < 1e-12);
        assert_eq!(r.path[1], a);
    }

    #[test]
    fn triangle_graph() {
        let g = PrmGraph {
            radius: 1.0,
            vertices: vec![p(&[0.35, 0.25]), p(&[0.1, 0.1]), p(&[0.6, 0.1])],
            start: Some(1),
            goal: Some(2),
            edges: vec![(0, 1, 0.2), (0, 2, 0.2)],
        };
        let r = shortest_path(&g);
        assert!((r.length.unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(r.vertex_ids, vec![1, 0, 2]);
        let mut with_direct = g.clone();
        with_direct.edges.push((1, 2, 0.5));
        assert!((shortest_path(&with_direct).length.unwrap() - 0.4).abs() < 1e-15);
    }

    fn brute_edges(env: &Environment, g: &PrmGraph) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..g.vertices.len() {
            for j in i + 1..g.vertices.len() {
                let (a, b) = (g.vertices[i].coords(), g.vertices[j].coords());
                let d2 = dist2(a, b);
                if d2 <= g.radius * g.radius
                    && !segment_collides(env, &Segment::new(g.vertices[i].clone(), g.vertices[j].clone()).unwrap(), DEFAULT_TOL)
                {
                    out.push((i, j, d2.sqrt()));
                }
            }
        }
        out
    }

    #[test]
    fn edges_match_all_pairs() {
        for (d, seed) in [(2usize, 1u64), (3, 2), (5, 3)] {
            let flat = uniform_box(&vec![0.0; d], &vec![1.0; d], 400, seed);
            let samples = SampleSet::from_points(d, points_from_flat(d, &flat)).unwrap();
            let c = Point::splat(d, 0.5);
            let env = Environment::new(
                Point::splat(d, 0.1),
                Point::splat(d, 0.9),
                vec![
                    Obstacle::Ball { center: c.clone(), radius: 0.15 },
                    Obstacle::Shell { center: Point::splat(d, 0.3), radius: 0.1 },
                    Obstacle::Torus { center: c, major: 0.2, minor: 0.05 },
                ],
            )
            .unwrap();
            for r in [0.1, 0.3, 0.7] {
                let g = build_prm(&env, &samples, r, DEFAULT_TOL).unwrap();
                assert_eq!(g.edges, brute_edges(&env, &g), "d={d} r={r}");
                assert!(g.edges.iter().all(|e| e.0 < e.1 && e.2 <= r));
            }
        }
    }

    /// All simple start-goal paths of a tiny graph, enumerated by DFS.
    fn brute_shortest(g: &PrmGraph) -> Option<f64> {
        let adj = g.adjacency();
        let (s, t) = (g.start?, g.goal?);
        let mut best: Option<f64> = None;
        let mut seen = vec![false; g.vertices.len()];
        fn go(u: usize, t: usize, len: f64, adj: &[Vec<(usize, f64)>], seen: &mut [bool], best: &mut Option<f64>) {
            if u == t {
                *best = Some(best.map_or(len, |b| b.min(len)));
                return;
            }
            seen[u] = true;
            for &(v, w) in &adj[u] {
                if !seen[v] {
                    go(v, t, len + w, adj, seen, best);
                }
            }
            seen[u] = false;
        }
        go(s, t, 0.0, &adj, &mut seen, &mut best);
        best
    }

    #[test]
    fn dijkstra_matches_enumeration() {
        for seed in 0..40u64 {
            let flat = uniform_box(&[0.0, 0.0], &[1.0, 1.0], 8, seed);
            let samples = SampleSet::from_points(2, points_from_flat(2, &flat)).unwrap();
            let env = Environment::new(
                p(&[0.05, 0.05]),
                p(&[0.95, 0.95]),
                vec![Obstacle::Ball { center: p(&[0.5, 0.5]), radius: 0.2 }],
            )
            .unwrap();
            let g = build_prm(&env, &samples, 0.5, DEFAULT_TOL).unwrap();
            let r = shortest_path(&g);
            match brute_shortest(&g) {
                Some(b) => assert!((r.length.unwrap() - b).abs() < 1e-12, "seed {seed}"),
                None => assert!(!r.found),
            }
        }
    }

    #[test]
    fn colliding_start_is_dropped() {
        let env = Environment::new(
            p(&[0.5, 0.5]),
            p(&[0.9, 0.9]),
            vec![Obstacle::Ball { center: p(&[0.5, 0.5]), radius: 0.1 }],
        )
        .unwrap();
        let g = build_prm(&env, &none(2), 1.0, DEFAULT_TOL).unwrap();
        assert_eq!(g.start, None);
        assert!(!shortest_path(&g).found);
    }

    #[test]
    fn completeness_examples() {
        let found = |len: f64| PathResult { found: true, length: Some(len), path: vec![], vertex_ids: vec![] };
        let opt = 0.32f64.sqrt();
        assert!(completeness_check(opt, &found(1.13), Eps::Finite(1.0)).unwrap());
        assert!(!completeness_check(opt, &found(1.14), Eps::Finite(1.0)).unwrap());
        assert!(completeness_check(opt, &found(opt), Eps::Finite(1e-6)).unwrap());
        assert!(completeness_check(opt, &found(100.0), Eps::Infinite).unwrap());
        for eps in [Eps::Infinite, Eps::Finite(0.1)] {
            assert!(!completeness_check(opt, &PathResult::not_found(), eps).unwrap());
        }
        assert!(completeness_check(0.0, &found(1.0), Eps::Infinite).is_err());
    }
}
