//! Uniform-cell bucketing for fixed-radius and nearest-neighbour queries.
//!
//! Every query enumerates exactly the points a brute-force scan would accept;
//! cells only prune candidates whose cell box is provably out of range.

const MAX_CELLS: usize = 1 << 22;

#[derive(Debug, Clone)]
pub struct CellGrid {
    dim: usize,
    lo: Vec<f64>,
    side: Vec<f64>,
    counts: Vec<usize>,
    strides: Vec<usize>,
    periodic: bool,
    buckets: Vec<Vec<u32>>,
    coords: Vec<f64>,
}

impl CellGrid {
    /// Empty grid over the box `[lo, hi]` with cells at least `min_side` wide
    /// (wider when the cell count would exceed an internal cap). With
    /// `periodic` the domain must be the unit cube and distances use the
    /// minimum-image (torus) metric.
    pub fn new(lo: &[f64], hi: &[f64], min_side: f64, periodic: bool) -> Self {
        let dim = lo.len();
        assert_eq!(dim, hi.len());
        assert!(min_side > 0.0);
        if periodic {
            assert!(lo.iter().all(|&l| l == 0.0) && hi.iter().all(|&h| h == 1.0));
        }
        let mut counts: Vec<usize> = lo
            .iter()
            .zip(hi)
            .map(|(l, h)| (((h - l) / min_side).floor() as usize).max(1))
            .collect();
        while counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c)).map_or(true, |n| n > MAX_CELLS) {
            for c in counts.iter_mut() {
                *c = (*c / 2).max(1);
            }
        }
        let side: Vec<f64> = lo
            .iter()
            .zip(hi)
            .zip(&counts)
            .map(|((l, h), &c)| if h > l { (h - l) / c as f64 } else { 1.0 })
            .collect();
        let mut strides = vec![1usize; dim];
        for a in (0..dim.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * counts[a + 1];
        }
        let total = counts.iter().product();
        CellGrid {
            dim,
            lo: lo.to_vec(),
            side,
            counts,
            strides,
            periodic,
            buckets: vec![Vec::new(); total],
            coords: Vec::new(),
        }
    }

    /// Grid over `[lo, hi]` holding the flat coordinate buffer `coords`.
    pub fn from_points(lo: &[f64], hi: &[f64], min_side: f64, periodic: bool, coords: &[f64]) -> Self {
        let mut g = CellGrid::new(lo, hi, min_side, periodic);
        for p in coords.chunks_exact(g.dim) {
            g.insert(p);
        }
        g
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: u32) -> &[f64] {
        let i = i as usize;
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn insert(&mut self, p: &[f64]) -> u32 {
        debug_assert_eq!(p.len(), self.dim);
        let idx = self.len() as u32;
        let cell = self.cell_of(p);
        self.coords.extend_from_slice(p);
        self.buckets[cell].push(idx);
        idx
    }

    fn cell_of(&self, p: &[f64]) -> usize {
        (0..self.dim)
            .map(|a| {
                let n = self.counts[a] as i64;
                let c = ((p[a] - self.lo[a]) / self.side[a]).floor() as i64;
                let c = if self.periodic { c.rem_euclid(n) } else { c.clamp(0, n - 1) };
                c as usize * self.strides[a]
            })
            .sum()
    }

    /// Squared distance under the grid's metric.
    pub fn dist2(&self, a: &[f64], b: &[f64]) -> f64 {
        if self.periodic {
            a.iter()
                .zip(b)
                .map(|(x, y)| {
                    let t = (x - y).abs();
                    let t = t - t.floor();
                    let t = t.min(1.0 - t);
                    t * t
                })
                .sum()
        } else {
            crate::geometry::dist2(a, b)
        }
    }

    /// Calls `f(index, squared distance)` for points within `r` of `q` until it
    /// returns `true`. Returns whether the visit stopped early.
    pub fn visit_within<F: FnMut(u32, f64) -> bool>(&self, q: &[f64], r: f64, mut f: F) -> bool {
        if self.is_empty() {
            return false;
        }
        self.visit_axis(0, 0, 0.0, q, r * r, &mut f)
    }

    fn cell_gap(&self, axis: usize, c: i64, x: f64) -> f64 {
        let s = self.side[axis];
        let n = self.counts[axis] as i64;
        let gap_for = |c: i64| {
            let lo = if !self.periodic && c <= 0 { f64::NEG_INFINITY } else { c as f64 * s };
            let hi = if !self.periodic && c >= n - 1 { f64::INFINITY } else { (c + 1) as f64 * s };
            (lo - x).max(x - hi).max(0.0)
        };
        if self.periodic {
            gap_for(c).min(gap_for(c - n)).min(gap_for(c + n))
        } else {
            gap_for(c)
        }
    }

    fn visit_axis<F: FnMut(u32, f64) -> bool>(
        &self,
        axis: usize,
        offset: usize,
        acc: f64,
        q: &[f64],
        r2: f64,
        f: &mut F,
    ) -> bool {
        if axis == self.dim {
            for &i in &self.buckets[offset] {
                let d2 = self.dist2(q, self.point(i));
                if d2 <= r2 && f(i, d2) {
                    return true;
                }
            }
            return false;
        }
        let n = self.counts[axis] as i64;
        let x = q[axis] - self.lo[axis];
        if self.periodic {
            let xw = x.rem_euclid(1.0);
            let home = ((xw / self.side[axis]).floor() as i64).rem_euclid(n);
            let lo_k = -((n - 1) / 2);
            let hi_k = lo_k + n - 1;
            // Home first, then outwards.
            let order = std::iter::once(0).chain((1..=hi_k.max(-lo_k)).flat_map(|k| [k, -k]));
            for k in order.filter(|&k| k >= lo_k && k <= hi_k) {
                let c = home + k;
                let gap = self.cell_gap(axis, c, xw);
                let a2 = acc + gap * gap;
                if a2 > r2 {
                    continue;
                }
                let cw = c.rem_euclid(n) as usize;
                if self.visit_axis(axis + 1, offset + cw * self.strides[axis], a2, q, r2, f) {
                    return true;
                }
            }
            false
        } else {
            let home = ((x / self.side[axis]).floor() as i64).clamp(0, n - 1);
            let (mut up, mut down) = (true, true);
            let mut step = 0i64;
            while up || down {
                for (dir, c) in [(1, home + step), (-1, home - step)] {
                    if (dir == 1 && !up) || (dir == -1 && (!down || step == 0)) {
                        continue;
                    }
                    let alive = c >= 0 && c < n && {
                        let gap = self.cell_gap(axis, c, x);
                        let a2 = acc + gap * gap;
                        if a2 <= r2 {
                            if self.visit_axis(axis + 1, offset + c as usize * self.strides[axis], a2, q, r2, f) {
                                return true;
                            }
                            true
                        } else {
                            false
                        }
                    };
                    if !alive {
                        if dir == 1 {
                            up = false;
                        } else {
                            down = false;
                        }
                    }
                }
                step += 1;
            }
            false
        }
    }

    /// Any point within `r` of `q` (closed ball).
    pub fn any_within(&self, q: &[f64], r: f64) -> Option<u32> {
        let mut hit = None;
        self.visit_within(q, r, |i, _| {
            hit = Some(i);
            true
        });
        hit
    }

    /// All points within `r` of `q`, in ascending index order.
    pub fn all_within(&self, q: &[f64], r: f64) -> Vec<u32> {
        let mut out = Vec::new();
        self.visit_within(q, r, |i, _| {
            out.push(i);
            false
        });
        out.sort_unstable();
        out
    }

    /// Nearest point and its distance; ties go to the smallest index.
    pub fn nearest(&self, q: &[f64]) -> Option<(u32, f64)> {
        if self.is_empty() {
            return None;
        }
        let mut r = self.side.iter().cloned().fold(0.0, f64::max);
        loop {
            let mut best: Option<(u32, f64)> = None;
            self.visit_within(q, r, |i, d2| {
                match best {
                    Some((bi, bd)) if d2 > bd || (d2 == bd && i > bi) => {}
                    _ => best = Some((i, d2)),
                }
                false
            });
            if let Some((i, d2)) = best {
                return Some((i, d2.sqrt()));
            }
            r *= 2.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn brute_within(g: &CellGrid, q: &[f64], r: f64) -> Vec<u32> {
        (0..g.len() as u32).filter(|&i| g.dist2(q, g.point(i)) <= r * r).collect()
    }

    fn brute_nearest(g: &CellGrid, q: &[f64]) -> (u32, f64) {
        (0..g.len() as u32)
            .map(|i| (i, g.dist2(q, g.point(i))))
            .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b })
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for &(d, periodic) in &[(1, false), (2, false), (3, true), (4, false), (2, true), (6, false)] {
            let pts: Vec<f64> = (0..1000 * d).map(|_| rng.gen::<f64>()).collect();
            for &side in &[0.05, 0.13, 0.5] {
                let g = CellGrid::from_points(&vec![0.0; d], &vec![1.0; d], side, periodic, &pts);
                for _ in 0..300 {
                    let q: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.1..1.1)).collect();
                    let r = rng.gen_range(0.0..0.4);
                    assert_eq!(g.all_within(&q, r), brute_within(&g, &q, r), "d={d} periodic={periodic}");
                    let (bi, bd2) = brute_nearest(&g, &q);
                    let (ni, nd) = g.nearest(&q).unwrap();
                    assert_eq!(ni, bi);
                    assert_eq!(nd, bd2.sqrt());
                }
            }
        }
    }

    #[test]
    fn periodic_wraps_around() {
        let g = CellGrid::from_points(&[0.0, 0.0], &[1.0, 1.0], 0.1, true, &[0.02, 0.5]);
        assert_eq!(g.any_within(&[0.98, 0.5], 0.05), Some(0));
        let flat = CellGrid::from_points(&[0.0, 0.0], &[1.0, 1.0], 0.1, false, &[0.02, 0.5]);
        assert_eq!(flat.any_within(&[0.98, 0.5], 0.05), None);
    }

    #[test]
    fn empty_grid() {
        let g = CellGrid::new(&[0.0], &[1.0], 0.1, false);
        assert!(g.nearest(&[0.5]).is_none());
        assert!(g.any_within(&[0.5], 10.0).is_none());
    }
}
