//! Monte Carlo coverage estimates, templates and the template-size table.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{substream, uniform_box, CHUNK};
use crate::sampling::{greedy_net, SampleSet, Template};
use crate::spatial::CellGrid;

pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;
pub const DEFAULT_DENSE_N: usize = 1_000_000;

/// Offset separating the probe stream from the dense-point stream of the
/// same seed.
const PROBE_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    /// Fraction of probes farther than `cover_radius` from every sample.
    pub p_hat: f64,
    pub uncovered: u64,
    pub mc_samples: usize,
    pub cover_radius: f64,
    pub seed: u64,
    pub periodic: bool,
}

fn sample_index(samples: &SampleSet, min_side: f64, periodic: bool) -> Result<CellGrid> {
    let d = samples.dim;
    if periodic && !samples.in_unit_cube() {
        return Err(Error::domain("periodic coverage needs samples in [0,1]^d"));
    }
    Ok(CellGrid::from_points(&vec![0.0; d], &vec![1.0; d], min_side, periodic, &samples.flat()))
}

/// Runs `f` on every probe of chunk `c` and sums the results; the sum over
/// chunks does not depend on how rayon schedules them.
fn probe_chunks<T, F, G>(d: usize, mc: usize, seed: u64, init: T, per_probe: F, combine: G) -> T
where
    T: Send + Sync + Clone,
    F: Fn(&[f64]) -> T + Sync,
    G: Fn(T, T) -> T + Sync + Send,
{
    let chunks = mc.div_ceil(CHUNK);
    let parts: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, c as u64);
            let n = CHUNK.min(mc - c * CHUNK);
            let mut q = vec![0.0; d];
            let mut acc = init.clone();
            for _ in 0..n {
                for x in q.iter_mut() {
                    *x = rng.gen::<f64>();
                }
                acc = combine(acc, per_probe(&q));
            }
            acc
        })
        .collect();
    parts.into_iter().fold(init, &combine)
}

/// Monte Carlo estimate of the volume fraction of `[0,1]^d` farther than
/// `cover_radius` from every sample (minimum-image distance when `periodic`).
pub fn estimate_uncovered(
    samples: &SampleSet,
    cover_radius: f64,
    mc_samples: usize,
    seed: u64,
    periodic: bool,
) -> Result<CoverageEstimate> {
    if mc_samples == 0 {
        return Err(Error::domain("mc_samples must be >= 1"));
    }
    if !(cover_radius > 0.0) {
        return Err(Error::domain(format!("cover radius must be positive, got {cover_radius}")));
    }
    let index = sample_index(samples, cover_radius, periodic)?;
    let uncovered = probe_chunks(
        samples.dim,
        mc_samples,
        seed,
        0u64,
        |q| u64::from(index.any_within(q, cover_radius).is_none()),
        |a, b| a + b,
    );
    Ok(CoverageEstimate {
        p_hat: uncovered as f64 / mc_samples as f64,
        uncovered,
        mc_samples,
        cover_radius,
        seed,
        periodic,
    })
}

/// Largest probe-to-nearest-sample distance over `probes` uniform probes: a
/// lower estimate of the dispersion.
pub fn estimate_dispersion(samples: &SampleSet, probes: usize, seed: u64, periodic: bool) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::domain("dispersion of an empty set is undefined"));
    }
    if probes == 0 {
        return Err(Error::domain("probes must be >= 1"));
    }
    let d = samples.dim;
    let side = (1.0 / (samples.len() as f64).powf(1.0 / d as f64)).max(1e-3);
    let index = sample_index(samples, side, periodic)?;
    Ok(probe_chunks(d, probes, seed, 0.0f64, |q| index.nearest(q).map_or(0.0, |(_, r)| r), f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateReport {
    pub template: Template,
    /// `|T| / k^d`.
    pub rho: f64,
    pub p_hat: f64,
    pub mc_samples: usize,
    pub dense_n: usize,
}

/// Build-Net over `dense_n` seeded uniform points of `[0,1]^d` at radius
/// `sqrt(d)/(2k)`; the result is the template.
pub fn template_points(d: usize, k: u32, dense_n: usize, seed: u64) -> Result<Template> {
    if d == 0 || k == 0 || dense_n == 0 {
        return Err(Error::domain("template needs d >= 1, k >= 1 and dense_n >= 1"));
    }
    let radius = Template::radius_for(d, k);
    let lo = vec![0.0; d];
    let hi = vec![1.0; d];
    let flat = uniform_box(&lo, &hi, dense_n, seed);
    let idx = greedy_net(d, &flat, &lo, &hi, radius);
    let points = idx
        .iter()
        .map(|&i| crate::geometry::Point::new(flat[i * d..(i + 1) * d].to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Template::new(d, k, points)?;
    t.seed = seed;
    t.params.insert("dense_n".into(), dense_n.into());
    Ok(t)
}

/// Template plus its density ratio and uncovered fraction on `[0,1]^d`.
pub fn make_template(d: usize, k: u32, dense_n: usize, mc_samples: usize, seed: u64) -> Result<TemplateReport> {
    let template = template_points(d, k, dense_n, seed)?;
    let est = estimate_uncovered(
        &template.to_sample_set(),
        template.cover_radius,
        mc_samples,
        seed ^ PROBE_SEED_SALT,
        false,
    )?;
    Ok(TemplateReport {
        rho: template.len() as f64 / (k as f64).powi(d as i32),
        p_hat: est.p_hat,
        mc_samples,
        dense_n,
        template,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCheck {
    pub dense_n: usize,
    pub size: usize,
    pub doubled_size: usize,
    pub relative_change: f64,
    /// Whether the size moved by less than 5% when `dense_n` doubled.
    pub converged: bool,
}

/// Rebuilds the template from `2 dense_n` points and compares sizes.
pub fn template_convergence(d: usize, k: u32, dense_n: usize, seed: u64) -> Result<ConvergenceCheck> {
    let a = template_points(d, k, dense_n, seed)?.len();
    let b = template_points(d, k, 2 * dense_n, seed)?.len();
    let rel = (b as f64 - a as f64).abs() / (a.max(1) as f64);
    Ok(ConvergenceCheck { dense_n, size: a, doubled_size: b, relative_change: rel, converged: rel < 0.05 })
}

/// Reference template sizes: `(d, k, |T|, rho, p_hat)`.
pub const TABLE2_REFERENCE: [(usize, u32, f64, f64, f64); 12] = [
    (4, 2, 15.0, 0.93, 3.7e-2),
    (4, 3, 77.0, 0.95, 1.4e-2),
    (5, 2, 27.0, 0.84, 3.3e-2),
    (5, 3, 189.0, 0.77, 5.7e-3),
    (6, 2, 57.0, 0.89, 5.5e-3),
    (6, 3, 457.0, 0.63, 2.4e-3),
    (7, 2, 105.0, 0.82, 3.1e-3),
    (7, 3, 1078.0, 0.50, 1.4e-3),
    (8, 2, 173.0, 0.68, 1.6e-3),
    (8, 3, 2477.0, 0.38, 6.4e-4),
    (9, 2, 291.0, 0.58, 1.3e-3),
    (9, 3, 5650.0, 0.29, 2.6e-4),
];

pub const RHO_TOLERANCE: f64 = 0.15;
pub const P_HAT_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Serialize)]
pub struct Table2Run {
    pub d: usize,
    pub k: u32,
    pub seed: u64,
    pub size: usize,
    pub rho: f64,
    pub p_hat: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table2Cell {
    pub d: usize,
    pub k: u32,
    pub size_mean: f64,
    pub size_std: f64,
    pub rho_mean: f64,
    pub rho_std: f64,
    pub p_hat_mean: f64,
    pub p_hat_std: f64,
    pub ref_size: f64,
    pub ref_rho: f64,
    pub ref_p_hat: f64,
    pub rho_ok: bool,
    pub p_hat_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table2 {
    pub dense_n: usize,
    pub mc_samples: usize,
    pub seeds: Vec<u64>,
    pub runs: Vec<Table2Run>,
    pub cells: Vec<Table2Cell>,
    /// Density ratio improves with dimension: `rho(9, 3) < rho(4, 3)`.
    pub trend_ok: bool,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 { v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (m, var.sqrt())
}

impl Table2 {
    pub fn passed(&self) -> bool {
        self.trend_ok && self.cells.iter().all(|c| c.rho_ok && c.p_hat_ok)
    }

    pub fn cell(&self, d: usize, k: u32) -> Option<&Table2Cell> {
        self.cells.iter().find(|c| c.d == d && c.k == k)
    }

    /// Per-seed rows (`seed` set) followed by one summary row per cell
    /// (`seed` = `mean`).
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "d,k,seed,size,size_std,rho,rho_std,p_hat,p_hat_std,ref_size,ref_rho,ref_p_hat,rho_ok,p_hat_ok\n",
        );
        for r in &self.runs {
            let _ = writeln!(s, "{},{},{},{},,{},,{},,,,,,", r.d, r.k, r.seed, r.size, r.rho, r.p_hat);
        }
        for c in &self.cells {
            let _ = writeln!(
                s,
                "{},{},mean,{},{},{},{},{},{},{},{},{},{},{}",
                c.d,
                c.k,
                c.size_mean,
                c.size_std,
                c.rho_mean,
                c.rho_std,
                c.p_hat_mean,
                c.p_hat_std,
                c.ref_size,
                c.ref_rho,
                c.ref_p_hat,
                c.rho_ok,
                c.p_hat_ok
            );
        }
        s
    }
}

/// Builds every template of the reference table for each seed and compares
/// the across-seed means with the reference values.
pub fn table2_bench(dense_n: usize, mc_samples: usize, seeds: &[u64]) -> Result<Table2> {
    if seeds.is_empty() {
        return Err(Error::domain("table2 needs at least one seed"));
    }
    let mut runs = Vec::new();
    let mut cells = Vec::new();
    for &(d, k, ref_size, ref_rho, ref_p_hat) in &TABLE2_REFERENCE {
        let mut sizes = Vec::new();
        let mut rhos = Vec::new();
        let mut p_hats = Vec::new();
        for &seed in seeds {
            let r = make_template(d, k, dense_n, mc_samples, seed)?;
            sizes.push(r.template.len() as f64);
            rhos.push(r.rho);
            p_hats.push(r.p_hat);
            runs.push(Table2Run { d, k, seed, size: r.template.len(), rho: r.rho, p_hat: r.p_hat });
        }
        let (size_mean, size_std) = mean_std(&sizes);
        let (rho_mean, rho_std) = mean_std(&rhos);
        let (p_hat_mean, p_hat_std) = mean_std(&p_hats);
        cells.push(Table2Cell {
            d,
            k,
            size_mean,
            size_std,
            rho_mean,
            rho_std,
            p_hat_mean,
            p_hat_std,
            ref_size,
            ref_rho,
            ref_p_hat,
            rho_ok: (rho_mean - ref_rho).abs() <= RHO_TOLERANCE,
            p_hat_ok: p_hat_mean <= P_HAT_FACTOR * ref_p_hat,
        });
    }
    let rho = |d, k| cells.iter().find(|c: &&Table2Cell| c.d == d && c.k == k).map(|c| c.rho_mean);
    let trend_ok = matches!((rho(9, 3), rho(4, 3)), (Some(a), Some(b)) if a < b);
    Ok(Table2 { dense_n, mc_samples, seeds: seeds.to_vec(), runs, cells, trend_ok })
}
