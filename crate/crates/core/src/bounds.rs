//! Closed-form sample-complexity bounds and the sample-complexity table.

use std::f64::consts::{E, PI};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::Eps;

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 0.5 {
        Ok(())
    } else {
        Err(Error::domain(format!("delta must lie in (0, 1/2), got {delta}")))
    }
}

fn check_d(d: usize, min: usize) -> Result<f64> {
    if d >= min {
        Ok(d as f64)
    } else {
        Err(Error::domain(format!("d must be >= {min}, got {d}")))
    }
}

/// Samples any (delta, inf)-complete pair `(X, r)` needs:
/// `sqrt(e/2) (1 - 2δ/(1-2δ))^2 (sqrt((d-1)/(2πe)) (1-2δ)/δ)^d`.
/// Vacuous (reported as 0) once `delta >= 1/4`.
pub fn necessary_n(d: usize, delta: f64) -> Result<f64> {
    let df = check_d(d, 2)?;
    check_delta(delta)?;
    let q = 1.0 - 2.0 * delta;
    let lead = 1.0 - 2.0 * delta / q;
    if lead <= 0.0 {
        return Ok(0.0);
    }
    Ok((E / 2.0).sqrt() * lead * lead * (((df - 1.0) / (2.0 * PI * E)).sqrt() * q / delta).powf(df))
}

/// Smallest admissible connection radius with `n` samples:
/// `(1-2δ) (sqrt(πd))^(1/d) sqrt(d/(2πe)) n^(-1/d)`.
pub fn necessary_r(d: usize, delta: f64, n: f64) -> Result<f64> {
    let df = check_d(d, 2)?;
    check_delta(delta)?;
    check_n(n)?;
    Ok((1.0 - 2.0 * delta) * (PI * df).sqrt().powf(1.0 / df) * (df / (2.0 * PI * E)).sqrt() * n.powf(-1.0 / df))
}

fn check_n(n: f64) -> Result<()> {
    if n > 0.0 && n.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("n must be positive and finite, got {n}")))
    }
}

/// Samples that make ENS (delta, eps)-complete:
/// `sqrt(πd) (sqrt(2d/(πe)) (1 - (2-α)δ) / (αδ))^d`.
pub fn sufficient_n(d: usize, delta: f64, eps: Eps) -> Result<f64> {
    check_d(d, 1)?;
    check_delta(delta)?;
    let alpha = eps.alpha();
    if 1.0 - (2.0 - alpha) * delta <= 0.0 {
        return Err(Error::domain("1 - (2 - alpha) delta must be positive"));
    }
    Ok(crate::sampling::ens_sufficient_n(d, alpha, delta))
}

/// Connection radius as stated with the sufficiency result:
/// `2 (1 + 1/ε) (sqrt(πd))^(1/d) sqrt(d/(2πe)) n^(-1/d)`.
pub fn sufficient_r_statement(d: usize, eps: Eps, n: f64) -> Result<f64> {
    let df = check_d(d, 1)?;
    check_n(n)?;
    Ok(2.0 * eps.one_plus_inverse() * (PI * df).sqrt().powf(1.0 / df) * (df / (2.0 * PI * E)).sqrt() * n.powf(-1.0 / df))
}

/// Connection radius from the derivation:
/// `2 (1 + 1/ε) sqrt(2d/(πe)) (sqrt(πd)/n)^(1/d)`. Exactly twice the
/// statement's value.
pub fn sufficient_r_derivation(d: usize, eps: Eps, n: f64) -> Result<f64> {
    let df = check_d(d, 1)?;
    check_n(n)?;
    Ok(2.0 * eps.one_plus_inverse() * (2.0 * df / (PI * E)).sqrt() * ((PI * df).sqrt() / n).powf(1.0 / df))
}

/// Size of the sub-cube grid that suffices: `(sqrt(d)/2 (1-2δ)/(αδ))^d`.
pub fn grid_sufficient_size(d: usize, delta: f64, eps: Eps) -> Result<f64> {
    let df = check_d(d, 1)?;
    check_delta(delta)?;
    Ok((df.sqrt() / 2.0 * (1.0 - 2.0 * delta) / (eps.alpha() * delta)).powf(df))
}

/// Cardinality sandwich for an eps-net of a region `A`:
/// `vol(A) sqrt(πd) (sqrt(d/(2πe))/ε)^d <= |net| <= vol(A ⊕ B(ε/2)) sqrt(πd) (sqrt(2d/(πe))/ε)^d`.
pub fn net_cardinality_bounds(region_volume: f64, inflated_volume: f64, d: usize, eps: f64) -> Result<(f64, f64)> {
    let df = check_d(d, 1)?;
    if !(eps > 0.0) || region_volume < 0.0 || inflated_volume < 0.0 {
        return Err(Error::domain("net bounds need eps > 0 and nonnegative volumes"));
    }
    let s = (PI * df).sqrt();
    let lower = region_volume * s * ((df / (2.0 * PI * E)).sqrt() / eps).powf(df);
    let upper = inflated_volume * s * ((2.0 * df / (PI * E)).sqrt() / eps).powf(df);
    Ok((lower, upper))
}

/// Net bounds for the cube `[lo, lo + side]^d`, inflated by `eps/2` on each
/// side for the upper bound.
pub fn cube_net_bounds(side: f64, d: usize, eps: f64) -> Result<(f64, f64)> {
    let inflated = crate::geometry::inflated_cube_side(side, eps / 2.0)?;
    net_cardinality_bounds(side.powi(d as i32), inflated.powi(d as i32), d, eps)
}

/// Upper bound on (net size)/(grid size) at equal eps:
/// `sqrt(πd) (sqrt(8)(1+ε)/sqrt(πe))^d`.
pub fn net_vs_grid_ratio_bound(d: usize, eps: f64) -> Result<f64> {
    let df = check_d(d, 1)?;
    if !(eps > 0.0) {
        return Err(Error::domain("eps must be positive"));
    }
    Ok((PI * df).sqrt() * (8f64.sqrt() * (1.0 + eps) / (PI * E).sqrt()).powf(df))
}

/// Every closed-form quantity for one `(d, delta, eps)`.
///
/// Radii are evaluated at `n_eval = ceil(n_sufficient)`. The net bounds are
/// for an `alpha*delta`-net of `[delta, 1 - delta]^d`, whose inflated cube has
/// side `1 - (2 - alpha) delta`, so `net_upper == n_sufficient`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub d: usize,
    pub delta: f64,
    pub eps: Eps,
    pub alpha: f64,
    pub n_eval: f64,
    pub n_necessary: f64,
    pub r_necessary: f64,
    pub n_sufficient: f64,
    pub r_sufficient_stmt: f64,
    pub r_sufficient_proof: f64,
    pub grid_size: f64,
    pub net_lower: f64,
    pub net_upper: f64,
    pub ratio_bound: Option<f64>,
    pub c_d: f64,
}

impl BoundsReport {
    pub fn new(d: usize, delta: f64, eps: Eps) -> Result<Self> {
        check_d(d, 2)?;
        let alpha = eps.alpha();
        let n_sufficient = sufficient_n(d, delta, eps)?;
        let n_eval = n_sufficient.ceil().max(1.0);
        let (net_lower, net_upper) = cube_net_bounds(1.0 - 2.0 * delta, d, alpha * delta)?;
        let ratio_bound = match eps {
            Eps::Finite(e) => Some(net_vs_grid_ratio_bound(d, e)?),
            Eps::Infinite => None,
        };
        Ok(BoundsReport {
            d,
            delta,
            eps,
            alpha,
            n_eval,
            n_necessary: necessary_n(d, delta)?,
            r_necessary: necessary_r(d, delta, n_eval)?,
            n_sufficient,
            r_sufficient_stmt: sufficient_r_statement(d, eps, n_eval)?,
            r_sufficient_proof: sufficient_r_derivation(d, eps, n_eval)?,
            grid_size: grid_sufficient_size(d, delta, eps)?,
            net_lower,
            net_upper,
            ratio_bound,
            c_d: crate::geometry::unit_ball_volume(d)?.value,
        })
    }
}

/// Reference cells, as printed: lower bound, then sufficient
/// sizes at eps = inf, 1, 0.25.
const TABLE1_REFERENCE: [(f64, usize, [&str; 4]); 9] = [
    (0.25, 4, ["0", "252", "669", "22737"]),
    (0.25, 5, ["0", "1430", "4837", "3.9e5"]),
    (0.25, 6, ["0", "8781", "37930", "7.5e6"]),
    (0.1, 4, ["82", "20411", "7.15e4", "4.2e6"]),
    (0.1, 5, ["570", "3.48e5", "1.66e6", "2.6e8"]),
    (0.1, 6, ["4313", "6.41e6", "4.19e7", "1.8e10"]),
    (0.05, 4, ["2983", "4.1e5", "1.52e6", "9.9e7"]),
    (0.05, 5, ["46201", "1.46e7", "7.62e7", "1.4e10"]),
    (0.05, 6, ["7.86e5", "5.67e8", "4.13e9", "2.2e12"]),
];

pub const TABLE1_EPS: [Eps; 3] = [Eps::Infinite, Eps::Finite(1.0), Eps::Finite(0.25)];

/// A printed table cell: its value and one unit in its last printed place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrintedCell {
    pub value: f64,
    pub unit: f64,
}

impl PrintedCell {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::domain(format!("bad table cell {s:?}"));
        let (mant, exp) = match s.split_once('e') {
            Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let decimals = mant.split_once('.').map_or(0, |(_, f)| f.len()) as i32;
        let value: f64 = s.parse().map_err(|_| bad())?;
        Ok(PrintedCell { value, unit: 10f64.powi(exp - decimals) })
    }

    /// `raw` rounds (up or down) to this cell at its printed precision.
    pub fn matches(&self, raw: f64) -> bool {
        (raw - self.value).abs() < self.unit
    }

    /// Looser check: within 0.5% of the printed value or one printed unit.
    pub fn within_tolerance(&self, raw: f64) -> bool {
        (raw - self.value).abs() <= (0.005 * self.value.abs()).max(self.unit)
    }
}

/// Integers below 1e5, three significant figures above.
pub fn format_cell(x: f64) -> String {
    if x < 1e5 {
        format!("{}", x.round() as i64)
    } else {
        let e = x.log10().floor() as i32;
        let mut m = (x / 10f64.powi(e) * 100.0).round() / 100.0;
        let mut e = e;
        if m >= 10.0 {
            m /= 10.0;
            e += 1;
        }
        format!("{m:.2}e{e}")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Row {
    pub delta: f64,
    pub d: usize,
    /// Lower bound, then sufficient sizes at eps = inf, 1, 0.25.
    pub raw: [f64; 4],
    pub shown: [String; 4],
    pub printed: [PrintedCell; 4],
    pub matches: [bool; 4],
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1 {
    pub rows: Vec<Table1Row>,
}

impl Table1 {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches.iter().all(|&m| m))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "delta,d,thm1_lb,thm2_ub_inf,thm2_ub_1,thm2_ub_025,raw_thm1_lb,raw_thm2_ub_inf,raw_thm2_ub_1,raw_thm2_ub_025,matches_reference\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.delta,
                r.d,
                r.shown[0],
                r.shown[1],
                r.shown[2],
                r.shown[3],
                r.raw[0],
                r.raw[1],
                r.raw[2],
                r.raw[3],
                r.matches.iter().all(|&m| m)
            );
        }
        s
    }
}

/// Recomputes the nine-row sample-complexity table and compares each cell
/// with the reference figure. The lower-bound column is floored before
/// display, the others rounded to nearest.
pub fn table1_bench() -> Table1 {
    let rows = TABLE1_REFERENCE
        .iter()
        .map(|&(delta, d, cells)| {
            let lb = necessary_n(d, delta).expect("table parameters are valid");
            let mut raw = [lb, 0.0, 0.0, 0.0];
            for (i, eps) in TABLE1_EPS.iter().enumerate() {
                raw[i + 1] = sufficient_n(d, delta, *eps).expect("table parameters are valid");
            }
            let printed = cells.map(|c| PrintedCell::parse(c).expect("reference cells parse"));
            let shown = std::array::from_fn(|i| if i == 0 { format_cell(raw[0].floor()) } else { format_cell(raw[i]) });
            let matches = std::array::from_fn(|i| {
                let v = if i == 0 { raw[0].floor() } else { raw[i] };
                printed[i].matches(v) && printed[i].within_tolerance(raw[i])
            });
            Table1Row { delta, d, raw, shown, printed, matches }
        })
        .collect();
    Table1 { rows }
}
