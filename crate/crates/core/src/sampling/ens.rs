use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{build_net, Eps, NetInput, SampleSet};
use crate::error::{Error, Result};

pub const DEFAULT_DENSE_N: usize = 1_000_000;

/// Radius handed to Build-Net inside ENS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetRadius {
    /// `alpha * delta_min`, the radius the completeness argument needs.
    #[default]
    Proof,
    /// `delta_min`, as written in the algorithm listing.
    Alg2,
}

impl NetRadius {
    pub fn radius(self, alpha: f64, delta_min: f64) -> f64 {
        match self {
            NetRadius::Proof => alpha * delta_min,
            NetRadius::Alg2 => delta_min,
        }
    }
}

impl fmt::Display for NetRadius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NetRadius::Proof => "proof",
            NetRadius::Alg2 => "alg2",
        })
    }
}

impl FromStr for NetRadius {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proof" => Ok(NetRadius::Proof),
            "alg2" => Ok(NetRadius::Alg2),
            _ => Err(Error::domain(format!("net radius mode must be proof or alg2, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsParams {
    pub n: u64,
    pub d: usize,
    pub eps: Eps,
    pub delta: f64,
    pub seed: u64,
    #[serde(default)]
    pub net_radius: NetRadius,
    pub dense_n: usize,
}

impl EnsParams {
    pub fn new(n: u64, d: usize, eps: Eps, delta: f64, seed: u64) -> Self {
        EnsParams { n, d, eps, delta, seed, net_radius: NetRadius::Proof, dense_n: DEFAULT_DENSE_N }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsResult {
    pub samples: SampleSet,
    /// PRM connection radius.
    pub radius: f64,
    pub alpha: f64,
    pub n_delta: f64,
    pub delta_min: f64,
    /// The same quantity from the closed-form rearrangement; agrees with
    /// `delta_min` to rounding.
    pub delta_min_closed_form: f64,
    pub net_mode: NetRadius,
    /// Radius actually passed to Build-Net.
    pub net_radius: f64,
}

fn k0(d: usize) -> f64 {
    (2.0 * d as f64 / (PI * E)).sqrt()
}

/// Right-hand side of the size equation,
/// `sqrt(pi d) (sqrt(2d/(pi e)) (1 - (2 - alpha) delta) / (alpha delta))^d`.
pub(crate) fn sufficient_n(d: usize, alpha: f64, delta: f64) -> f64 {
    let df = d as f64;
    (PI * df).sqrt() * (k0(d) * (1.0 - (2.0 - alpha) * delta) / (alpha * delta)).powf(df)
}

fn log_gap(n: f64, d: usize, alpha: f64, delta: f64) -> f64 {
    let df = d as f64;
    0.5 * (PI * df).ln() + df * (k0(d) * (1.0 - (2.0 - alpha) * delta) / (alpha * delta)).ln() - n.ln()
}

/// Solves the size equation for `delta_min` given `n` by bisection on its
/// logarithm over `(0, 1/(2 - alpha))`, where the right-hand side falls from
/// infinity to zero.
pub fn solve_delta_min(n: f64, d: usize, alpha: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::domain("d must be >= 1"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if !(n > 0.0) || n.is_nan() {
        return Err(Error::domain(format!("n must be positive, got {n}")));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0 / (2.0 - alpha));
    while hi - lo > 1e-12 * hi.min(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if log_gap(n, d, alpha, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed-form rearrangement: with `K = sqrt(2d/(pi e)) (sqrt(pi d)/n)^(1/d)`,
/// `delta_min = K / (alpha + (2 - alpha) K)`.
pub fn delta_min_closed_form(n: f64, d: usize, alpha: f64) -> f64 {
    let df = d as f64;
    let k = k0(d) * ((PI * df).sqrt() / n).powf(1.0 / df);
    k / (alpha + (2.0 - alpha) * k)
}

/// Epsilon-net sampling: sample set and connection radius for
/// (delta, eps)-complete PRM with a budget of `n` samples.
pub fn ens(p: &EnsParams) -> Result<EnsResult> {
    if p.d == 0 {
        return Err(Error::domain("d must be >= 1"));
    }
    if p.n == 0 {
        return Err(Error::domain("n must be >= 1"));
    }
    if !(p.delta > 0.0 && p.delta < 0.5) {
        return Err(Error::domain(format!("delta must lie in (0, 1/2), got {}", p.delta)));
    }
    if let Eps::Finite(e) = p.eps {
        if !(e > 0.0) {
            return Err(Error::domain("eps must be positive"));
        }
    }
    let alpha = p.eps.alpha();
    let n_delta = sufficient_n(p.d, alpha, p.delta).min(p.n as f64);
    if n_delta < 1.0 {
        return Err(Error::domain(format!("n_delta = {n_delta} < 1: no sample budget")));
    }
    let delta_min = solve_delta_min(n_delta, p.d, alpha)?;
    if delta_min >= 0.5 {
        return Err(Error::domain(format!("delta_min = {delta_min} leaves no interior region")));
    }
    let radius = 2.0 * (alpha + (1.0 - alpha * alpha).max(0.0).sqrt()) * delta_min;
    let net_radius = p.net_radius.radius(alpha, delta_min);
    let region = NetInput::Region {
        lo: vec![delta_min; p.d],
        hi: vec![1.0 - delta_min; p.d],
        dense_n: p.dense_n,
    };
    let mut samples = build_net(&region, net_radius, p.seed)?;
    samples.generator = "ens".into();
    let extra = [
        ("n", serde_json::Value::from(p.n)),
        ("eps", serde_json::to_value(p.eps).expect("eps serializes")),
        ("delta", p.delta.into()),
        ("net_mode", p.net_radius.to_string().into()),
        ("dense_n", p.dense_n.into()),
        ("alpha", alpha.into()),
        ("n_delta", n_delta.into()),
        ("delta_min", delta_min.into()),
        ("radius", radius.into()),
        ("net_radius", net_radius.into()),
    ];
    for (k, v) in extra {
        samples.params.insert(k.into(), v);
    }
    Ok(EnsResult {
        samples,
        radius,
        alpha,
        n_delta,
        delta_min,
        delta_min_closed_form: delta_min_closed_form(n_delta, p.d, alpha),
        net_mode: p.net_radius,
        net_radius,
    })
}
