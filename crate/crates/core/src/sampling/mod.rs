//! Sample-set generators: greedy nets, Sukharev grids, ENS and templates.

mod ens;
mod grid;
mod net;
mod template;

pub use ens::{ens, solve_delta_min, delta_min_closed_form, EnsParams, EnsResult, NetRadius, DEFAULT_DENSE_N};
pub(crate) use ens::sufficient_n as ens_sufficient_n;
pub use grid::{grid, GridSpec};
pub use net::{build_net, greedy_net, NetInput};
pub use template::{replicate_template, Template};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::error::{check_dim, Error, Result};
use crate::geometry::Point;

/// Stretch tolerance. `Infinite` stands for feasibility-only planning and
/// maps to `alpha = 1` analytically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eps {
    Finite(f64),
    Infinite,
}

impl Eps {
    pub fn new(eps: f64) -> Result<Self> {
        if eps == f64::INFINITY {
            Ok(Eps::Infinite)
        } else if eps > 0.0 && eps.is_finite() {
            Ok(Eps::Finite(eps))
        } else {
            Err(Error::domain(format!("eps must be positive or inf, got {eps}")))
        }
    }

    /// `alpha = eps / sqrt(1 + eps^2)`, with `alpha = 1` at infinity.
    pub fn alpha(self) -> f64 {
        match self {
            Eps::Finite(e) => e / (1.0 + e * e).sqrt(),
            Eps::Infinite => 1.0,
        }
    }

    /// `1 + 1/eps`, which is exactly 1 at infinity.
    pub fn one_plus_inverse(self) -> f64 {
        match self {
            Eps::Finite(e) => 1.0 + 1.0 / e,
            Eps::Infinite => 1.0,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Eps::Finite(e) => e,
            Eps::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Eps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eps::Finite(e) => write!(f, "{e}"),
            Eps::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Eps {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "Inf" | "infinity" | "∞" => Ok(Eps::Infinite),
            t => {
                let v: f64 = t
                    .parse()
                    .map_err(|_| Error::domain(format!("cannot parse eps from {s:?}")))?;
                Eps::new(v)
            }
        }
    }
}

impl Serialize for Eps {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Eps::Finite(e) => s.serialize_f64(*e),
            Eps::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Eps {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::Number(n) => Eps::new(n.as_f64().unwrap_or(f64::NAN)).map_err(serde::de::Error::custom),
            Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            other => Err(serde::de::Error::custom(format!("invalid eps {other}"))),
        }
    }
}

/// A finite set of configurations with the generator that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SampleSetJson", into = "SampleSetJson")]
pub struct SampleSet {
    pub dim: usize,
    pub points: Vec<Point>,
    pub generator: String,
    pub params: Map<String, Value>,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct SampleSetJson {
    dim: usize,
    n: usize,
    generator: String,
    #[serde(default)]
    params: Map<String, Value>,
    #[serde(default)]
    seed: u64,
    points: Vec<Point>,
}

impl TryFrom<SampleSetJson> for SampleSet {
    type Error = Error;

    fn try_from(j: SampleSetJson) -> Result<Self> {
        if j.n != j.points.len() {
            return Err(Error::domain(format!("sample set declares n={} but has {} points", j.n, j.points.len())));
        }
        SampleSet::new(j.dim, j.points, j.generator, j.params, j.seed)
    }
}

impl From<SampleSet> for SampleSetJson {
    fn from(s: SampleSet) -> Self {
        SampleSetJson {
            dim: s.dim,
            n: s.points.len(),
            generator: s.generator,
            params: s.params,
            seed: s.seed,
            points: s.points,
        }
    }
}

impl SampleSet {
    pub fn new(
        dim: usize,
        points: Vec<Point>,
        generator: impl Into<String>,
        params: Map<String, Value>,
        seed: u64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("sample sets need d >= 1"));
        }
        for p in &points {
            check_dim(dim, p.dim())?;
        }
        Ok(SampleSet {
            dim,
            points,
            generator: generator.into(),
            params,
            seed,
        })
    }

    /// Sample set without provenance, e.g. hand-written test inputs.
    pub fn from_points(dim: usize, points: Vec<Point>) -> Result<Self> {
        SampleSet::new(dim, points, "explicit", Map::new(), 0)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Row-major coordinate buffer.
    pub fn flat(&self) -> Vec<f64> {
        self.points.iter().flat_map(|p| p.coords().iter().copied()).collect()
    }

    pub fn in_unit_cube(&self) -> bool {
        self.points.iter().all(|p| p.in_unit_cube(0.0))
    }
}

#[cfg(test)]
pub(crate) fn points_from_flat(dim: usize, flat: &[f64]) -> Vec<Point> {
    flat.chunks_exact(dim).map(|c| Point::from_vec(c.to_vec())).collect()
}

pub(crate) fn params(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_parsing_and_alpha() {
        assert_eq!("inf".parse::<Eps>().unwrap(), Eps::Infinite);
        assert_eq!("0.25".parse::<Eps>().unwrap(), Eps::Finite(0.25));
        assert!("0".parse::<Eps>().is_err());
        assert!("-1".parse::<Eps>().is_err());
        assert_eq!(Eps::Infinite.alpha(), 1.0);
        assert!((Eps::Finite(1.0).alpha() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(Eps::new(f64::INFINITY).unwrap(), Eps::Infinite);
    }

    #[test]
    fn alpha_is_increasing_and_below_one() {
        let mut prev = 0.0;
        for i in -60..=60 {
            let eps = 10f64.powf(i as f64 / 10.0);
            let a = Eps::Finite(eps).alpha();
            assert!(a > prev && a < 1.0, "eps={eps}");
            prev = a;
        }
        assert!(1.0 - Eps::Finite(1e6).alpha() < 1e-11);
    }

    #[test]
    fn sample_set_json_shape() {
        let s = SampleSet::new(
            2,
            vec![Point::new(vec![0.1, 0.2]).unwrap()],
            "grid",
            params(&[("w", 0.5.into())]),
            7,
        )
        .unwrap();
        let v: Value = serde_json::to_value(&s).unwrap();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["n"], 1);
        assert_eq!(v["generator"], "grid");
        assert_eq!(v["seed"], 7);
        assert_eq!(v["points"][0][1], 0.2);
        let back: SampleSet = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);

        let bad = r#"{"dim":2,"n":3,"generator":"x","params":{},"seed":0,"points":[[0.1,0.2]]}"#;
        assert!(serde_json::from_str::<SampleSet>(bad).is_err());
        let wrong_dim = r#"{"dim":3,"n":1,"generator":"x","params":{},"seed":0,"points":[[0.1,0.2]]}"#;
        assert!(serde_json::from_str::<SampleSet>(wrong_dim).is_err());
    }

    #[test]
    fn eps_json() {
        assert_eq!(serde_json::to_string(&Eps::Infinite).unwrap(), "\"inf\"");
        assert_eq!(serde_json::from_str::<Eps>("0.5").unwrap(), Eps::Finite(0.5));
        assert_eq!(serde_json::from_str::<Eps>("\"inf\"").unwrap(), Eps::Infinite);
    }
}
