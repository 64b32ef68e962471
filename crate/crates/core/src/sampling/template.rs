use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{params, SampleSet};
use crate::error::{check_dim, Error, Result};
use crate::geometry::Point;

/// Periodic covering seed: a point set in `[0,1]^d` meant to cover its cell
/// at radius `sqrt(d) / (2k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TemplateJson", into = "TemplateJson")]
pub struct Template {
    pub dim: usize,
    pub k: u32,
    pub points: Vec<Point>,
    pub cover_radius: f64,
    pub params: Map<String, Value>,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct TemplateJson {
    dim: usize,
    n: usize,
    #[serde(default = "template_tag")]
    generator: String,
    #[serde(default)]
    params: Map<String, Value>,
    #[serde(default)]
    seed: u64,
    points: Vec<Point>,
    k: u32,
    cover_radius: f64,
}

fn template_tag() -> String {
    "template".into()
}

impl TryFrom<TemplateJson> for Template {
    type Error = Error;

    fn try_from(j: TemplateJson) -> Result<Self> {
        if j.n != j.points.len() {
            return Err(Error::domain(format!("template declares n={} but has {} points", j.n, j.points.len())));
        }
        let mut t = Template::new(j.dim, j.k, j.points)?;
        t.cover_radius = j.cover_radius;
        t.params = j.params;
        t.seed = j.seed;
        Ok(t)
    }
}

impl From<Template> for TemplateJson {
    fn from(t: Template) -> Self {
        TemplateJson {
            dim: t.dim,
            n: t.points.len(),
            generator: template_tag(),
            params: t.params,
            seed: t.seed,
            points: t.points,
            k: t.k,
            cover_radius: t.cover_radius,
        }
    }
}

impl Template {
    pub fn new(dim: usize, k: u32, points: Vec<Point>) -> Result<Self> {
        if dim == 0 || k == 0 {
            return Err(Error::domain("template needs d >= 1 and k >= 1"));
        }
        for p in &points {
            check_dim(dim, p.dim())?;
            if !p.in_unit_cube(0.0) {
                return Err(Error::domain("template points must lie in [0,1]^d"));
            }
        }
        Ok(Template {
            dim,
            k,
            points,
            cover_radius: Template::radius_for(dim, k),
            params: Map::new(),
            seed: 0,
        })
    }

    /// `sqrt(d) / (2k)`: the half-diagonal of a cell of side `1/k`.
    pub fn radius_for(dim: usize, k: u32) -> f64 {
        (dim as f64).sqrt() / (2.0 * k as f64)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_sample_set(&self) -> SampleSet {
        let mut meta = self.params.clone();
        meta.insert("k".into(), self.k.into());
        meta.insert("cover_radius".into(), self.cover_radius.into());
        SampleSet {
            dim: self.dim,
            points: self.points.clone(),
            generator: "template".into(),
            params: meta,
            seed: self.seed,
        }
    }
}

/// The `m^d` translates `(t + offset) / m`, `offset` in `{0..m-1}^d`. The
/// result covers `[0,1]^d` at `t.cover_radius / m` wherever the template
/// covers its own cell.
pub fn replicate_template(t: &Template, m: u32) -> Result<SampleSet> {
    if m == 0 {
        return Err(Error::domain("replication factor must be >= 1"));
    }
    let d = t.dim;
    let cells = (m as usize)
        .checked_pow(d as u32)
        .and_then(|c| c.checked_mul(t.len()))
        .ok_or_else(|| Error::domain("replicated set is too large"))?;
    let mut points = Vec::with_capacity(cells);
    let inv = 1.0 / m as f64;
    let mut off = vec![0u32; d];
    loop {
        for p in &t.points {
            let c = p.coords().iter().zip(&off).map(|(&x, &o)| if m == 1 { x } else { (x + o as f64) * inv }).collect();
            points.push(Point::from_vec(c));
        }
        let mut a = d;
        loop {
            if a == 0 {
                let meta = params(&[
                    ("k", t.k.into()),
                    ("m", m.into()),
                    ("cover_radius", (t.cover_radius * inv).into()),
                ]);
                return SampleSet::new(d, points, "replicate", meta, t.seed);
            }
            a -= 1;
            off[a] += 1;
            if off[a] < m {
                break;
            }
            off[a] = 0;
        }
    }
}
