//! Metric spaces that curves take values in.
//!
//! Every variant of [`Space`] implements [`Metric`]. The axiom checker is
//! generic over [`Metric`] so that deliberately broken distances can be fed
//! through it in tests.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of one of the supported spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    Vector(Vec<f64>),
    Scalar(f64),
    /// Angle in `[0, 2π)`. Use [`Point::angle`] to get the reduction.
    Angle(f64),
    Label(String),
}

impl Point {
    pub fn angle(theta: f64) -> Self {
        let mut r = theta.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs
        if r >= TAU {
            r = 0.0;
        }
        Point::Angle(r)
    }

    pub fn label(s: impl Into<String>) -> Self {
        Point::Label(s.into())
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Point::Scalar(x) => Some(*x),
            _ => None,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Point::Vector(_) => "vector",
            Point::Scalar(_) => "scalar",
            Point::Angle(_) => "angle",
            Point::Label(_) => "label",
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Vector(v) => {
                f.write_str("(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            Point::Scalar(x) => write!(f, "{x}"),
            Point::Angle(x) => write!(f, "{x}rad"),
            Point::Label(s) => f.write_str(s),
        }
    }
}

/// Anything that can measure the distance between two points.
pub trait Metric {
    fn distance(&self, p: &Point, q: &Point) -> Result<f64>;
}

impl<M: Metric + ?Sized> Metric for &M {
    fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        (**self).distance(p, q)
    }
}

/// The metric spaces a curve can map into.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Space {
    Euclidean { n: usize },
    RealLine,
    /// `|x - y|^alpha` on the real line.
    Snowflake { alpha: f64 },
    /// 0 on the diagonal, 1 elsewhere.
    Discrete,
    /// Geodesic (arc) distance on a circle of the given radius.
    Circle { radius: f64 },
}

impl Space {
    pub fn euclidean(n: usize) -> Result<Self> {
        Space::Euclidean { n }.validated()
    }

    pub fn snowflake(alpha: f64) -> Result<Self> {
        Space::Snowflake { alpha }.validated()
    }

    pub fn circle(radius: f64) -> Result<Self> {
        Space::Circle { radius }.validated()
    }

    /// Checks the variant parameters.
    pub fn validated(self) -> Result<Self> {
        match self {
            Space::Euclidean { n } if n == 0 => {
                Err(Error::Config("euclidean dimension must be positive".into()))
            }
            Space::Snowflake { alpha } if !(alpha > 0.0 && alpha <= 1.0) => Err(Error::Config(
                format!("snowflake exponent must lie in (0, 1], got {alpha}"),
            )),
            Space::Circle { radius } if !(radius > 0.0 && radius.is_finite()) => Err(
                Error::Config(format!("circle radius must be positive, got {radius}")),
            ),
            s => Ok(s),
        }
    }

    /// True for the spaces whose points are plain reals.
    pub fn is_real_valued(&self) -> bool {
        matches!(self, Space::RealLine | Space::Snowflake { .. })
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        let ok = match (self, p) {
            (Space::Euclidean { n }, Point::Vector(v)) => {
                if v.len() != *n {
                    return Err(Error::Type(format!(
                        "vector of dimension {} in euclidean({n})",
                        v.len()
                    )));
                }
                true
            }
            (Space::RealLine | Space::Snowflake { .. }, Point::Scalar(_)) => true,
            (Space::Circle { .. }, Point::Angle(a)) => (0.0..TAU).contains(a),
            (Space::Discrete, Point::Label(_)) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Type(format!("{} point {p} does not belong to {self:?}", p.kind())))
        }
    }
}

impl Metric for Space {
    fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        match (self, p, q) {
            (Space::Euclidean { n }, Point::Vector(a), Point::Vector(b)) => {
                if a.len() != *n || b.len() != *n {
                    return Err(Error::Type(format!(
                        "dimension mismatch: {} and {} in euclidean({n})",
                        a.len(),
                        b.len()
                    )));
                }
                Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
            }
            (Space::RealLine, Point::Scalar(a), Point::Scalar(b)) => Ok((a - b).abs()),
            (Space::Snowflake { alpha }, Point::Scalar(a), Point::Scalar(b)) => {
                let d = (a - b).abs();
                if *alpha == 1.0 {
                    Ok(d)
                } else {
                    Ok(d.powf(*alpha))
                }
            }
            (Space::Discrete, Point::Label(a), Point::Label(b)) => {
                Ok(if a == b { 0.0 } else { 1.0 })
            }
            (Space::Circle { radius }, Point::Angle(a), Point::Angle(b)) => {
                let diff = (a - b).abs();
                Ok(radius * diff.min(TAU - diff))
            }
            _ => Err(Error::Type(format!(
                "points {p} ({}) and {q} ({}) do not belong to {self:?}",
                p.kind(),
                q.kind()
            ))),
        }
    }
}

/// Free-function form of [`Metric::distance`] for a [`Space`].
pub fn distance(space: &Space, p: &Point, q: &Point) -> Result<f64> {
    space.distance(p, q)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum AxiomFailure {
    Symmetry { x: Point, y: Point, dxy: f64, dyx: f64 },
    Identity { x: Point, dxx: f64 },
    Positivity { x: Point, y: Point },
    Triangle { x: Point, y: Point, z: Point, dxz: f64, dxy_plus_dyz: f64 },
    Evaluation { x: Point, y: Point, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub passed: bool,
    pub checked_triples: usize,
    pub failures: Vec<AxiomFailure>,
}

/// Checks symmetry, identity, positivity and the triangle inequality over all
/// pairs and ordered triples of `samples`.
pub fn metric_axiom_report<M: Metric>(metric: &M, samples: &[Point]) -> AxiomReport {
    const SLACK: f64 = 1e-12;
    let n = samples.len();
    let mut failures = Vec::new();
    let mut table = vec![vec![f64::NAN; n]; n];

    for (i, x) in samples.iter().enumerate() {
        for (j, y) in samples.iter().enumerate() {
            match metric.distance(x, y) {
                Ok(d) => table[i][j] = d,
                Err(e) => failures.push(AxiomFailure::Evaluation {
                    x: x.clone(),
                    y: y.clone(),
                    message: e.to_string(),
                }),
            }
        }
    }
    if !failures.is_empty() {
        return AxiomReport { passed: false, checked_triples: 0, failures };
    }

    for i in 0..n {
        if table[i][i] != 0.0 {
            failures.push(AxiomFailure::Identity { x: samples[i].clone(), dxx: table[i][i] });
        }
        for j in (i + 1)..n {
            let (dij, dji) = (table[i][j], table[j][i]);
            if (dij - dji).abs() > SLACK * dij.abs().max(1.0) {
                failures.push(AxiomFailure::Symmetry {
                    x: samples[i].clone(),
                    y: samples[j].clone(),
                    dxy: dij,
                    dyx: dji,
                });
            }
            if samples[i] != samples[j] && !(dij > 0.0) {
                failures.push(AxiomFailure::Positivity {
                    x: samples[i].clone(),
                    y: samples[j].clone(),
                });
            }
        }
    }

    let mut checked = 0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                checked += 1;
                let lhs = table[i][k];
                let rhs = table[i][j] + table[j][k];
                if lhs > rhs + SLACK * rhs.max(1.0) {
                    failures.push(AxiomFailure::Triangle {
                        x: samples[i].clone(),
                        y: samples[j].clone(),
                        z: samples[k].clone(),
                        dxz: lhs,
                        dxy_plus_dyz: rhs,
                    });
                }
            }
        }
    }

    AxiomReport { passed: failures.is_empty(), checked_triples: checked, failures }
}
