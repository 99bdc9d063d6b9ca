//! Curve-spec files.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use speedmeasure::ac_analysis::NullSetDescriptor;
use speedmeasure::curve::{Curve, Interval};
use speedmeasure::oracle::Oracle;
use speedmeasure::space::{Point, Space};

/// A spec file that failed to parse or validate. `location` is either
/// `line:column` or a path into the document such as `curve.samples[2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub location: String,
    pub message: String,
}

impl ParseError {
    fn at(location: impl Into<String>, message: impl fmt::Display) -> Self {
        ParseError { location: location.into(), message: message.to_string() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(default)]
    space: Option<Space>,
    curve: RawCurve,
    #[serde(default)]
    domain: Option<Interval>,
    #[serde(default)]
    analyses: Vec<RawAnalysis>,
    #[serde(default)]
    null_set: Option<NullSetDescriptor>,
    #[serde(default)]
    tolerances: Tolerances,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurve {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    oracle: Option<String>,
    #[serde(default)]
    params: Option<Value>,
    #[serde(default)]
    samples: Option<Vec<(f64, Value)>>,
    #[serde(default)]
    composite: Option<Vec<RawPart>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPart {
    oracle: String,
    #[serde(default)]
    params: Option<Value>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawAnalysis {
    Name(String),
    Acp { acp: f64 },
}

/// Numerical settings; command-line flags override them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub tol: f64,
    pub max_depth: u32,
    /// Cells of the distribution-function and decomposition grids.
    pub grid: usize,
    pub blowup_bound: f64,
    pub deriv_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { tol: 1e-6, max_depth: 24, grid: 256, blowup_bound: 1e12, deriv_tol: 1e-4 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), ParseError> {
        let positive = [
            ("tolerances.tol", self.tol),
            ("tolerances.blowup_bound", self.blowup_bound),
            ("tolerances.deriv_tol", self.deriv_tol),
        ];
        for (loc, x) in positive {
            if !(x > 0.0 && x.is_finite()) {
                return Err(ParseError::at(loc, format!("must be positive and finite, got {x}")));
            }
        }
        if self.max_depth == 0 {
            return Err(ParseError::at("tolerances.max_depth", "must be positive"));
        }
        if self.grid == 0 {
            return Err(ParseError::at("tolerances.grid", "must be positive"));
        }
        Ok(())
    }
}

/// One requested analysis.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Variation,
    SpeedMeasure,
    Decompose,
    Ac,
    Luzin,
    Acp(f64),
    Verify,
}

impl Analysis {
    fn key(&self) -> String {
        match self {
            Analysis::Acp(p) => format!("acp({p})"),
            other => serde_json::to_value(other)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default(),
        }
    }
}

/// Where the curve came from; kept for the report and for oracle-only facts.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveSource {
    Oracle { oracle: Oracle },
    Samples { count: usize },
    Composite { parts: Vec<Oracle> },
}

#[derive(Debug, Clone)]
pub struct CurveSpec {
    pub curve: Curve,
    pub source: CurveSource,
    pub analyses: Vec<Analysis>,
    pub null_set: Option<NullSetDescriptor>,
    pub tolerances: Tolerances,
}

impl CurveSpec {
    /// Injective curves get an `H¹` estimate in Luzin reports.
    pub fn injective(&self) -> bool {
        match &self.source {
            CurveSource::Oracle { oracle } => oracle.is_injective(),
            _ => false,
        }
    }

    pub fn wants(&self, a: Analysis) -> bool {
        self.analyses.contains(&a)
    }
}

pub fn load(path: &Path) -> Result<CurveSpec, ParseError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ParseError::at(path.display().to_string(), format!("cannot read: {e}")))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<CurveSpec, ParseError> {
    let raw: RawSpec = serde_json::from_str(text)
        .map_err(|e| ParseError::at(format!("line {} column {}", e.line(), e.column()), strip_position(&e)))?;
    raw.tolerances.validate()?;
    let (curve, source) = build_curve(&raw)?;
    let curve = match raw.domain {
        Some(d) => {
            let d = Interval::new(d.lo, d.hi, d.lo_closed, d.hi_closed).map_err(|e| ParseError::at("domain", e))?;
            curve.restricted(d).map_err(|e| ParseError::at("domain", e))?
        }
        None => curve,
    };
    let analyses = analyses(&raw.analyses)?;
    Ok(CurveSpec { curve, source, analyses, null_set: raw.null_set, tolerances: raw.tolerances })
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_owned(),
        None => s,
    }
}

fn oracle_from(name: &str, params: Option<&Value>, loc: &str) -> Result<Oracle, ParseError> {
    let doc = serde_json::json!({
        "oracle": name,
        "params": params.cloned().unwrap_or_else(|| serde_json::json!({})),
    });
    serde_json::from_value(doc).map_err(|e| ParseError::at(loc, e))
}

fn build_curve(raw: &RawSpec) -> Result<(Curve, CurveSource), ParseError> {
    let c = &raw.curve;
    let bodies = [c.oracle.is_some(), c.samples.is_some(), c.composite.is_some()];
    match bodies.iter().filter(|b| **b).count() {
        1 => {}
        0 => return Err(ParseError::at("curve", "needs one of \"oracle\", \"samples\", \"composite\"")),
        _ => return Err(ParseError::at("curve", "give exactly one of \"oracle\", \"samples\", \"composite\"")),
    }
    if c.params.is_some() && c.oracle.is_none() {
        return Err(ParseError::at("curve.params", "parameters only apply to an oracle"));
    }
    if let Some(name) = &c.oracle {
        let oracle = oracle_from(name, c.params.as_ref(), "curve")?;
        let curve = oracle.curve().map_err(|e| ParseError::at("curve.params", e))?;
        if let Some(space) = raw.space {
            if space != *curve.space() {
                return Err(ParseError::at(
                    "space",
                    format!("oracle {name} takes values in {:?}, not {space:?}", curve.space()),
                ));
            }
        }
        if c.name.is_some() {
            return Err(ParseError::at("curve.name", "oracle curves keep their oracle name"));
        }
        return Ok((curve, CurveSource::Oracle { oracle }));
    }
    if let Some(samples) = &c.samples {
        let space = raw.space.unwrap_or(Space::RealLine);
        let space = space.validated().map_err(|e| ParseError::at("space", e))?;
        let points = samples
            .iter()
            .enumerate()
            .map(|(i, (t, v))| {
                point_from(&space, v).map(|p| (*t, p)).map_err(|m| ParseError::at(format!("curve.samples[{i}]"), m))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let name = c.name.clone().unwrap_or_else(|| "samples".into());
        let curve = Curve::sampled(name, space, points, None).map_err(|e| ParseError::at("curve.samples", e))?;
        return Ok((curve, CurveSource::Samples { count: samples.len() }));
    }
    let parts = c.composite.as_deref().unwrap_or_default();
    if let Some(space) = raw.space {
        if space != Space::RealLine {
            return Err(ParseError::at("space", "composite curves take values in the real line"));
        }
    }
    let mut oracles = Vec::with_capacity(parts.len());
    let mut curves = Vec::with_capacity(parts.len());
    for (i, p) in parts.iter().enumerate() {
        let loc = format!("curve.composite[{i}]");
        let o = oracle_from(&p.oracle, p.params.as_ref(), &loc)?;
        curves.push(o.curve().map_err(|e| ParseError::at(&loc, e))?);
        oracles.push(o);
    }
    let name = c.name.clone().unwrap_or_else(|| {
        oracles.iter().map(|o| o.name()).collect::<Vec<_>>().join("+")
    });
    let curve = Curve::composite(name, curves).map_err(|e| ParseError::at("curve.composite", e))?;
    Ok((curve, CurveSource::Composite { parts: oracles }))
}

fn point_from(space: &Space, v: &Value) -> Result<Point, String> {
    let p = match (space, v) {
        (Space::RealLine | Space::Snowflake { .. }, Value::Number(x)) => Point::Scalar(num(x)?),
        (Space::Circle { .. }, Value::Number(x)) => Point::angle(num(x)?),
        (Space::Euclidean { .. }, Value::Array(xs)) => Point::Vector(
            xs.iter()
                .map(|x| x.as_f64().ok_or_else(|| format!("vector entry {x} is not a number")))
                .collect::<Result<_, _>>()?,
        ),
        (Space::Discrete, Value::String(s)) => Point::label(s.as_str()),
        (Space::Discrete, Value::Number(x)) => Point::label(x.to_string()),
        _ => {
            let kind = serde_json::to_value(space).ok().and_then(|k| k["kind"].as_str().map(str::to_owned));
            return Err(format!("value {v} does not fit a {} space", kind.unwrap_or_default()));
        }
    };
    space.check_point(&p).map_err(|e| e.to_string())?;
    Ok(p)
}

fn num(x: &serde_json::Number) -> Result<f64, String> {
    x.as_f64().ok_or_else(|| format!("{x} is not a finite number"))
}

fn analyses(raw: &[RawAnalysis]) -> Result<Vec<Analysis>, ParseError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(raw.len());
    for (i, a) in raw.iter().enumerate() {
        let loc = format!("analyses[{i}]");
        let a = match a {
            RawAnalysis::Name(n) => match n.as_str() {
                "variation" => Analysis::Variation,
                "speed_measure" => Analysis::SpeedMeasure,
                "decompose" => Analysis::Decompose,
                "ac" => Analysis::Ac,
                "luzin" => Analysis::Luzin,
                "verify" => Analysis::Verify,
                other => return Err(ParseError::at(loc, format!("unknown analysis {other:?}"))),
            },
            RawAnalysis::Acp { acp } => {
                if !(*acp >= 1.0 && acp.is_finite()) {
                    return Err(ParseError::at(loc, format!("acp exponent must be a finite p ≥ 1, got {acp}")));
                }
                Analysis::Acp(*acp)
            }
        };
        if !seen.insert(a.key()) {
            return Err(ParseError::at(loc, format!("{} requested twice", a.key())));
        }
        out.push(a);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_spec() {
        let s = parse(r#"{"curve": {"oracle": "cantor"}, "analyses": ["decompose", "variation", "ac"]}"#).unwrap();
        assert_eq!(s.curve.name(), "cantor");
        assert_eq!(s.analyses, vec![Analysis::Variation, Analysis::Decompose, Analysis::Ac]);
        assert_eq!(s.tolerances, Tolerances::default());
    }

    #[test]
    fn samples_in_discrete_space() {
        let s = parse(
            r#"{"space": {"kind": "discrete"}, "curve": {"samples": [[0, "a"], [1, "b"], [2, "c"]]}}"#,
        )
        .unwrap();
        assert_eq!(*s.curve.space(), Space::Discrete);
        assert_eq!(s.curve.domain(), Interval::closed(0.0, 2.0));
        assert_eq!(s.source, CurveSource::Samples { count: 3 });
    }

    #[test]
    fn composite_parts() {
        let s = parse(
            r#"{"curve": {"composite": [{"oracle": "cantor"}, {"oracle": "identity"}]}, "analyses": [{"acp": 2}]}"#,
        )
        .unwrap();
        assert_eq!(s.curve.name(), "cantor+identity");
        assert_eq!(s.analyses, vec![Analysis::Acp(2.0)]);
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        let e = parse("{\n  \"curve\": {\"oracle\": \"cantor\",}\n}").unwrap_err();
        assert!(e.location.starts_with("line 2"), "{e}");
    }

    #[test]
    fn semantic_errors_carry_a_path() {
        let e = parse(r#"{"curve": {"oracle": "cantor", "samples": []}}"#).unwrap_err();
        assert_eq!(e.location, "curve");
        let e = parse(r#"{"curve": {"samples": [[0, 1], [1, "x"]]}}"#).unwrap_err();
        assert_eq!(e.location, "curve.samples[1]");
        let e = parse(r#"{"curve": {"oracle": "identity"}, "analyses": ["variation", "variation"]}"#).unwrap_err();
        assert_eq!(e.location, "analyses[1]");
        let e = parse(r#"{"curve": {"oracle": "identity"}, "tolerances": {"tol": 0}}"#).unwrap_err();
        assert_eq!(e.location, "tolerances.tol");
        let e = parse(r#"{"curve": {"oracle": "weierstrass"}}"#).unwrap_err();
        assert_eq!(e.location, "curve");
        let e = parse(r#"{"curve": {"oracle": "identity"}, "space": {"kind": "discrete"}}"#).unwrap_err();
        assert_eq!(e.location, "space");
        let e = parse(r#"{"curve": {"oracle": "identity"}, "analyses": [{"acp": 0.5}]}"#).unwrap_err();
        assert_eq!(e.location, "analyses[0]");
    }

    #[test]
    fn domain_restriction() {
        let s = parse(r#"{"curve": {"oracle": "identity"}, "domain": {"lo": 0.25, "hi": 0.5, "lo_closed": false}}"#)
            .unwrap();
        assert_eq!(s.curve.domain(), Interval::left_open(0.25, 0.5));
        let e = parse(r#"{"curve": {"oracle": "identity"}, "domain": {"lo": 0.5, "hi": 2}}"#).unwrap_err();
        assert_eq!(e.location, "domain");
    }
}
