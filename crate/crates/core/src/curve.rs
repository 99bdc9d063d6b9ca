//! Maps from an interval into a metric space.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Side};
use crate::space::{Metric, Point, Space};

/// A bounded interval of the real line with explicit end types.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "yes")]
    pub lo_closed: bool,
    #[serde(default = "yes")]
    pub hi_closed: bool,
}

fn yes() -> bool {
    true
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Config(format!("interval endpoints must be finite: [{lo}, {hi}]")));
        }
        if lo > hi {
            return Err(Error::Config(format!("interval has lo > hi: {lo} > {hi}")));
        }
        if lo == hi && !(lo_closed && hi_closed) {
            return Err(Error::Config(format!("degenerate interval at {lo} must be closed")));
        }
        Ok(Interval { lo, hi, lo_closed, hi_closed })
    }

    /// `[lo, hi]`. Panics on invalid endpoints.
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true).expect("valid closed interval")
    }

    /// `(lo, hi)`. Panics on invalid endpoints.
    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, false).expect("valid open interval")
    }

    /// `(lo, hi]`. Panics on invalid endpoints.
    pub fn left_open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, true).expect("valid half-open interval")
    }

    /// `[lo, hi)`. Panics on invalid endpoints.
    pub fn right_open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, false).expect("valid half-open interval")
    }

    pub fn point(t: f64) -> Self {
        Self::closed(t, t)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_closed(&self) -> bool {
        self.lo_closed && self.hi_closed
    }

    pub fn closure(&self) -> Self {
        Interval { lo_closed: true, hi_closed: true, ..*self }
    }

    pub fn contains(&self, t: f64) -> bool {
        let above = if self.lo_closed { t >= self.lo } else { t > self.lo };
        let below = if self.hi_closed { t <= self.hi } else { t < self.hi };
        above && below
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        let lo_ok = self.lo > other.lo || (self.lo == other.lo && (other.lo_closed || !self.lo_closed));
        let hi_ok = self.hi < other.hi || (self.hi == other.hi && (other.hi_closed || !self.hi_closed));
        lo_ok && hi_ok
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

pub type Evaluator = Arc<dyn Fn(f64) -> Point + Send + Sync>;

/// A curve given by closures.
///
/// `jumps = Some(list)` declares that `list` is the complete set of
/// discontinuities; limits at those times come from `left_limit` and
/// `right_limit`. `jumps = None` makes the curve a black box.
#[derive(Clone)]
pub struct Analytic {
    pub eval: Evaluator,
    pub left_limit: Option<Evaluator>,
    pub right_limit: Option<Evaluator>,
    pub jumps: Option<Vec<f64>>,
    /// Whether the speed measure has a singular continuous part, if known.
    pub singular_continuous: Option<bool>,
}

impl Analytic {
    pub fn black_box(f: impl Fn(f64) -> Point + Send + Sync + 'static) -> Self {
        Analytic {
            eval: Arc::new(f),
            left_limit: None,
            right_limit: None,
            jumps: None,
            singular_continuous: None,
        }
    }

    /// A closure declared continuous everywhere.
    pub fn continuous(f: impl Fn(f64) -> Point + Send + Sync + 'static, singular_continuous: bool) -> Self {
        Analytic {
            eval: Arc::new(f),
            left_limit: None,
            right_limit: None,
            jumps: Some(Vec::new()),
            singular_continuous: Some(singular_continuous),
        }
    }
}

#[derive(Clone)]
pub enum Body {
    Analytic(Analytic),
    /// Right-continuous and constant between sample times.
    SampledCadlag(Vec<(f64, Point)>),
    /// Linear interpolation between breakpoints; Euclidean spaces only.
    PiecewiseLinear(Vec<(f64, Vec<f64>)>),
    /// Pointwise sum of real-valued curves.
    Composite(Vec<Curve>),
}

/// A map from `domain` into `space`.
#[derive(Clone)]
pub struct Curve {
    name: String,
    space: Space,
    domain: Interval,
    body: Body,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.body {
            Body::Analytic(_) => "analytic",
            Body::SampledCadlag(_) => "sampled_cadlag",
            Body::PiecewiseLinear(_) => "piecewise_linear",
            Body::Composite(_) => "composite",
        };
        f.debug_struct("Curve")
            .field("name", &self.name)
            .field("space", &self.space)
            .field("domain", &self.domain)
            .field("body", &kind)
            .finish()
    }
}

impl Curve {
    pub fn analytic(name: impl Into<String>, space: Space, domain: Interval, body: Analytic) -> Result<Self> {
        let space = space.validated()?;
        if let Some(jumps) = &body.jumps {
            if jumps.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::Config("declared jumps must be strictly increasing".into()));
            }
            if let Some(t) = jumps.iter().find(|t| !domain.contains(**t)) {
                return Err(Error::Config(format!("declared jump {t} outside domain {domain}")));
            }
            if !jumps.is_empty() && (body.left_limit.is_none() || body.right_limit.is_none()) {
                return Err(Error::Config(
                    "declared jumps need left- and right-limit evaluators".into(),
                ));
            }
        }
        Ok(Curve { name: name.into(), space, domain, body: Body::Analytic(body) })
    }

    /// Cadlag piecewise-constant path through the samples. The domain defaults
    /// to `[first time, last time]`.
    pub fn sampled(
        name: impl Into<String>,
        space: Space,
        samples: Vec<(f64, Point)>,
        domain: Option<Interval>,
    ) -> Result<Self> {
        let space = space.validated()?;
        if samples.is_empty() {
            return Err(Error::Config("sampled curve needs at least one sample".into()));
        }
        if samples.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::Config("sample times must be strictly increasing".into()));
        }
        for (_, p) in &samples {
            space.check_point(p)?;
        }
        let domain = domain.unwrap_or_else(|| {
            Interval::closed(samples[0].0, samples[samples.len() - 1].0)
        });
        if let Some((t, _)) = samples.iter().find(|(t, _)| !domain.contains(*t)) {
            return Err(Error::Config(format!("sample time {t} outside domain {domain}")));
        }
        Ok(Curve { name: name.into(), space, domain, body: Body::SampledCadlag(samples) })
    }

    pub fn piecewise_linear(
        name: impl Into<String>,
        space: Space,
        breakpoints: Vec<(f64, Vec<f64>)>,
    ) -> Result<Self> {
        let space = space.validated()?;
        let Space::Euclidean { n } = space else {
            return Err(Error::Config("piecewise-linear curves need a euclidean space".into()));
        };
        if breakpoints.len() < 2 {
            return Err(Error::Config("piecewise-linear curve needs two breakpoints".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::Config("breakpoint times must be strictly increasing".into()));
        }
        if let Some((_, v)) = breakpoints.iter().find(|(_, v)| v.len() != n) {
            return Err(Error::Type(format!("breakpoint of dimension {} in euclidean({n})", v.len())));
        }
        let domain = Interval::closed(breakpoints[0].0, breakpoints[breakpoints.len() - 1].0);
        Ok(Curve { name: name.into(), space, domain, body: Body::PiecewiseLinear(breakpoints) })
    }

    /// Pointwise sum of real-valued curves sharing one domain.
    pub fn composite(name: impl Into<String>, parts: Vec<Curve>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Config("composite curve needs at least one part".into()))?;
        let domain = first.domain;
        for p in &parts {
            if p.space != Space::RealLine {
                return Err(Error::Config(format!("composite part {} is not real-valued", p.name)));
            }
            if p.domain != domain {
                return Err(Error::Config(format!(
                    "composite part {} has domain {} instead of {domain}",
                    p.name, p.domain
                )));
            }
        }
        Ok(Curve { name: name.into(), space: Space::RealLine, domain, body: Body::Composite(parts) })
    }

    /// Same curve restricted to a smaller domain.
    pub fn restricted(&self, domain: Interval) -> Result<Self> {
        if !domain.is_subset_of(&self.domain) {
            return Err(Error::Domain(format!("{domain} is not inside {}", self.domain)));
        }
        let mut c = self.clone();
        c.domain = domain;
        if let Body::Composite(parts) = &mut c.body {
            for p in parts {
                p.domain = domain;
            }
        }
        Ok(c)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        self.space.distance(p, q)
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        if self.domain.contains(t) {
            Ok(())
        } else {
            Err(Error::Domain(format!("t = {t} outside {}", self.domain)))
        }
    }

    pub fn eval(&self, t: f64) -> Result<Point> {
        self.check_time(t)?;
        self.eval_in_domain(t)
    }

    fn eval_in_domain(&self, t: f64) -> Result<Point> {
        match &self.body {
            Body::Analytic(a) => Ok((a.eval)(t)),
            Body::SampledCadlag(samples) => {
                let idx = samples.partition_point(|(s, _)| *s <= t);
                if idx == 0 {
                    return Err(Error::Domain(format!(
                        "t = {t} precedes the first sample at {}",
                        samples[0].0
                    )));
                }
                Ok(samples[idx - 1].1.clone())
            }
            Body::PiecewiseLinear(bp) => {
                let idx = bp.partition_point(|(s, _)| *s <= t);
                if idx == bp.len() {
                    return Ok(Point::Vector(bp[bp.len() - 1].1.clone()));
                }
                let (t0, p0) = &bp[idx - 1];
                let (t1, p1) = &bp[idx];
                let w = (t - t0) / (t1 - t0);
                Ok(Point::Vector(p0.iter().zip(p1).map(|(a, b)| a + w * (b - a)).collect()))
            }
            Body::Composite(parts) => {
                let mut sum = 0.0;
                for p in parts {
                    sum += scalar(&p.eval_in_domain(t)?)?;
                }
                Ok(Point::Scalar(sum))
            }
        }
    }

    /// The complete list of discontinuities, when the curve declares it.
    pub fn declared_jumps(&self) -> Option<Vec<f64>> {
        match &self.body {
            Body::Analytic(a) => a.jumps.clone(),
            Body::SampledCadlag(samples) => Some(
                samples
                    .windows(2)
                    .filter(|w| self.space.distance(&w[0].1, &w[1].1).map_or(true, |d| d > 0.0))
                    .map(|w| w[1].0)
                    .collect(),
            ),
            Body::PiecewiseLinear(_) => Some(Vec::new()),
            Body::Composite(parts) => {
                let mut all = Vec::new();
                for p in parts {
                    all.extend(p.declared_jumps()?);
                }
                all.sort_by(f64::total_cmp);
                all.dedup();
                Some(all)
            }
        }
    }

    /// Whether the speed measure is declared to carry a singular continuous
    /// part. `None` for black boxes.
    pub fn declared_singular_continuous(&self) -> Option<bool> {
        match &self.body {
            Body::Analytic(a) => {
                a.jumps.as_ref()?;
                a.singular_continuous
            }
            Body::SampledCadlag(_) | Body::PiecewiseLinear(_) => Some(false),
            Body::Composite(parts) => {
                let mut any = false;
                for p in parts {
                    any |= p.declared_singular_continuous()?;
                }
                Some(any)
            }
        }
    }

    /// Declared absolute continuity: no jumps and no singular continuous part.
    pub fn declared_absolutely_continuous(&self) -> Option<bool> {
        let jumps = self.declared_jumps()?;
        let sc = self.declared_singular_continuous()?;
        Some(jumps.is_empty() && !sc)
    }

    /// `(γ(t−), γ(t+))` when the curve declares them, with the endpoint
    /// convention `γ(a−) = γ(a)`, `γ(b+) = γ(b)` applied.
    pub fn exact_limits(&self, t: f64) -> Result<Option<(Point, Point)>> {
        self.check_time(t)?;
        let Some((mut left, mut right)) = self.raw_limits(t)? else {
            return Ok(None);
        };
        if t == self.domain.lo && self.domain.lo_closed {
            left = self.eval_in_domain(t)?;
        }
        if t == self.domain.hi && self.domain.hi_closed {
            right = self.eval_in_domain(t)?;
        }
        Ok(Some((left, right)))
    }

    fn raw_limits(&self, t: f64) -> Result<Option<(Point, Point)>> {
        match &self.body {
            Body::Analytic(a) => {
                let Some(jumps) = &a.jumps else { return Ok(None) };
                if jumps.binary_search_by(|j| j.total_cmp(&t)).is_ok() {
                    match (&a.left_limit, &a.right_limit) {
                        (Some(l), Some(r)) => Ok(Some((l(t), r(t)))),
                        _ => Ok(None),
                    }
                } else {
                    let v = (a.eval)(t);
                    Ok(Some((v.clone(), v)))
                }
            }
            Body::SampledCadlag(samples) => {
                let v = self.eval_in_domain(t)?;
                match samples.binary_search_by(|(s, _)| s.total_cmp(&t)) {
                    Ok(i) if i > 0 => Ok(Some((samples[i - 1].1.clone(), v))),
                    _ => Ok(Some((v.clone(), v))),
                }
            }
            Body::PiecewiseLinear(_) => {
                let v = self.eval_in_domain(t)?;
                Ok(Some((v.clone(), v)))
            }
            Body::Composite(parts) => {
                let (mut l, mut r) = (0.0, 0.0);
                for p in parts {
                    let Some((pl, pr)) = p.raw_limits(t)? else { return Ok(None) };
                    l += scalar(&pl)?;
                    r += scalar(&pr)?;
                }
                Ok(Some((Point::Scalar(l), Point::Scalar(r))))
            }
        }
    }
}

fn scalar(p: &Point) -> Result<f64> {
    p.as_scalar()
        .ok_or_else(|| Error::Type(format!("expected a real value, got {p}")))
}

/// Strictly decreasing positive step sizes used to approach a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    steps: Vec<f64>,
}

impl Schedule {
    pub fn new(steps: Vec<f64>) -> Result<Self> {
        if steps.is_empty() || steps.iter().any(|h| !(*h > 0.0)) {
            return Err(Error::Config("schedule steps must be positive".into()));
        }
        if steps.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Config("schedule must be strictly decreasing".into()));
        }
        Ok(Schedule { steps })
    }

    /// `scale · 2^-k` for `k` in `first..=last`.
    pub fn dyadic(scale: f64, first: i32, last: i32) -> Self {
        Schedule { steps: (first..=last).map(|k| scale * 2f64.powi(-k)).collect() }
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }
}

impl Default for Schedule {
    /// `2^-k`, `k = 4..=40`.
    fn default() -> Self {
        Schedule::dyadic(1.0, 4, 40)
    }
}

/// Distances from `γ(t)` to its one-sided limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpGaps {
    pub t: f64,
    pub left_gap: f64,
    pub right_gap: f64,
}

impl JumpGaps {
    pub fn continuous(t: f64) -> Self {
        JumpGaps { t, left_gap: 0.0, right_gap: 0.0 }
    }

    pub fn mass(&self) -> f64 {
        self.left_gap + self.right_gap
    }
}

/// Gap tolerance for curves whose limits are computed exactly.
pub const EXACT_GAP_TOL: f64 = 1e-9;
/// Gap tolerance for black-box evaluators.
pub const BLACK_BOX_GAP_TOL: f64 = 1e-6;

/// `d(γ(t−), γ(t))` and `d(γ(t), γ(t+))`.
///
/// Exact when the curve declares its limits, otherwise estimated along
/// `schedule`. Estimation fails with [`Error::LimitNotResolved`] instead of
/// returning a value that did not settle.
pub fn one_sided_limits(curve: &Curve, t: f64, schedule: &Schedule, gap_tol: f64) -> Result<JumpGaps> {
    if let Some((left, right)) = curve.exact_limits(t)? {
        let here = curve.eval(t)?;
        return Ok(JumpGaps {
            t,
            left_gap: curve.distance(&left, &here)?,
            right_gap: curve.distance(&here, &right)?,
        });
    }
    estimate_one_sided_limits(curve, t, schedule, gap_tol)
}

/// Numeric one-sided limits, ignoring anything the curve declares.
pub fn estimate_one_sided_limits(
    curve: &Curve,
    t: f64,
    schedule: &Schedule,
    gap_tol: f64,
) -> Result<JumpGaps> {
    if !(gap_tol > 0.0) {
        return Err(Error::Config("gap tolerance must be positive".into()));
    }
    let here = curve.eval(t)?;
    let dom = curve.domain();
    let left_gap = if t == dom.lo {
        0.0
    } else {
        estimate_side(curve, t, &here, schedule, gap_tol, Side::Left)?
    };
    let right_gap = if t == dom.hi {
        0.0
    } else {
        estimate_side(curve, t, &here, schedule, gap_tol, Side::Right)?
    };
    Ok(JumpGaps { t, left_gap, right_gap })
}

fn estimate_side(
    curve: &Curve,
    t: f64,
    here: &Point,
    schedule: &Schedule,
    gap_tol: f64,
    side: Side,
) -> Result<f64> {
    let dom = curve.domain();
    let mut history: Vec<f64> = Vec::with_capacity(4);
    for &h in schedule.steps() {
        let s = match side {
            Side::Left => t - h,
            Side::Right => t + h,
        };
        if s == t || !dom.contains(s) {
            continue;
        }
        let g = curve.distance(&curve.eval(s)?, here)?;
        history.push(g);
        let n = history.len();
        if n >= 3
            && (history[n - 1] - history[n - 2]).abs() < gap_tol
            && (history[n - 2] - history[n - 3]).abs() < gap_tol
        {
            let g = history[n - 1];
            return Ok(if g < gap_tol { 0.0 } else { g });
        }
    }
    Err(Error::LimitNotResolved { t, side })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step_sampled() -> Curve {
        Curve::sampled(
            "step",
            Space::RealLine,
            vec![(0.0, Point::Scalar(0.0)), (0.5, Point::Scalar(1.0))],
            Some(Interval::closed(0.0, 1.0)),
        )
        .unwrap()
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::new(1.0, 0.0, true, true).is_err());
        assert!(Interval::new(0.0, 0.0, true, false).is_err());
        assert!(Interval::new(0.0, f64::INFINITY, true, true).is_err());
        assert!(Interval::new(0.5, 0.5, true, true).is_ok());
    }

    #[test]
    fn interval_membership() {
        let j = Interval::left_open(0.0, 1.0);
        assert!(!j.contains(0.0));
        assert!(j.contains(1.0));
        assert!(Interval::open(0.2, 0.4).is_subset_of(&j));
        assert!(!Interval::closed(0.0, 0.4).is_subset_of(&j));
        assert!(Interval::left_open(0.0, 0.4).is_subset_of(&j));
    }

    #[test]
    fn sampled_is_cadlag() {
        let c = Curve::sampled(
            "ab",
            Space::Discrete,
            vec![(0.0, Point::label("a")), (0.5, Point::label("b"))],
            Some(Interval::closed(0.0, 1.0)),
        )
        .unwrap();
        assert_eq!(c.eval(0.4).unwrap(), Point::label("a"));
        assert_eq!(c.eval(0.5).unwrap(), Point::label("b"));
        assert_eq!(c.eval(1.0).unwrap(), Point::label("b"));
        assert!(matches!(c.eval(1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn before_first_sample_is_domain_error() {
        let c = Curve::sampled(
            "late",
            Space::RealLine,
            vec![(0.5, Point::Scalar(1.0))],
            Some(Interval::closed(0.0, 1.0)),
        )
        .unwrap();
        assert!(matches!(c.eval(0.2), Err(Error::Domain(_))));
    }

    #[test]
    fn sampled_rejects_unsorted() {
        let r = Curve::sampled(
            "bad",
            Space::RealLine,
            vec![(0.5, Point::Scalar(0.0)), (0.5, Point::Scalar(1.0))],
            None,
        );
        assert!(r.is_err());
    }

    #[test]
    fn piecewise_linear_midpoint() {
        let c = Curve::piecewise_linear(
            "diag",
            Space::Euclidean { n: 2 },
            vec![(0.0, vec![0.0, 0.0]), (1.0, vec![1.0, 1.0])],
        )
        .unwrap();
        assert_eq!(c.eval(0.5).unwrap(), Point::Vector(vec![0.5, 0.5]));
        assert_eq!(c.eval(1.0).unwrap(), Point::Vector(vec![1.0, 1.0]));
        assert!(Curve::piecewise_linear("x", Space::RealLine, vec![]).is_err());
    }

    #[test]
    fn composite_needs_common_domain() {
        let a = step_sampled();
        let b = a.restricted(Interval::closed(0.0, 0.75)).unwrap();
        assert!(Curve::composite("ab", vec![a, b]).is_err());
    }

    #[test]
    fn sampled_limits_at_sample_times() {
        let c = step_sampled();
        let g = one_sided_limits(&c, 0.5, &Schedule::default(), EXACT_GAP_TOL).unwrap();
        assert_eq!((g.left_gap, g.right_gap), (1.0, 0.0));
        let g = one_sided_limits(&c, 0.0, &Schedule::default(), EXACT_GAP_TOL).unwrap();
        assert_eq!((g.left_gap, g.right_gap), (0.0, 0.0));
    }

    #[test]
    fn numeric_limits_of_black_box_step() {
        let c = Curve::analytic(
            "bb",
            Space::RealLine,
            Interval::closed(0.0, 1.0),
            Analytic::black_box(|t| Point::Scalar(if t >= 0.5 { 1.0 } else { 0.0 })),
        )
        .unwrap();
        let g = one_sided_limits(&c, 0.5, &Schedule::default(), BLACK_BOX_GAP_TOL).unwrap();
        assert_eq!((g.left_gap, g.right_gap), (1.0, 0.0));
        let g = one_sided_limits(&c, 0.25, &Schedule::default(), BLACK_BOX_GAP_TOL).unwrap();
        assert_eq!((g.left_gap, g.right_gap), (0.0, 0.0));
    }

    #[test]
    fn oscillation_is_not_resolved() {
        let c = Curve::analytic(
            "sin(1/t)",
            Space::RealLine,
            Interval::closed(0.0, 1.0),
            Analytic::black_box(|t| Point::Scalar(if t == 0.0 { 0.0 } else { (1.0 / t).sin() })),
        )
        .unwrap();
        let e = one_sided_limits(&c, 0.0, &Schedule::default(), BLACK_BOX_GAP_TOL).unwrap_err();
        assert_eq!(e, Error::LimitNotResolved { t: 0.0, side: Side::Right });
    }

    #[test]
    fn schedule_validation() {
        assert!(Schedule::new(vec![0.5, 0.5]).is_err());
        assert!(Schedule::new(vec![0.5, -0.1]).is_err());
        assert_eq!(Schedule::default().steps().len(), 37);
    }
}
