//! Analytic fixture curves with exactly known variation, jumps and structure.

use std::f64::consts::TAU;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curve::{Analytic, Curve, Interval};
use crate::error::{Error, Result};
use crate::space::{Point, Space};

/// The Cantor function, evaluated from the ternary expansion of `x`.
///
/// Finite floats are dyadic rationals `m / 2^e`; when `e` is small enough the
/// expansion is carried out in exact integer arithmetic, otherwise in floating
/// point. Digits beyond the 64th contribute less than `2^-64` and are dropped.
pub fn cantor(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    match dyadic_parts(x) {
        Some((num, shift)) => cantor_dyadic(num, shift),
        None => cantor_float(x),
    }
}

/// `x = num / 2^shift` with `shift <= 120`.
fn dyadic_parts(x: f64) -> Option<(u128, u32)> {
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e2) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
    if mant == 0 {
        return Some((0, 0));
    }
    let tz = mant.trailing_zeros() as i32;
    let (mant, e2) = (mant >> tz, e2 + tz);
    // x < 1 so e2 < 0
    let shift = (-e2) as u32;
    (shift <= 120).then_some((mant as u128, shift))
}

fn cantor_dyadic(mut num: u128, shift: u32) -> f64 {
    let mask = (1u128 << shift) - 1;
    let mut acc = 0.0;
    let mut weight = 0.5;
    for _ in 0..64 {
        if num == 0 {
            break;
        }
        num *= 3;
        let digit = num >> shift;
        num &= mask;
        match digit {
            0 => {}
            1 => return acc + weight,
            _ => acc += weight,
        }
        weight *= 0.5;
    }
    acc
}

fn cantor_float(mut x: f64) -> f64 {
    let mut acc = 0.0;
    let mut weight = 0.5;
    for _ in 0..64 {
        x *= 3.0;
        let digit = x.floor();
        x -= digit;
        if digit >= 2.0 {
            acc += weight;
        } else if digit >= 1.0 {
            return acc + weight;
        }
        weight *= 0.5;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepJump {
    pub t: f64,
    /// Value taken at `t` itself.
    pub at: f64,
    /// Value taken right after `t`.
    pub after: f64,
}

/// A real-valued step function.
///
/// Either give `jumps` explicitly, or `times`/`values`: with `cadlag = true`
/// the function switches to `values[i]` at `times[i]`; with `cadlag = false`
/// it takes `values[i]` only at the instant `times[i]` and keeps its previous
/// level on both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepParams {
    pub base: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub cadlag: bool,
    pub jumps: Option<Vec<StepJump>>,
    pub lo: f64,
    pub hi: f64,
}

impl Default for StepParams {
    fn default() -> Self {
        StepParams {
            base: 0.0,
            times: vec![0.5],
            values: vec![1.0],
            cadlag: true,
            jumps: None,
            lo: 0.0,
            hi: 1.0,
        }
    }
}

impl StepParams {
    pub fn cadlag(times: Vec<f64>, values: Vec<f64>) -> Self {
        StepParams { times, values, ..Default::default() }
    }

    /// Zero everywhere except `value` at the single instant `t`.
    pub fn spike(t: f64, value: f64) -> Self {
        StepParams { times: vec![t], values: vec![value], cadlag: false, ..Default::default() }
    }

    fn resolved_jumps(&self) -> Result<Vec<StepJump>> {
        if let Some(j) = &self.jumps {
            return Ok(j.clone());
        }
        if self.times.len() != self.values.len() {
            return Err(Error::Config(format!(
                "step has {} times but {} values",
                self.times.len(),
                self.values.len()
            )));
        }
        let mut level = self.base;
        let mut out = Vec::with_capacity(self.times.len());
        for (&t, &v) in self.times.iter().zip(&self.values) {
            if self.cadlag {
                out.push(StepJump { t, at: v, after: v });
                level = v;
            } else {
                out.push(StepJump { t, at: v, after: level });
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RangeParams {
    pub lo: f64,
    pub hi: f64,
}

impl Default for RangeParams {
    fn default() -> Self {
        RangeParams { lo: 0.0, hi: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircleArcParams {
    /// Metric speed along the circle.
    pub speed: f64,
    pub radius: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Default for CircleArcParams {
    fn default() -> Self {
        CircleArcParams { speed: 1.0, radius: 1.0, lo: 0.0, hi: TAU }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SinWaveParams {
    pub amplitude: f64,
    pub frequency: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Default for SinWaveParams {
    fn default() -> Self {
        SinWaveParams { amplitude: 1.0, frequency: 1.0, lo: 0.0, hi: TAU }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StaircaseParams {
    /// Number of equal jumps, rising from 0 to 1 on `[0, 1]`.
    pub n: usize,
}

impl Default for StaircaseParams {
    fn default() -> Self {
        StaircaseParams { n: 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerParams {
    pub exponent: f64,
}

impl Default for PowerParams {
    fn default() -> Self {
        PowerParams { exponent: 2.0 / 3.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct NoParams {}

/// A named fixture curve and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "oracle", content = "params", rename_all = "snake_case")]
pub enum Oracle {
    /// Cantor function on `[0, 1]`.
    Cantor(NoParams),
    /// `t ↦ t` on the real line.
    Identity(RangeParams),
    /// Constant-speed motion along a circle.
    CircleArc(CircleArcParams),
    Step(StepParams),
    /// `amplitude · sin(frequency · t)`.
    SinWave(SinWaveParams),
    /// Cantor function plus `t` on `[0, 1]`.
    CantorPlusLinear(NoParams),
    /// `n` cadlag jumps of size `1/n` at `i/(n+1)`.
    Staircase(StaircaseParams),
    /// `t^exponent` on `[0, 1]`.
    Power(PowerParams),
}

pub const ORACLE_NAMES: [&str; 8] = [
    "cantor",
    "identity",
    "circle_arc",
    "step",
    "sin_wave",
    "cantor_plus_linear",
    "staircase",
    "power",
];

impl Oracle {
    /// Default-parameter oracle for `name`.
    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "cantor" => Oracle::Cantor(NoParams {}),
            "identity" => Oracle::Identity(RangeParams::default()),
            "circle_arc" => Oracle::CircleArc(CircleArcParams::default()),
            "step" => Oracle::Step(StepParams::default()),
            "sin_wave" => Oracle::SinWave(SinWaveParams::default()),
            "cantor_plus_linear" => Oracle::CantorPlusLinear(NoParams {}),
            "staircase" => Oracle::Staircase(StaircaseParams::default()),
            "power" => Oracle::Power(PowerParams::default()),
            other => return Err(Error::Config(format!("unknown oracle {other:?}"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Oracle::Cantor(_) => "cantor",
            Oracle::Identity(_) => "identity",
            Oracle::CircleArc(_) => "circle_arc",
            Oracle::Step(_) => "step",
            Oracle::SinWave(_) => "sin_wave",
            Oracle::CantorPlusLinear(_) => "cantor_plus_linear",
            Oracle::Staircase(_) => "staircase",
            Oracle::Power(_) => "power",
        }
    }

    /// True when the curve is one-to-one on its domain, up to the two ends of
    /// a full circle meeting.
    pub fn is_injective(&self) -> bool {
        match self {
            Oracle::Identity(_) | Oracle::CantorPlusLinear(_) | Oracle::Power(_) => true,
            Oracle::CircleArc(p) => (p.speed / p.radius * (p.hi - p.lo)).abs() <= TAU,
            Oracle::Cantor(_) | Oracle::Step(_) | Oracle::SinWave(_) | Oracle::Staircase(_) => false,
        }
    }

    pub fn curve(&self) -> Result<Curve> {
        let name = self.name();
        match self {
            Oracle::Cantor(_) => Curve::analytic(
                name,
                Space::RealLine,
                Interval::closed(0.0, 1.0),
                Analytic::continuous(|t| Point::Scalar(cantor(t)), true),
            ),
            Oracle::Identity(p) => Curve::analytic(
                name,
                Space::RealLine,
                Interval::new(p.lo, p.hi, true, true)?,
                Analytic::continuous(Point::Scalar, false),
            ),
            Oracle::CircleArc(p) => {
                let rate = p.speed / p.radius;
                Curve::analytic(
                    name,
                    Space::circle(p.radius)?,
                    Interval::new(p.lo, p.hi, true, true)?,
                    Analytic::continuous(move |t| Point::angle(rate * t), false),
                )
            }
            Oracle::SinWave(p) => {
                let SinWaveParams { amplitude, frequency, .. } = *p;
                Curve::analytic(
                    name,
                    Space::RealLine,
                    Interval::new(p.lo, p.hi, true, true)?,
                    Analytic::continuous(move |t| Point::Scalar(amplitude * (frequency * t).sin()), false),
                )
            }
            Oracle::CantorPlusLinear(_) => Curve::analytic(
                name,
                Space::RealLine,
                Interval::closed(0.0, 1.0),
                Analytic::continuous(|t| Point::Scalar(cantor(t) + t), true),
            ),
            Oracle::Power(p) => {
                let e = p.exponent;
                if !(e > 0.0) {
                    return Err(Error::Config("power exponent must be positive".into()));
                }
                Curve::analytic(
                    name,
                    Space::RealLine,
                    Interval::closed(0.0, 1.0),
                    Analytic::continuous(move |t| Point::Scalar(t.powf(e)), false),
                )
            }
            Oracle::Step(p) => step_curve(name, p),
            Oracle::Staircase(p) => {
                if p.n == 0 {
                    return Err(Error::Config("staircase needs at least one jump".into()));
                }
                let n = p.n as f64;
                let times = (1..=p.n).map(|i| i as f64 / (n + 1.0)).collect();
                let values = (1..=p.n).map(|i| i as f64 / n).collect();
                step_curve(name, &StepParams::cadlag(times, values))
            }
        }
    }
}

fn step_curve(name: &str, p: &StepParams) -> Result<Curve> {
    let jumps = Arc::new(p.resolved_jumps()?);
    let base = p.base;
    let level_before = {
        let jumps = Arc::clone(&jumps);
        move |t: f64| {
            let mut level = base;
            for j in jumps.iter() {
                if j.t < t {
                    level = j.after;
                } else {
                    break;
                }
            }
            level
        }
    };
    let eval = {
        let jumps = Arc::clone(&jumps);
        let before = level_before.clone();
        move |t: f64| match jumps.iter().find(|j| j.t == t) {
            Some(j) => Point::Scalar(j.at),
            None => Point::Scalar(before(t)),
        }
    };
    let right = {
        let jumps = Arc::clone(&jumps);
        let before = level_before.clone();
        move |t: f64| match jumps.iter().find(|j| j.t == t) {
            Some(j) => Point::Scalar(j.after),
            None => Point::Scalar(before(t)),
        }
    };
    let times = jumps.iter().map(|j| j.t).collect();
    Curve::analytic(
        name,
        Space::RealLine,
        Interval::new(p.lo, p.hi, true, true)?,
        Analytic {
            eval: Arc::new(eval),
            left_limit: Some(Arc::new(move |t| Point::Scalar(level_before(t)))),
            right_limit: Some(Arc::new(right)),
            jumps: Some(times),
            singular_continuous: Some(false),
        },
    )
}

/// Catalog entry with the analytic ground truth an oracle carries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleInfo {
    pub name: &'static str,
    pub parameters: &'static str,
    pub default_domain: Interval,
    pub declared_jumps: Vec<f64>,
    pub known_variation: f64,
    pub continuous: bool,
    pub absolutely_continuous: bool,
}

/// Every oracle at its default parameters.
pub fn catalog() -> Vec<OracleInfo> {
    let entry = |name: &'static str, parameters: &'static str, known_variation: f64| {
        let curve = Oracle::by_name(name).and_then(|o| o.curve()).expect("built-in oracle");
        let jumps = curve.declared_jumps().unwrap_or_default();
        OracleInfo {
            name,
            parameters,
            default_domain: curve.domain(),
            continuous: jumps.is_empty(),
            absolutely_continuous: curve.declared_absolutely_continuous().unwrap_or(false),
            declared_jumps: jumps,
            known_variation,
        }
    };
    vec![
        entry("cantor", "none", 1.0),
        entry("identity", "lo = 0, hi = 1", 1.0),
        entry("circle_arc", "speed = 1, radius = 1, lo = 0, hi = 2π", TAU),
        entry("step", "base = 0, times = [0.5], values = [1], cadlag = true, lo = 0, hi = 1 (or explicit jumps [{t, at, after}])", 1.0),
        entry("sin_wave", "amplitude = 1, frequency = 1, lo = 0, hi = 2π", 4.0),
        entry("cantor_plus_linear", "none", 2.0),
        entry("staircase", "n = 4", 1.0),
        entry("power", "exponent = 2/3", 1.0),
    ]
}
