//! Absolute continuity at three levels: chord sums over interval families,
//! `ν ≪ λ` on finite unions of cells, and images of nested null covers.

use serde::{Deserialize, Serialize};

use crate::curve::{one_sided_limits, Curve, Interval};
use crate::decomposition::{decompose_interval, DecompositionOptions};
use crate::error::{Error, Result};
use crate::space::Point;
use crate::speed_measure::{build_speed_measure, Atom, SpeedMeasure, SpeedMeasureOptions};

/// Closed intervals with pairwise disjoint interiors, sorted by position.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct IntervalFamily {
    pairs: Vec<(f64, f64)>,
}

impl IntervalFamily {
    pub fn new(mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &pairs {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::Config(format!("bad family interval ({a}, {b})")));
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        if let Some(w) = pairs.windows(2).find(|w| w[1].0 < w[0].1) {
            return Err(Error::Config(format!("family intervals {:?} and {:?} overlap", w[0], w[1])));
        }
        Ok(IntervalFamily { pairs })
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.pairs.iter().map(|(a, b)| b - a).sum()
    }

    /// `Σ d(γ(b_k), γ(a_k))`.
    pub fn chord_sum(&self, curve: &Curve) -> Result<f64> {
        let mut s = 0.0;
        for &(a, b) in &self.pairs {
            s += curve.distance(&curve.eval(a)?, &curve.eval(b)?)?;
        }
        Ok(s)
    }

    /// Whether each interval lies inside some interval of `outer`.
    pub fn is_covered_by(&self, outer: &IntervalFamily) -> bool {
        let mut j = 0;
        for &(a, b) in &self.pairs {
            while j < outer.pairs.len() && outer.pairs[j].1 < b {
                j += 1;
            }
            match outer.pairs.get(j) {
                Some(&(oa, ob)) if oa <= a && b <= ob => {}
                _ => return false,
            }
        }
        true
    }
}

/// Interval covers, each inside the previous, with total length decreasing
/// toward zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NestedNullSet {
    generations: Vec<IntervalFamily>,
}

impl NestedNullSet {
    pub fn new(generations: Vec<IntervalFamily>) -> Result<Self> {
        if generations.is_empty() {
            return Err(Error::Config("null set needs at least one generation".into()));
        }
        for (g, w) in generations.windows(2).enumerate() {
            if !w[1].is_covered_by(&w[0]) {
                return Err(Error::Config(format!("generation {} is not covered by generation {g}", g + 1)));
            }
            if !(w[1].total_length() < w[0].total_length()) {
                return Err(Error::Config(format!("total length does not shrink at generation {}", g + 1)));
            }
        }
        Ok(NestedNullSet { generations })
    }

    /// Middle-thirds generations `0..=depth` of `[lo, hi]`.
    pub fn cantor_generations(lo: f64, hi: f64, depth: u32) -> Result<Self> {
        let mut gens = vec![IntervalFamily::new(vec![(lo, hi)])?];
        for _ in 0..depth {
            let prev = gens.last().expect("nonempty");
            let mut next = Vec::with_capacity(2 * prev.len());
            for &(a, b) in prev.pairs() {
                let third = (b - a) / 3.0;
                next.push((a, a + third));
                next.push((b - third, b));
            }
            gens.push(IntervalFamily::new(next)?);
        }
        Self::new(gens)
    }

    /// `[t − r 2^-g, t + r 2^-g]` for `g = 0..=depth`.
    pub fn around_point(t: f64, radius: f64, depth: u32) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Config("radius must be positive".into()));
        }
        let gens = (0..=depth)
            .map(|g| {
                let r = radius * 2f64.powi(-(g as i32));
                IntervalFamily::new(vec![(t - r, t + r)])
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(gens)
    }

    pub fn generations(&self) -> &[IntervalFamily] {
        &self.generations
    }
}

/// Serialized form of a null set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NullSetDescriptor {
    CantorGenerations {
        depth: u32,
        #[serde(default)]
        lo: Option<f64>,
        #[serde(default)]
        hi: Option<f64>,
    },
    AroundPoint {
        t: f64,
        radius: f64,
        depth: u32,
    },
    Intervals {
        generations: Vec<Vec<(f64, f64)>>,
    },
}

impl NullSetDescriptor {
    /// Builds the cover; Cantor generations default to the given domain.
    pub fn build(&self, domain: Interval) -> Result<NestedNullSet> {
        match self {
            NullSetDescriptor::CantorGenerations { depth, lo, hi } => {
                NestedNullSet::cantor_generations(lo.unwrap_or(domain.lo), hi.unwrap_or(domain.hi), *depth)
            }
            NullSetDescriptor::AroundPoint { t, radius, depth } => NestedNullSet::around_point(*t, *radius, *depth),
            NullSetDescriptor::Intervals { generations } => NestedNullSet::new(
                generations
                    .iter()
                    .map(|g| IntervalFamily::new(g.clone()))
                    .collect::<Result<Vec<_>>>()?,
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeOptions {
    /// Largest number of cells per level.
    pub budget: usize,
    pub bases: Vec<u32>,
    /// Cells within this relative distance of the last chord needed join the
    /// witness.
    pub tie_tol: f64,
    /// A violation is reported when `δ` shrinks by at least this factor over
    /// `span` levels.
    pub shrink: f64,
    pub span: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { budget: 1 << 20, bases: vec![2, 3], tie_tol: 1e-6, shrink: 0.5, span: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessSource {
    Atoms,
    Cells { base: u32, level: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub source: WitnessSource,
    pub total_length: f64,
    pub chord_sum: f64,
    pub family: IntervalFamily,
}

/// `δ` needed at one level of `b`-adic cells: the smallest total length of a
/// greedy family whose chords exceed `ε`, interpolated inside the last cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeLevel {
    pub base: u32,
    pub level: u32,
    pub cells: usize,
    /// `None` when the chords of all cells together stay below `ε`.
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub epsilon: f64,
    pub delta: f64,
    pub violation: bool,
    /// Re-evaluated from scratch before reporting.
    pub witness_sound: bool,
    pub witness: Option<Witness>,
    pub levels: Vec<ProbeLevel>,
}

/// Searches for interval families with small total length and chord sum
/// above `ε`.
pub fn ac_probe(curve: &Curve, epsilon: f64, opts: &ProbeOptions) -> Result<ProbeReport> {
    let atoms = atoms_of(curve)?;
    probe_with_atoms(curve, epsilon, &atoms, opts)
}

fn atoms_of(curve: &Curve) -> Result<Vec<Atom>> {
    match curve.declared_jumps() {
        Some(jumps) => {
            let mut out = Vec::new();
            for t in jumps {
                let g = one_sided_limits(curve, t, &Default::default(), 1e-9)?;
                if g.mass() > 0.0 {
                    out.push(Atom::from(g));
                }
            }
            Ok(out)
        }
        None => Ok(build_speed_measure(curve, &SpeedMeasureOptions::default())?.atoms().to_vec()),
    }
}

fn inside(d: Interval, t: f64) -> f64 {
    if d.contains(t) {
        t
    } else if t <= d.lo {
        d.lo + d.width() * 1e-12
    } else {
        d.hi - d.width() * 1e-12
    }
}

fn straddle_witness(curve: &Curve, epsilon: f64, atoms: &[Atom]) -> Result<Option<Witness>> {
    let d = curve.domain();
    let h = d.width() * 2f64.powi(-30);
    let mut order: Vec<&Atom> = atoms.iter().collect();
    order.sort_by(|a, b| b.mass.total_cmp(&a.mass));
    let mut pairs = Vec::new();
    let mut sum = 0.0;
    for a in order {
        let (l, r) = (inside(d, a.t - h).min(a.t), inside(d, a.t + h).max(a.t));
        let single = vec![(l, r)];
        let split: Vec<(f64, f64)> = [(l, a.t), (a.t, r)].into_iter().filter(|(x, y)| x < y).collect();
        let mut best = (0.0, Vec::new());
        for cand in [single, split] {
            if cand.is_empty() {
                continue;
            }
            let s = IntervalFamily::new(cand.clone())?.chord_sum(curve)?;
            if s > best.0 {
                best = (s, cand);
            }
        }
        sum += best.0;
        pairs.extend(best.1);
        if sum > epsilon {
            let family = IntervalFamily::new(pairs)?;
            return Ok(Some(Witness {
                source: WitnessSource::Atoms,
                total_length: family.total_length(),
                chord_sum: sum,
                family,
            }));
        }
    }
    Ok(None)
}

fn finest_level(base: u32, budget: usize) -> u32 {
    let mut level = 0;
    let mut n = 1usize;
    while n.saturating_mul(base as usize) <= budget {
        n *= base as usize;
        level += 1;
    }
    level
}

/// Interpolated `δ` for values sorted in decreasing order, each on a cell of
/// width `w`.
fn greedy_delta(sorted: &[f64], w: f64, epsilon: f64) -> Option<(f64, usize)> {
    let mut acc = 0.0;
    for (k, &c) in sorted.iter().enumerate() {
        if acc + c > epsilon {
            return Some((w * (k as f64 + (epsilon - acc) / c), k));
        }
        acc += c;
    }
    None
}

pub(crate) fn probe_with_atoms(curve: &Curve, epsilon: f64, atoms: &[Atom], opts: &ProbeOptions) -> Result<ProbeReport> {
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let d = curve.domain();
    if let Some(w) = straddle_witness(curve, epsilon, atoms)? {
        let sound = check_witness(curve, &w, epsilon)?;
        return Ok(ProbeReport {
            epsilon,
            delta: 0.0,
            violation: true,
            witness_sound: sound,
            witness: Some(w),
            levels: Vec::new(),
        });
    }

    let mut levels = Vec::new();
    let mut best: Option<(f64, u32, u32)> = None; // (shrink ratio, base, level)
    for &base in &opts.bases {
        let top = finest_level(base, opts.budget);
        if top == 0 {
            continue;
        }
        let vals = eval_grid(curve, base, top)?;
        let mut deltas = Vec::new();
        for level in 1..=top {
            let chords = level_chords(curve, &vals, base.pow(top - level) as usize)?;
            let mut sorted = chords;
            sorted.sort_by(|a, b| b.total_cmp(a));
            let w = d.width() / sorted.len() as f64;
            let delta = greedy_delta(&sorted, w, epsilon).map(|(delta, _)| delta);
            deltas.push(delta);
            levels.push(ProbeLevel { base, level, cells: sorted.len(), delta });
        }
        let n = deltas.len();
        if n > opts.span {
            if let (Some(fine), Some(coarse)) = (deltas[n - 1], deltas[n - 1 - opts.span]) {
                let ratio = fine / coarse;
                if ratio <= opts.shrink && best.map_or(true, |b| ratio < b.0) {
                    best = Some((ratio, base, top));
                }
            }
        }
    }

    let Some((_, base, level)) = best else {
        let delta = levels.iter().filter_map(|l| l.delta).fold(d.width(), f64::min);
        return Ok(ProbeReport { epsilon, delta, violation: false, witness_sound: true, witness: None, levels });
    };
    let w = cell_witness(curve, epsilon, base, level, opts.tie_tol)?;
    let sound = check_witness(curve, &w, epsilon)?;
    Ok(ProbeReport { epsilon, delta: 0.0, violation: sound, witness_sound: sound, witness: Some(w), levels })
}

fn grid_points(d: Interval, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| if i == n { d.hi } else { d.lo + d.width() * (i as f64 / n as f64) })
        .collect()
}

fn eval_grid(curve: &Curve, base: u32, level: u32) -> Result<Vec<Point>> {
    let d = curve.domain();
    grid_points(d, (base as usize).pow(level))
        .into_iter()
        .map(|t| curve.eval(inside(d, t)))
        .collect()
}

fn level_chords(curve: &Curve, vals: &[Point], stride: usize) -> Result<Vec<f64>> {
    let n = (vals.len() - 1) / stride;
    (0..n)
        .map(|i| curve.distance(&vals[i * stride], &vals[(i + 1) * stride]))
        .collect()
}

fn cell_witness(curve: &Curve, epsilon: f64, base: u32, level: u32, tie_tol: f64) -> Result<Witness> {
    let d = curve.domain();
    let n = (base as usize).pow(level);
    let pts = grid_points(d, n);
    let vals = eval_grid(curve, base, level)?;
    let chords = level_chords(curve, &vals, 1)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| chords[b].total_cmp(&chords[a]));
    let sorted: Vec<f64> = order.iter().map(|&i| chords[i]).collect();
    let (_, k) = greedy_delta(&sorted, d.width() / n as f64, epsilon)
        .ok_or_else(|| Error::Inconsistency("witness level lost its violating family".into()))?;
    let cut = sorted[k] * (1.0 - tie_tol);
    let take = k + 1 + sorted[k + 1..].iter().take_while(|&&c| c >= cut).count();
    let pairs = order[..take].iter().map(|&i| (inside(d, pts[i]), inside(d, pts[i + 1]))).collect();
    let family = IntervalFamily::new(pairs)?;
    Ok(Witness {
        source: WitnessSource::Cells { base, level },
        total_length: family.total_length(),
        chord_sum: sorted[..take].iter().sum(),
        family,
    })
}

/// Recomputes the witness from the curve alone.
fn check_witness(curve: &Curve, w: &Witness, epsilon: f64) -> Result<bool> {
    let d = curve.domain();
    let within = w.family.pairs().iter().all(|&(a, b)| d.contains(a) && d.contains(b));
    let chord = w.family.chord_sum(curve)?;
    let length = w.family.total_length();
    Ok(within
        && chord > epsilon
        && (chord - w.chord_sum).abs() <= 1e-9 * chord.max(1.0)
        && (length - w.total_length).abs() <= 1e-12 * length.max(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureTestRow {
    pub delta: f64,
    /// Largest `ν(F)` over candidate unions with `λ(F) ≤ δ`.
    pub max_nu: f64,
    pub lebesgue: f64,
    pub base: u32,
    pub level: u32,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureTestReport {
    pub epsilon: f64,
    pub rows: Vec<MeasureTestRow>,
    /// Some `δ` in the grid keeps `ν(F) ≤ ε` on every candidate.
    pub passes: bool,
    pub best_delta: Option<f64>,
}

/// `ε·2^-j` for `j = 0..=6`.
pub fn default_delta_grid(epsilon: f64) -> Vec<f64> {
    (0..=6).map(|j| epsilon * 2f64.powi(-j)).collect()
}

/// Evidence for `ν ≪ λ`: greedy unions of `b`-adic cells ranked by `ν`.
pub fn ac_measure_test(nu: &SpeedMeasure, epsilon: f64, delta_grid: &[f64], budget: usize) -> Result<MeasureTestReport> {
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let d = nu.domain();
    let slack = nu.options().variation.tol;
    let mut rows: Vec<MeasureTestRow> = delta_grid
        .iter()
        .map(|&delta| MeasureTestRow { delta, max_nu: 0.0, lebesgue: 0.0, base: 0, level: 0, passes: true })
        .collect();
    for base in [2u32, 3] {
        let top = finest_level(base, budget);
        if top == 0 {
            continue;
        }
        let n = (base as usize).pow(top);
        let pts = grid_points(d, n);
        let cells = pts
            .windows(2)
            .enumerate()
            .map(|(i, w)| Interval::new(w[0], w[1], i == 0 && d.lo_closed, i + 1 < n || d.hi_closed))
            .collect::<Result<Vec<_>>>()?;
        let mut masses = nu.masses(&cells)?;
        for level in (1..=top).rev() {
            let w = d.width() / masses.len() as f64;
            let mut sorted = masses.clone();
            sorted.sort_by(|a, b| b.total_cmp(a));
            for row in rows.iter_mut() {
                let k = ((row.delta / w) * (1.0 + 1e-12)).floor() as usize;
                let k = k.min(sorted.len());
                let m: f64 = sorted[..k].iter().sum();
                if m > row.max_nu {
                    *row = MeasureTestRow { max_nu: m, lebesgue: k as f64 * w, base, level, ..*row };
                }
            }
            if level > 1 {
                masses = masses.chunks(base as usize).map(|c| c.iter().sum()).collect();
            }
        }
    }
    for row in rows.iter_mut() {
        row.passes = row.max_nu <= epsilon + slack;
    }
    let best_delta = rows.iter().filter(|r| r.passes).map(|r| r.delta).fold(None, |acc: Option<f64>, x| {
        Some(acc.map_or(x, |a| a.max(x)))
    });
    Ok(MeasureTestReport { epsilon, passes: best_delta.is_some(), best_delta, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcOptions {
    pub speed: SpeedMeasureOptions,
    pub decomposition: DecompositionOptions,
    pub probe: ProbeOptions,
    pub measure_budget: usize,
}

impl Default for AcOptions {
    fn default() -> Self {
        AcOptions {
            speed: SpeedMeasureOptions::default(),
            decomposition: DecompositionOptions::default(),
            probe: ProbeOptions::default(),
            measure_budget: 1 << 18,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certainty {
    /// Decided by what the curve declares about its jumps and singular part.
    Exact,
    EvidenceBased,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BzVerdict {
    pub bounded_variation: bool,
    pub total_variation: Option<f64>,
    pub atoms: usize,
    pub sc_mass: Option<f64>,
    pub epsilon: Option<f64>,
    pub probe: Option<ProbeReport>,
    pub measure_test: Option<MeasureTestReport>,
    pub numeric_ac: bool,
    pub declared_ac: Option<bool>,
    pub ac_loc: bool,
    pub certainty: Certainty,
    /// Probe, measure test, atoms and singular mass tell the same story, and
    /// agree with any declaration.
    pub consistent: bool,
}

/// `AC_loc ⇔ BV_loc ∧ ν ≪ λ`, assembled from every available check.
pub fn banach_zaretsky_verdict(curve: &Curve, nu: Option<&SpeedMeasure>, opts: &AcOptions) -> Result<BzVerdict> {
    let declared_ac = curve.declared_absolutely_continuous();
    let certainty = if declared_ac.is_some() { Certainty::Exact } else { Certainty::EvidenceBased };
    let built;
    let nu = match nu {
        Some(nu) => nu,
        None => match build_speed_measure(curve, &opts.speed) {
            Ok(n) => {
                built = n;
                &built
            }
            Err(Error::NotBoundedVariation { .. }) => {
                return Ok(BzVerdict {
                    bounded_variation: false,
                    total_variation: None,
                    atoms: 0,
                    sc_mass: None,
                    epsilon: None,
                    probe: None,
                    measure_test: None,
                    numeric_ac: false,
                    declared_ac,
                    ac_loc: false,
                    certainty,
                    consistent: declared_ac != Some(true),
                });
            }
            Err(e) => return Err(e),
        },
    };
    let total = nu.total_mass()?;
    let atoms = nu.atoms().len();
    let dec = decompose_interval(curve, nu, curve.domain(), &opts.decomposition)?;
    let sc = dec.totals.sc;
    let epsilon = 0.5 * total.min(1.0);
    let epsilon = if epsilon > 0.0 { epsilon } else { 0.5 };
    let probe = probe_with_atoms(curve, epsilon, nu.atoms(), &opts.probe)?;
    let measure = ac_measure_test(nu, epsilon, &default_delta_grid(epsilon), opts.measure_budget)?;

    let structural = atoms == 0 && sc <= opts.decomposition.sc_tol;
    let numeric_ac = structural && !probe.violation;
    let numeric_agree = structural == !probe.violation && measure.passes == !probe.violation;
    let ac_loc = declared_ac.unwrap_or(numeric_ac);
    Ok(BzVerdict {
        bounded_variation: true,
        total_variation: Some(total),
        atoms,
        sc_mass: Some(sc),
        epsilon: Some(epsilon),
        probe: Some(probe),
        measure_test: Some(measure),
        numeric_ac,
        declared_ac,
        ac_loc,
        certainty,
        consistent: numeric_agree && declared_ac.map_or(true, |d| d == numeric_ac),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LuzinGeneration {
    pub generation: usize,
    pub intervals: usize,
    pub total_length: f64,
    /// `Σ diam γ([a_k, b_k])`, diameters taken over sampled times.
    pub bound: f64,
    /// `Σ ν([a_k, b_k])`.
    pub measure_bound: f64,
    pub diameters_within_measure: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LuzinReport {
    pub generations: Vec<LuzinGeneration>,
    pub monotone: bool,
    pub tends_to_zero: bool,
    /// For injective curves, the bounds estimate `H¹` of the image.
    pub h1_estimate: Option<Vec<f64>>,
}

const DIAMETER_SAMPLES: usize = 16;

fn diameter(curve: &Curve, a: f64, b: f64) -> Result<f64> {
    let pts = (0..=DIAMETER_SAMPLES)
        .map(|i| {
            let t = if i == DIAMETER_SAMPLES { b } else { a + (b - a) * (i as f64 / DIAMETER_SAMPLES as f64) };
            curve.eval(t)
        })
        .collect::<Result<Vec<_>>>()?;
    let scalars: Option<Vec<f64>> = if curve.space().is_real_valued() {
        pts.iter().map(Point::as_scalar).collect()
    } else {
        None
    };
    if let Some(xs) = scalars {
        let (lo, hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
        return Ok(hi - lo);
    }
    let mut best: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.max(curve.distance(&pts[i], &pts[j])?);
        }
    }
    Ok(best)
}

/// Upper bounds for `H¹(γ(N))` along a nested null cover `N`.
pub fn luzin_n_upper_bound(
    curve: &Curve,
    null_set: &NestedNullSet,
    nu: &SpeedMeasure,
    simple: bool,
    tol: f64,
) -> Result<LuzinReport> {
    let d = curve.domain();
    let mut gens = Vec::with_capacity(null_set.generations().len());
    for (g, fam) in null_set.generations().iter().enumerate() {
        if let Some(&(a, b)) = fam.pairs().iter().find(|&&(a, b)| !(d.contains(a) && d.contains(b))) {
            return Err(Error::Domain(format!("null set interval [{a}, {b}] leaves {d}")));
        }
        let closed: Vec<Interval> = fam.pairs().iter().map(|&(a, b)| Interval::closed(a, b)).collect();
        let masses = if fam.pairs().windows(2).all(|w| w[0].1 < w[1].0) {
            nu.masses(&closed)?
        } else {
            // touching closed intervals share an endpoint atom
            closed.iter().map(|j| nu.measure_interval(*j)).collect::<Result<Vec<_>>>()?
        };
        let mut bound = 0.0;
        let mut within = true;
        for (&(a, b), m) in fam.pairs().iter().zip(&masses) {
            let diam = diameter(curve, a, b)?;
            within &= diam <= m + tol;
            bound += diam;
        }
        gens.push(LuzinGeneration {
            generation: g,
            intervals: fam.len(),
            total_length: fam.total_length(),
            bound,
            measure_bound: masses.iter().sum(),
            diameters_within_measure: within,
        });
    }
    let monotone = gens.windows(2).all(|w| w[1].bound <= w[0].bound + tol);
    let last = gens.last().map_or(0.0, |g| g.bound);
    let n = gens.len();
    let shrinking = n >= 4
        && gens[n - 4..]
            .windows(2)
            .all(|w| w[0].bound > 0.0 && w[1].bound / w[0].bound <= 0.95);
    Ok(LuzinReport {
        tends_to_zero: last <= tol || shrinking,
        monotone,
        h1_estimate: simple.then(|| gens.iter().map(|g| g.measure_bound).collect()),
        generations: gens,
    })
}
