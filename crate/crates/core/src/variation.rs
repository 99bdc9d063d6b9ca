//! Variation of a curve over intervals and the cumulative variation function.
//!
//! Sampled cadlag curves are summed exactly. Everything else goes through
//! nested dyadic partitions of the closed interval, seeded with declared jump
//! times and shrinking neighbours of them. Open ends are handled by removing
//! the boundary jump parts, `Var((a,b)) = Var([a,b]) − d(γ(a),γ(a+)) −
//! d(γ(b−),γ(b))`, and by shrinking closed subintervals when those limits
//! cannot be resolved.

use serde::Serialize;

use crate::curve::{
    one_sided_limits, Body, Curve, Interval, Schedule, BLACK_BOX_GAP_TOL, EXACT_GAP_TOL,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct VariationOptions {
    pub tol: f64,
    pub max_depth: u32,
    /// Refinement never declares convergence before this depth.
    pub min_depth: u32,
    pub blowup_bound: f64,
    /// Overrides the default gap tolerance ([`EXACT_GAP_TOL`] for curves
    /// with declared limits, [`BLACK_BOX_GAP_TOL`] otherwise).
    pub gap_tol: Option<f64>,
    pub schedule: Schedule,
}

impl Default for VariationOptions {
    fn default() -> Self {
        VariationOptions {
            tol: 1e-6,
            max_depth: 24,
            min_depth: 6,
            blowup_bound: 1e12,
            gap_tol: None,
            schedule: Schedule::default(),
        }
    }
}

impl VariationOptions {
    pub fn with_tol(tol: f64) -> Self {
        VariationOptions { tol, ..Default::default() }
    }

    pub fn gap_tol_for(&self, curve: &Curve) -> f64 {
        self.gap_tol.unwrap_or(if curve.declared_jumps().is_some() {
            EXACT_GAP_TOL
        } else {
            BLACK_BOX_GAP_TOL
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.min_depth > self.max_depth {
            return Err(Error::Config("min_depth exceeds max_depth".into()));
        }
        Ok(())
    }
}

/// Outcome of a variation computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Variation {
    /// `f64::INFINITY` when the blow-up bound was crossed.
    pub value: f64,
    pub bounded: bool,
    pub converged: bool,
    pub depth: u32,
    /// Increase produced by the last refinement step.
    pub residual: f64,
}

impl Variation {
    fn exact(value: f64) -> Self {
        Variation { value, bounded: true, converged: true, depth: 0, residual: 0.0 }
    }

    fn unbounded(depth: u32) -> Self {
        Variation {
            value: f64::INFINITY,
            bounded: false,
            converged: true,
            depth,
            residual: f64::INFINITY,
        }
    }
}

/// `Σ d(γ(t_k), γ(t_{k+1}))` over a nondecreasing partition.
pub fn var_sum(curve: &Curve, partition: &[f64]) -> Result<f64> {
    if partition.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("partition must be nondecreasing".into()));
    }
    let mut total = 0.0;
    let mut prev = None;
    for &t in partition {
        let p = curve.eval(t)?;
        if let Some(q) = &prev {
            total += curve.distance(q, &p)?;
        }
        prev = Some(p);
    }
    Ok(total)
}

/// `Var(γ; J)`.
pub fn variation(curve: &Curve, j: Interval, opts: &VariationOptions) -> Result<Variation> {
    opts.validate()?;
    if !j.is_subset_of(&curve.domain()) {
        return Err(Error::Domain(format!("{j} is not inside {}", curve.domain())));
    }
    if j.lo == j.hi {
        return Ok(Variation::exact(0.0));
    }
    if let Body::SampledCadlag(samples) = curve.body() {
        return sampled_variation(curve, samples, j).map(Variation::exact);
    }

    let dom = curve.domain();
    let lo_ok = j.lo_closed || dom.contains(j.lo);
    let hi_ok = j.hi_closed || dom.contains(j.hi);
    if lo_ok && hi_ok {
        let closed = closed_variation(curve, j.lo, j.hi, opts)?;
        if !closed.bounded || j.is_closed() {
            return Ok(closed);
        }
        let gap_tol = opts.gap_tol_for(curve);
        let mut trim = 0.0;
        let mut resolved = true;
        if !j.lo_closed {
            match one_sided_limits(curve, j.lo, &opts.schedule, gap_tol) {
                Ok(g) => trim += g.right_gap,
                Err(Error::LimitNotResolved { .. }) => resolved = false,
                Err(e) => return Err(e),
            }
        }
        if !j.hi_closed {
            match one_sided_limits(curve, j.hi, &opts.schedule, gap_tol) {
                Ok(g) => trim += g.left_gap,
                Err(Error::LimitNotResolved { .. }) => resolved = false,
                Err(e) => return Err(e),
            }
        }
        if resolved {
            return Ok(Variation { value: (closed.value - trim).max(0.0), ..closed });
        }
    }
    inner_variation(curve, j, opts)
}

/// Supremum of `Var(γ; [a+h, b−h])` over halving `h`, shrinking only the
/// open ends.
fn inner_variation(curve: &Curve, j: Interval, opts: &VariationOptions) -> Result<Variation> {
    const MAX_HALVINGS: u32 = 60;
    let mut h = j.width() / 4.0;
    let mut best = Variation::exact(0.0);
    let mut small_steps = 0;
    let mut converged = false;
    for _ in 0..MAX_HALVINGS {
        let a = if j.lo_closed { j.lo } else { j.lo + h };
        let b = if j.hi_closed { j.hi } else { j.hi - h };
        if a >= b {
            h /= 2.0;
            continue;
        }
        let v = closed_variation(curve, a, b, opts)?;
        if !v.bounded {
            return Ok(v);
        }
        let increase = (v.value - best.value).max(0.0);
        let depth = best.depth.max(v.depth);
        best = Variation {
            value: best.value.max(v.value),
            bounded: true,
            converged: v.converged,
            depth,
            residual: increase,
        };
        if increase < opts.tol {
            small_steps += 1;
            if small_steps >= 2 {
                converged = v.converged;
                break;
            }
        } else {
            small_steps = 0;
        }
        h /= 2.0;
    }
    best.converged = converged;
    Ok(best)
}

fn sampled_variation(curve: &Curve, samples: &[(f64, crate::space::Point)], j: Interval) -> Result<f64> {
    let mut prev = curve.eval(j.lo)?;
    let mut total = 0.0;
    let start = samples.partition_point(|(t, _)| *t <= j.lo);
    for (t, p) in &samples[start..] {
        let inside = *t < j.hi || (*t == j.hi && j.hi_closed);
        if !inside {
            break;
        }
        total += curve.distance(&prev, p)?;
        prev = p.clone();
    }
    Ok(total)
}

/// Dyadic refinement of `Var(γ; [a, b])`.
pub(crate) fn closed_variation(curve: &Curve, a: f64, b: f64, opts: &VariationOptions) -> Result<Variation> {
    if a == b {
        return Ok(Variation::exact(0.0));
    }
    if let Body::SampledCadlag(samples) = curve.body() {
        return sampled_variation(curve, samples, Interval::closed(a, b)).map(Variation::exact);
    }
    let jumps: Vec<f64> = curve
        .declared_jumps()
        .unwrap_or_default()
        .into_iter()
        .filter(|t| *t >= a && *t <= b)
        .collect();

    let mut seeds: Vec<f64> = jumps.clone();
    let mut value = 0.0;
    let mut small_steps = 0;
    let mut agree_steps = 0;
    let mut last_increase = f64::INFINITY;
    for depth in 0..=opts.max_depth {
        let offset = (b - a) * 2f64.powi(-(depth as i32) - 4);
        for &t in &jumps {
            for s in [t - offset, t + offset] {
                if s > a && s < b {
                    seeds.push(s);
                }
            }
        }
        seeds.sort_by(f64::total_cmp);
        seeds.dedup();

        let Some(sum) = dyadic_sum(curve, a, b, depth, 0.0, &seeds, opts.blowup_bound)? else {
            return Ok(Variation::unbounded(depth));
        };
        let shift = (GOLDEN * f64::from(depth + 1)).fract();
        let Some(shifted) = dyadic_sum(curve, a, b, depth, shift, &seeds, opts.blowup_bound)? else {
            return Ok(Variation::unbounded(depth));
        };
        let best = sum.max(shifted);
        let increase = if depth == 0 { f64::INFINITY } else { (best - value).max(0.0) };
        value = value.max(best);
        last_increase = increase;
        if increase < opts.tol {
            small_steps += 1;
        } else {
            small_steps = 0;
        }
        if (sum - shifted).abs() < opts.tol {
            agree_steps += 1;
        } else {
            agree_steps = 0;
        }
        if small_steps >= 2
            && agree_steps >= 3
            && depth >= opts.min_depth
            && edge_gain(curve, a, b, depth)? < opts.tol / 4.0
        {
            return Ok(Variation { value, bounded: true, converged: true, depth, residual: increase });
        }
    }
    Ok(Variation {
        value,
        bounded: true,
        converged: false,
        depth: opts.max_depth,
        residual: last_increase,
    })
}

/// Extra chord length found by refining the first and last cells of the
/// depth-`depth` grid geometrically toward `a` and `b`. Every partition
/// contains the endpoints, so a turn just inside an end cell is invisible to
/// the uniform grids until the mesh drops below its distance to the end.
fn edge_gain(curve: &Curve, a: f64, b: f64, depth: u32) -> Result<f64> {
    const POINTS: i32 = 30;
    let h = (b - a) * 2f64.powi(-(depth as i32));
    let mut gain: f64 = 0.0;
    for (end, sign) in [(a, 1.0), (b, -1.0)] {
        let far = end + sign * h;
        let (pe, pf) = (curve.eval(end)?, curve.eval(far)?);
        let chord = curve.distance(&pe, &pf)?;
        let mut prev = pe;
        let mut sum = 0.0;
        for j in (1..=POINTS).rev() {
            let p = curve.eval(end + sign * h * 2f64.powi(-j))?;
            sum += curve.distance(&prev, &p)?;
            prev = p;
        }
        sum += curve.distance(&prev, &pf)?;
        gain = gain.max(sum - chord);
    }
    Ok(gain)
}

/// The companion partition at depth `d` is offset by `frac((d+1)·GOLDEN)`
/// cell widths, so no point sits at the same relative place in its cell at
/// consecutive depths.
const GOLDEN: f64 = 0.618_033_988_749_895;

/// Chord sum over `2^depth` uniform cells of `[a, b]`, shifted by
/// `shift` cell widths and merged with `seeds`. `None` once the running sum
/// passes `bound`.
///
/// With `shift = 0` the partitions are nested across depths, so the sum is
/// nondecreasing in `depth`. The shifted family is not nested; it serves as
/// an independent estimate at the same mesh size.
fn dyadic_sum(
    curve: &Curve,
    a: f64,
    b: f64,
    depth: u32,
    shift: f64,
    seeds: &[f64],
    bound: f64,
) -> Result<Option<f64>> {
    let n: u64 = 1 << depth;
    let scale = 2f64.powi(-(depth as i32));
    let w = b - a;
    let mut walk = ChordWalk { curve, prev: curve.eval(a)?, prev_t: a, total: 0.0 };
    let mut next_seed = 0;
    // interior points sit at a + w·(i + shift)·2^-depth
    let (first, count) = if shift == 0.0 { (1, n) } else { (0, n + 1) };
    for i in first..=count {
        let t = if i == count { b } else { a + w * ((i as f64 + shift) * scale) };
        while next_seed < seeds.len() && seeds[next_seed] < t {
            walk.visit(seeds[next_seed])?;
            next_seed += 1;
        }
        if t <= b {
            walk.visit(t)?;
        }
        if walk.total > bound {
            return Ok(None);
        }
    }
    Ok(Some(walk.total))
}

struct ChordWalk<'a> {
    curve: &'a Curve,
    prev: crate::space::Point,
    prev_t: f64,
    total: f64,
}

impl ChordWalk<'_> {
    fn visit(&mut self, t: f64) -> Result<()> {
        if t <= self.prev_t {
            return Ok(());
        }
        let p = self.curve.eval(t)?;
        self.total += self.curve.distance(&self.prev, &p)?;
        self.prev = p;
        self.prev_t = t;
        Ok(())
    }
}

/// `Var(γ; [a, b])` for `a ≤ b` and `−Var(γ; [b, a])` otherwise.
pub fn signed_variation(curve: &Curve, a: f64, b: f64, opts: &VariationOptions) -> Result<f64> {
    if a <= b {
        Ok(variation(curve, Interval::closed(a, b), opts)?.value)
    } else {
        Ok(-variation(curve, Interval::closed(b, a), opts)?.value)
    }
}

/// `V_γ` and its right-continuous modification `v` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationProfile {
    pub base_point: f64,
    pub grid: Vec<f64>,
    /// `V_γ(grid[i]) = Var(γ; [c, grid[i]])` with the sign convention.
    pub v_left: Vec<f64>,
    /// `v(grid[i]) = V_γ(grid[i]+)`.
    pub v_right: Vec<f64>,
    pub refinement_depth: u32,
    pub converged: bool,
    pub residual: f64,
}

impl VariationProfile {
    /// Index of the last grid point `≤ t`.
    pub fn floor_index(&self, t: f64) -> Option<usize> {
        self.grid.partition_point(|g| *g <= t).checked_sub(1)
    }
}

/// `V_γ` from base point `c` at each grid time, built with one sweep of
/// per-cell variations glued by additivity.
pub fn cumulative_profile(curve: &Curve, c: f64, grid: &[f64], opts: &VariationOptions) -> Result<VariationProfile> {
    opts.validate()?;
    if grid.is_empty() {
        return Err(Error::Config("profile grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config("profile grid must be strictly increasing".into()));
    }
    curve.check_time(c)?;
    for &t in grid {
        curve.check_time(t)?;
    }

    // sweep over grid ∪ {c}
    let mut pts: Vec<f64> = grid.to_vec();
    let c_idx = match pts.binary_search_by(|g| g.total_cmp(&c)) {
        Ok(i) => i,
        Err(i) => {
            pts.insert(i, c);
            i
        }
    };
    let cell_opts = VariationOptions { tol: opts.tol / (pts.len().max(2) - 1) as f64, ..opts.clone() };
    let mut values = vec![0.0; pts.len()];
    let mut depth = 0;
    let mut converged = true;
    let mut residual: f64 = 0.0;
    let mut cell = |a: f64, b: f64| -> Result<f64> {
        let v = closed_variation(curve, a, b, &cell_opts)?;
        if !v.bounded {
            return Err(Error::NotBoundedVariation { lo: a, hi: b, bound: opts.blowup_bound });
        }
        depth = depth.max(v.depth);
        converged &= v.converged;
        residual = residual.max(v.residual);
        Ok(v.value)
    };
    for i in c_idx + 1..pts.len() {
        values[i] = values[i - 1] + cell(pts[i - 1], pts[i])?;
    }
    for i in (0..c_idx).rev() {
        values[i] = values[i + 1] - cell(pts[i], pts[i + 1])?;
    }
    if pts.len() != grid.len() {
        values.remove(c_idx);
    }

    let gap_tol = opts.gap_tol_for(curve);
    let mut v_right = Vec::with_capacity(grid.len());
    for (i, &t) in grid.iter().enumerate() {
        let g = match one_sided_limits(curve, t, &opts.schedule, gap_tol) {
            Ok(g) => g.right_gap,
            Err(Error::LimitNotResolved { .. }) => {
                converged = false;
                0.0
            }
            Err(e) => return Err(e),
        };
        v_right.push(values[i] + g);
    }

    Ok(VariationProfile {
        base_point: c,
        grid: grid.to_vec(),
        v_left: values,
        v_right,
        refinement_depth: depth,
        converged,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{PI, TAU};

    use super::*;
    use crate::oracle::{Oracle, StepParams};
    use crate::space::{Point, Space};

    fn oracle(name: &str) -> Curve {
        Oracle::by_name(name).unwrap().curve().unwrap()
    }

    fn spike() -> Curve {
        Oracle::Step(StepParams::spike(0.5, 5.0)).curve().unwrap()
    }

    /// Chord sum on a uniform partition, independent of the refinement code.
    fn uniform_chord_sum(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        (0..n)
            .map(|i| {
                let t0 = a + (b - a) * i as f64 / n as f64;
                let t1 = a + (b - a) * (i + 1) as f64 / n as f64;
                (f(t1) - f(t0)).abs()
            })
            .sum()
    }

    #[test]
    fn var_sum_examples() {
        assert_eq!(var_sum(&oracle("identity"), &[0.0, 0.5, 1.0]).unwrap(), 1.0);
        let cantor = oracle("cantor");
        let v = var_sum(&cantor, &[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        assert_eq!(var_sum(&cantor, &[]).unwrap(), 0.0);
        assert_eq!(var_sum(&cantor, &[0.3]).unwrap(), 0.0);
        assert!(matches!(var_sum(&cantor, &[0.0, 2.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn var_sum_of_constant() {
        let c = Curve::analytic(
            "const",
            Space::RealLine,
            Interval::closed(0.0, 1.0),
            crate::curve::Analytic::continuous(|_| Point::Scalar(3.0), false),
        )
        .unwrap();
        assert_eq!(var_sum(&c, &[0.0, 0.1, 0.7, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn cantor_variation_is_one() {
        let v = variation(&oracle("cantor"), Interval::closed(0.0, 1.0), &VariationOptions::default()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-6);
        assert!(v.converged && v.depth <= 24);
    }

    #[test]
    fn sin_wave_variation_matches_chord_oracle() {
        let reference = uniform_chord_sum(f64::sin, 0.0, TAU, 1 << 20);
        assert!((reference - 4.0).abs() < 1e-9);
        let v = variation(&oracle("sin_wave"), Interval::closed(0.0, TAU), &VariationOptions::default()).unwrap();
        assert!(v.converged);
        assert!((v.value - reference).abs() < 1e-6, "{} vs {reference}", v.value);
    }

    #[test]
    fn circle_arc_variation_matches_chord_oracle() {
        let arc = oracle("circle_arc");
        let n = 1 << 20;
        let grid: Vec<f64> = (0..=n).map(|i| TAU * i as f64 / n as f64).collect();
        let reference = var_sum(&arc, &grid).unwrap();
        assert!((reference - TAU).abs() < 1e-9);
        let v = variation(&arc, Interval::closed(0.0, TAU), &VariationOptions::default()).unwrap();
        assert!((v.value - reference).abs() < 1e-6);
    }

    #[test]
    fn step_variation_is_single_chord() {
        let v = variation(&oracle("step"), Interval::closed(0.0, 1.0), &VariationOptions::default()).unwrap();
        assert_eq!(v.value, 1.0);
    }

    #[test]
    fn sampled_variation_is_exact() {
        let c = Curve::sampled(
            "path",
            Space::Discrete,
            vec![(0.0, Point::label("a")), (1.0, Point::label("b")), (2.0, Point::label("a"))],
            None,
        )
        .unwrap();
        let o = VariationOptions::default();
        assert_eq!(variation(&c, Interval::closed(0.0, 2.0), &o).unwrap().value, 2.0);
        assert_eq!(variation(&c, Interval::right_open(0.0, 2.0), &o).unwrap().value, 1.0);
        assert_eq!(variation(&c, Interval::left_open(1.0, 2.0), &o).unwrap().value, 1.0);
        assert_eq!(variation(&c, Interval::closed(0.5, 0.9), &o).unwrap().value, 0.0);
    }

    #[test]
    fn nonpositive_tolerance_is_rejected() {
        let e = variation(&oracle("identity"), Interval::closed(0.0, 1.0), &VariationOptions::with_tol(0.0));
        assert!(matches!(e, Err(Error::Config(_))));
    }

    #[test]
    fn outside_domain_is_rejected() {
        let e = variation(&oracle("identity"), Interval::closed(0.0, 2.0), &VariationOptions::default());
        assert!(matches!(e, Err(Error::Domain(_))));
    }

    #[test]
    fn snowflake_identity_blows_up() {
        let c = Curve::analytic(
            "snow",
            Space::snowflake(0.5).unwrap(),
            Interval::closed(0.0, 1.0),
            crate::curve::Analytic::continuous(Point::Scalar, false),
        )
        .unwrap();
        let opts = VariationOptions { blowup_bound: 1e3, ..Default::default() };
        let v = variation(&c, Interval::closed(0.0, 1.0), &opts).unwrap();
        assert!(!v.bounded && v.value.is_infinite());
    }

    #[test]
    fn left_limit_of_variation_at_cadlag_jump() {
        let step = oracle("step");
        let o = VariationOptions::default();
        for k in 2..30 {
            let s = 0.5 - 2f64.powi(-k);
            assert_eq!(variation(&step, Interval::closed(s, 0.5), &o).unwrap().value, 1.0);
        }
    }

    #[test]
    fn jump_part_is_not_additive_on_open_ends() {
        let c = spike();
        let o = VariationOptions::default();
        let half_open = variation(&c, Interval::left_open(0.2, 0.5), &o).unwrap().value;
        let open = variation(&c, Interval::open(0.2, 0.5), &o).unwrap().value;
        let point = variation(&c, Interval::point(0.5), &o).unwrap().value;
        assert_eq!(half_open, 5.0);
        assert_eq!(open, 0.0);
        assert!(half_open > open + point);
        let right = variation(&c, Interval::right_open(0.5, 0.8), &o).unwrap().value;
        assert_eq!(right, 5.0);
    }

    #[test]
    fn open_interval_without_declared_limits_uses_inner_regularity() {
        let c = Curve::analytic(
            "osc",
            Space::RealLine,
            Interval::closed(0.0, 1.0),
            crate::curve::Analytic::black_box(|t| {
                Point::Scalar(if t == 0.0 { 0.0 } else { t * t * (1.0 / t).sin() })
            }),
        )
        .unwrap();
        let o = VariationOptions::default();
        let open = variation(&c, Interval::open(0.0, 1.0), &o).unwrap();
        let closed = variation(&c, Interval::closed(0.0, 1.0), &o).unwrap();
        assert!(open.bounded);
        assert!((open.value - closed.value).abs() < 1e-3);
    }

    #[test]
    fn profile_examples() {
        let o = VariationOptions::default();
        let p = cumulative_profile(&oracle("identity"), 0.0, &[0.0, 0.25, 0.5, 1.0], &o).unwrap();
        assert_eq!(p.v_left, vec![0.0, 0.25, 0.5, 1.0]);
        assert_eq!(p.v_right, p.v_left);

        let p = cumulative_profile(&oracle("identity"), 1.0, &[0.0], &o).unwrap();
        assert_eq!(p.v_left, vec![-1.0]);
        assert_eq!(signed_variation(&oracle("identity"), 1.0, 0.0, &o).unwrap(), -1.0);

        let p = cumulative_profile(&oracle("step"), 0.0, &[0.0, 0.5, 1.0], &o).unwrap();
        assert_eq!(p.v_left, vec![0.0, 1.0, 1.0]);
        assert_eq!(p.v_right, vec![0.0, 1.0, 1.0]);

        let p = cumulative_profile(&spike(), 0.0, &[0.0, 0.5, 1.0], &o).unwrap();
        assert_eq!(p.v_left, vec![0.0, 5.0, 10.0]);
        assert_eq!(p.v_right, vec![0.0, 10.0, 10.0]);
    }

    #[test]
    fn profile_grid_must_increase() {
        let e = cumulative_profile(&oracle("identity"), 0.0, &[0.5, 0.25], &VariationOptions::default());
        assert!(matches!(e, Err(Error::Config(_))));
    }

    #[test]
    fn monotone_profile_of_sin() {
        let grid: Vec<f64> = (0..=64).map(|i| PI * i as f64 / 32.0).collect();
        let p = cumulative_profile(&oracle("sin_wave"), 0.0, &grid, &VariationOptions::default()).unwrap();
        assert!(p.v_left.windows(2).all(|w| w[0] <= w[1]));
        assert!((p.v_left[64] - 4.0).abs() < 1e-6);
    }

    mod props {
        use proptest::prelude::*;

        use super::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn additivity(a in 0.0..TAU, c in 0.0..TAU, b in 0.0..TAU) {
                let mut x = [a, c, b];
                x.sort_by(f64::total_cmp);
                let [a, c, b] = x;
                let o = VariationOptions::default();
                let curve = oracle("sin_wave");
                let ab = variation(&curve, Interval::closed(a, b), &o).unwrap().value;
                let ac = variation(&curve, Interval::closed(a, c), &o).unwrap().value;
                let cb = variation(&curve, Interval::closed(c, b), &o).unwrap().value;
                prop_assert!((ab - ac - cb).abs() <= 3.0 * o.tol);
            }

            #[test]
            fn monotone_in_interval(a in 0.0..1.0f64, b in 0.0..1.0f64, shrink in 0.0..0.5f64) {
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                let inner = Interval::closed(a + (b - a) * shrink / 2.0, b - (b - a) * shrink / 2.0);
                let o = VariationOptions::default();
                for curve in [oracle("cantor_plus_linear"), oracle("staircase"), spike()] {
                    let outer = variation(&curve, Interval::closed(a, b), &o).unwrap().value;
                    let v = variation(&curve, inner, &o).unwrap().value;
                    prop_assert!(v <= outer + o.tol);
                }
            }

            #[test]
            fn refinement_never_decreases(mut ts in prop::collection::vec(0.0..TAU, 2..20), extra in 0.0..TAU) {
                ts.sort_by(f64::total_cmp);
                let curve = oracle("sin_wave");
                let before = var_sum(&curve, &ts).unwrap();
                let pos = ts.partition_point(|t| *t <= extra);
                ts.insert(pos, extra);
                let after = var_sum(&curve, &ts).unwrap();
                prop_assert!(after >= before - 1e-12 * before.max(1.0));
            }
        }
    }
}
