//! Metric derivative, the density of the absolutely continuous part of `ν`,
//! and the split `ν = ν_ac + ν_atomic + ν_sc`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::ac_analysis::{banach_zaretsky_verdict, AcOptions, Certainty};
use crate::curve::{Curve, Interval};
use crate::error::{Error, Result, Side};
use crate::speed_measure::{uniform_grid, Atom, SpeedMeasure};
use crate::variation::{closed_variation, variation, VariationOptions};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeOptions {
    /// Relative agreement, `|a − b| ≤ deriv_tol · max(1, |a|)`.
    pub deriv_tol: f64,
    /// Steps are `scale · 2^-k` for `k` in `first..=last`.
    pub first: i32,
    pub last: i32,
}

impl Default for DerivativeOptions {
    fn default() -> Self {
        DerivativeOptions { deriv_tol: 1e-4, first: 4, last: 34 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeStatus {
    Converged,
    NotResolved,
    /// Quotients grow without bound along the schedule.
    Divergent,
    UndefinedAtJump,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricDerivativeEstimate {
    pub t: f64,
    pub value: f64,
    pub status: DerivativeStatus,
    pub h_used: f64,
}

impl MetricDerivativeEstimate {
    pub fn converged(&self) -> bool {
        self.status == DerivativeStatus::Converged
    }
}

/// Same value within `tol` (relative above 1) and the same answer to whether
/// a limit exists. `Divergent` and `NotResolved` both count as no limit.
pub fn estimates_agree(a: &MetricDerivativeEstimate, b: &MetricDerivativeEstimate, tol: f64) -> bool {
    a.converged() == b.converged() && close(a.value, b.value, tol)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(1.0)
}

const STEP_FLOOR: f64 = 1e-10;

/// Step sizes scaled to the room left before the nearest domain end.
fn steps_for(curve: &Curve, t: f64, opts: &DerivativeOptions) -> (Vec<f64>, bool, bool) {
    let d = curve.domain();
    let dist = (t - d.lo).min(d.hi - t);
    let scale = if dist > 0.0 { d.width().min(dist) } else { d.width() };
    let mut steps: Vec<f64> = (opts.first..=opts.last).map(|k| scale * 2f64.powi(-k)).collect();
    // below this, rounding in t ± h swamps the quotient
    let floor = STEP_FLOOR * t.abs().max(d.width()).max(1.0);
    let keep = steps.iter().filter(|h| **h >= floor).count().max(SETTLED + 2).min(steps.len());
    steps.truncate(keep);
    (steps, t > d.lo, t < d.hi)
}

fn is_declared_jump(curve: &Curve, t: f64) -> bool {
    curve.declared_jumps().is_some_and(|j| j.contains(&t))
}

/// Agreeing values at the end of the schedule that count as settled.
const SETTLED: usize = 4;

/// Runs `q` along the whole schedule on each active side; converged when the
/// last [`SETTLED`] values of every side agree and the sides agree with each
/// other. Stopping at the first agreeing run is unsafe: staircase curves can
/// hold a quotient fixed for several halvings before it drops to its limit.
fn settle(
    t: f64,
    steps: &[f64],
    sides: &[Side],
    tol: f64,
    mut q: impl FnMut(f64, Side) -> Result<f64>,
) -> Result<MetricDerivativeEstimate> {
    let mut hist: Vec<Vec<f64>> = vec![Vec::with_capacity(steps.len()); sides.len()];
    for &h in steps {
        for (i, &side) in sides.iter().enumerate() {
            hist[i].push(q(h, side)?);
        }
    }
    let n = hist[0].len();
    let h_used = steps.last().copied().unwrap_or(0.0);
    if n >= SETTLED {
        let each = hist.iter().all(|s| s[n - SETTLED..].windows(2).all(|w| close(w[1], w[0], tol)));
        let across = hist.iter().all(|s| close(s[n - 1], hist[0][n - 1], tol));
        if each && across {
            // the largest step whose value still agrees with the finest one,
            // to keep rounding out of the estimate
            let mut r = n - 1;
            while r > 0 && hist.iter().all(|s| close(s[r - 1], s[r], tol) && close(s[r - 1], s[n - 1], tol)) {
                r -= 1;
            }
            let value = hist.iter().map(|s| s[r]).sum::<f64>() / sides.len() as f64;
            return Ok(MetricDerivativeEstimate { t, value, status: DerivativeStatus::Converged, h_used: steps[r] });
        }
    }
    let divergent = hist.iter().any(|s| {
        s.len() >= 6 && {
            let tail = &s[s.len() - 6..];
            tail[0] > 0.0 && tail.windows(2).all(|w| w[1] >= w[0]) && tail[5] >= 1.1f64.powi(5) * tail[0]
        }
    });
    let value = hist.iter().filter_map(|s| s.last()).sum::<f64>() / sides.len().max(1) as f64;
    let status = if divergent { DerivativeStatus::Divergent } else { DerivativeStatus::NotResolved };
    Ok(MetricDerivativeEstimate { t, value, status, h_used })
}

/// `|γ̇|(t) = lim d(γ(t+ε), γ(t)) / |ε|`, one-sided at the domain ends.
pub fn metric_derivative(curve: &Curve, t: f64, opts: &DerivativeOptions) -> Result<MetricDerivativeEstimate> {
    curve.check_time(t)?;
    if is_declared_jump(curve, t) {
        return Ok(MetricDerivativeEstimate { t, value: 0.0, status: DerivativeStatus::UndefinedAtJump, h_used: 0.0 });
    }
    let (steps, left, right) = steps_for(curve, t, opts);
    let sides: Vec<Side> = [(left, Side::Left), (right, Side::Right)]
        .into_iter()
        .filter_map(|(on, s)| on.then_some(s))
        .collect();
    if sides.is_empty() {
        return Ok(MetricDerivativeEstimate { t, value: 0.0, status: DerivativeStatus::NotResolved, h_used: 0.0 });
    }
    let here = curve.eval(t)?;
    settle(t, &steps, &sides, opts.deriv_tol, |h, side| {
        let s = match side {
            Side::Left => t - h,
            Side::Right => t + h,
        };
        Ok(curve.distance(&curve.eval(s)?, &here)? / h)
    })
}

/// `lim Var(γ; [t−ε, t+ε]) / 2ε`, one-sided at the domain ends.
pub fn variation_quotient(curve: &Curve, t: f64, opts: &DerivativeOptions) -> Result<MetricDerivativeEstimate> {
    curve.check_time(t)?;
    if is_declared_jump(curve, t) {
        return Ok(MetricDerivativeEstimate { t, value: 0.0, status: DerivativeStatus::UndefinedAtJump, h_used: 0.0 });
    }
    let (steps, left, right) = steps_for(curve, t, opts);
    if !left && !right {
        return Ok(MetricDerivativeEstimate { t, value: 0.0, status: DerivativeStatus::NotResolved, h_used: 0.0 });
    }
    settle(t, &steps, &[Side::Right], opts.deriv_tol, |h, _| {
        let a = if left { t - h } else { t };
        let b = if right { t + h } else { t };
        let vopts = VariationOptions {
            tol: 1e-2 * opts.deriv_tol * (b - a),
            min_depth: 3,
            ..VariationOptions::default()
        };
        Ok(closed_variation(curve, a, b, &vopts)?.value / (b - a))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensitySource {
    MetricDerivative,
    VariationQuotient,
    /// Atom time or a point where neither estimate settled; filled in from
    /// the neighbours.
    Interpolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityPoint {
    pub t: f64,
    pub value: f64,
    pub source: DensitySource,
}

/// Density of `ν_ac` on a grid, skipping declared jumps.
pub fn density_profile(curve: &Curve, grid: &[f64], opts: &DerivativeOptions) -> Result<Vec<DensityPoint>> {
    let atoms = curve.declared_jumps().unwrap_or_default();
    density_excluding(curve, grid, &atoms, opts)
}

fn point_density(curve: &Curve, t: f64, opts: &DerivativeOptions) -> Result<Option<(f64, DensitySource)>> {
    let md = metric_derivative(curve, t, opts)?;
    match md.status {
        DerivativeStatus::Converged => return Ok(Some((md.value, DensitySource::MetricDerivative))),
        DerivativeStatus::UndefinedAtJump => return Ok(None),
        _ => {}
    }
    let vq = variation_quotient(curve, t, opts)?;
    Ok(vq.converged().then_some((vq.value, DensitySource::VariationQuotient)))
}

pub(crate) fn density_excluding(
    curve: &Curve,
    grid: &[f64],
    atoms: &[f64],
    opts: &DerivativeOptions,
) -> Result<Vec<DensityPoint>> {
    let mut out = Vec::with_capacity(grid.len());
    for &t in grid {
        let est = if atoms.contains(&t) { None } else { point_density(curve, t, opts)? };
        out.push(match est {
            Some((value, source)) => DensityPoint { t, value, source },
            None => DensityPoint { t, value: f64::NAN, source: DensitySource::Interpolated },
        });
    }
    fill_interpolated(&mut out);
    Ok(out)
}

fn fill_interpolated(points: &mut [DensityPoint]) {
    let known: Vec<usize> = (0..points.len())
        .filter(|&i| points[i].source != DensitySource::Interpolated)
        .collect();
    for i in 0..points.len() {
        if points[i].source != DensitySource::Interpolated {
            continue;
        }
        let k = known.partition_point(|&j| j < i);
        let value = match (k.checked_sub(1).map(|k| known[k]), known.get(k).copied()) {
            (Some(l), Some(r)) => {
                let (tl, tr) = (points[l].t, points[r].t);
                let s = (points[i].t - tl) / (tr - tl);
                points[l].value + s * (points[r].value - points[l].value)
            }
            (Some(l), None) => points[l].value,
            (None, Some(r)) => points[r].value,
            (None, None) => 0.0,
        };
        points[i].value = value;
    }
}

fn trapezoid(points: &[DensityPoint]) -> f64 {
    points.windows(2).map(|w| 0.5 * (w[0].value + w[1].value) * (w[1].t - w[0].t)).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionOptions {
    pub cells: usize,
    /// Density samples per cell for the trapezoidal rule.
    pub subsamples: usize,
    /// Per-cell noise allowance for the singular continuous residual.
    pub tol: f64,
    /// Aggregate singular continuous mass treated as zero.
    pub sc_tol: f64,
    pub derivative: DerivativeOptions,
}

impl Default for DecompositionOptions {
    fn default() -> Self {
        DecompositionOptions {
            cells: 256,
            subsamples: 8,
            tol: 1e-5,
            sc_tol: 1e-3,
            derivative: DerivativeOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellMasses {
    pub interval: Interval,
    pub nu: f64,
    pub ac: f64,
    pub atomic: f64,
    pub sc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionTotals {
    pub nu: f64,
    pub ac: f64,
    pub atomic: f64,
    pub sc: f64,
    /// `atomic + sc`.
    pub singular: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LebesgueDecomposition {
    pub cells: Vec<CellMasses>,
    pub density: Vec<DensityPoint>,
    pub atomic: Vec<Atom>,
    pub totals: DecompositionTotals,
    /// Cells whose small negative residual was reported as zero.
    pub clamped_cells: usize,
    pub tol: f64,
}

impl LebesgueDecomposition {
    pub fn density_csv(&self) -> String {
        let mut out = String::from("t,density,source\n");
        for p in &self.density {
            let source = match p.source {
                DensitySource::MetricDerivative => "metric_derivative",
                DensitySource::VariationQuotient => "variation_quotient",
                DensitySource::Interpolated => "interpolated",
            };
            let _ = writeln!(out, "{},{},{source}", p.t, p.value);
        }
        out
    }

    pub fn cells_csv(&self) -> String {
        let mut out = String::from("lo,hi,nu,ac,atomic,sc\n");
        for c in &self.cells {
            let _ = writeln!(out, "{},{},{},{},{},{}", c.interval.lo, c.interval.hi, c.nu, c.ac, c.atomic, c.sc);
        }
        out
    }
}

/// Splits `ν` over the cells `(g_i, g_{i+1}]` of `grid`; the first cell is
/// closed when it starts at the lower end of the domain.
pub fn decompose(curve: &Curve, nu: &SpeedMeasure, grid: &[f64], opts: &DecompositionOptions) -> Result<LebesgueDecomposition> {
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config("decomposition grid needs two or more increasing times".into()));
    }
    let lo = curve.domain().lo;
    let cells = grid
        .windows(2)
        .enumerate()
        .map(|(i, w)| Interval::new(w[0], w[1], i == 0 && w[0] == lo, true))
        .collect::<Result<Vec<_>>>()?;
    decompose_cells(curve, nu, &cells, opts)
}

/// Decomposition on `opts.cells` equal cells of `j`, honouring its end types.
pub fn decompose_interval(curve: &Curve, nu: &SpeedMeasure, j: Interval, opts: &DecompositionOptions) -> Result<LebesgueDecomposition> {
    if j.lo == j.hi {
        return decompose_cells(curve, nu, &[j], opts);
    }
    let n = opts.cells.max(1);
    let mut pts = uniform_grid(Interval::closed(j.lo, j.hi), n);
    pts[n] = j.hi;
    let cells = pts
        .windows(2)
        .enumerate()
        .map(|(i, w)| Interval::new(w[0], w[1], i == 0 && j.lo_closed, i + 1 < n || j.hi_closed))
        .collect::<Result<Vec<_>>>()?;
    decompose_cells(curve, nu, &cells, opts)
}

/// `∫ density` between `toward` and `away` in dyadic shells shrinking toward
/// `toward`, so that an integrable blow-up at a domain end is captured.
fn shell_integral(
    curve: &Curve,
    toward: f64,
    away: f64,
    atoms: &[f64],
    opts: &DecompositionOptions,
) -> Result<(f64, Vec<DensityPoint>)> {
    const SHELLS: i32 = 30;
    let len = away - toward;
    let m = opts.subsamples.max(1);
    let mut total = 0.0;
    let mut shells = Vec::new();
    let mut samples = Vec::new();
    for k in 0..SHELLS {
        let (s0, s1) = (toward + len * 2f64.powi(-(k + 1)), toward + len * 2f64.powi(-k));
        let (lo, hi) = if s0 < s1 { (s0, s1) } else { (s1, s0) };
        let grid: Vec<f64> = (0..=m).map(|i| if i == m { hi } else { lo + (hi - lo) * (i as f64 / m as f64) }).collect();
        let pts = density_excluding(curve, &grid, atoms, &opts.derivative)?;
        let s = trapezoid(&pts);
        shells.push(s);
        total += s;
        samples.extend(pts);
    }
    let n = shells.len();
    let (last, prev) = (shells[n - 1], shells[n - 2]);
    if last > 0.0 && prev > 0.0 {
        let r = last / prev;
        total += if r < 1.0 { last * r / (1.0 - r) } else { last };
    }
    Ok((total, samples))
}

fn cell_ac(curve: &Curve, cell: Interval, atoms: &[f64], opts: &DecompositionOptions) -> Result<(f64, Vec<DensityPoint>)> {
    let d = curve.domain();
    let (a, b) = (cell.lo, cell.hi);
    if a == b {
        return Ok((0.0, Vec::new()));
    }
    match (a == d.lo, b == d.hi) {
        (true, true) => {
            let mid = a + (b - a) / 2.0;
            let (l, mut pl) = shell_integral(curve, a, mid, atoms, opts)?;
            let (r, pr) = shell_integral(curve, b, mid, atoms, opts)?;
            pl.extend(pr);
            Ok((l + r, pl))
        }
        (true, false) => shell_integral(curve, a, b, atoms, opts),
        (false, true) => shell_integral(curve, b, a, atoms, opts),
        (false, false) => {
            let m = opts.subsamples.max(1);
            let grid: Vec<f64> = (0..=m).map(|i| if i == m { b } else { a + (b - a) * (i as f64 / m as f64) }).collect();
            let pts = density_excluding(curve, &grid, atoms, &opts.derivative)?;
            Ok((trapezoid(&pts), pts))
        }
    }
}

fn decompose_cells(curve: &Curve, nu: &SpeedMeasure, cells: &[Interval], opts: &DecompositionOptions) -> Result<LebesgueDecomposition> {
    let masses = nu.masses(cells)?;
    let atom_times: Vec<f64> = nu.atoms().iter().map(|a| a.t).collect();
    let mut out_cells = Vec::with_capacity(cells.len());
    let mut density: Vec<DensityPoint> = Vec::new();
    let mut atomic = Vec::new();
    let mut clamped = 0;
    for (cell, &mass) in cells.iter().zip(&masses) {
        let (ac, pts) = cell_ac(curve, *cell, &atom_times, opts)?;
        density.extend(pts);
        let inside: Vec<Atom> = nu.atoms().iter().filter(|a| cell.contains(a.t)).copied().collect();
        let atom_mass: f64 = inside.iter().map(|a| a.mass).sum();
        atomic.extend(inside);
        let raw = mass - ac - atom_mass;
        if raw < -10.0 * opts.tol {
            return Err(Error::Inconsistency(format!(
                "cell {cell}: ν = {mass} but density integrates to {ac} with atoms {atom_mass}"
            )));
        }
        if raw < 0.0 {
            clamped += 1;
        }
        out_cells.push(CellMasses { interval: *cell, nu: mass, ac, atomic: atom_mass, sc: raw.max(0.0) });
    }
    // atom times stay integration nodes with an interpolated value but are
    // not density samples
    density.retain(|p| atom_times.binary_search_by(|t| t.total_cmp(&p.t)).is_err());
    density.sort_by(|a, b| a.t.total_cmp(&b.t));
    density.dedup_by(|a, b| a.t == b.t);
    // an empty f64 sum is -0.0
    let sum = |f: fn(&CellMasses) -> f64| out_cells.iter().map(f).sum::<f64>() + 0.0;
    let (nu_t, ac, at, sc) = (sum(|c| c.nu), sum(|c| c.ac), sum(|c| c.atomic), sum(|c| c.sc));
    Ok(LebesgueDecomposition {
        cells: out_cells,
        density,
        atomic,
        totals: DecompositionTotals { nu: nu_t, ac, atomic: at, sc, singular: at + sc },
        clamped_cells: clamped,
        tol: opts.tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthIdentityReport {
    pub interval: Interval,
    pub variation: f64,
    pub ac_integral: f64,
    pub singular: f64,
    pub sum: f64,
    pub equality_expected: bool,
    pub continuous_curve: bool,
    pub passed: bool,
}

/// `Var(γ; J) ≤ ∫_J |γ̇| + ν_sing(J)`, with equality unless `J` keeps a jump
/// part at one of its included ends.
pub fn length_identity_check(
    curve: &Curve,
    nu: &SpeedMeasure,
    j: Interval,
    opts: &DecompositionOptions,
    tol: f64,
) -> Result<LengthIdentityReport> {
    let var = variation(curve, j, &nu.options().variation)?.value;
    let dec = decompose_interval(curve, nu, j, opts)?;
    let missed = if j.lo_closed { nu.atom_at(j.lo).map_or(0.0, |a| a.left_gap) } else { 0.0 }
        + if j.hi_closed { nu.atom_at(j.hi).map_or(0.0, |a| a.right_gap) } else { 0.0 };
    let equality_expected = missed == 0.0;
    let sum = dec.totals.ac + dec.totals.singular;
    let passed = var <= sum + tol && (!equality_expected || (var - sum).abs() <= tol);
    Ok(LengthIdentityReport {
        interval: j,
        variation: var,
        ac_integral: dec.totals.ac,
        singular: dec.totals.singular,
        sum,
        equality_expected,
        continuous_curve: nu.is_continuous(),
        passed,
    })
}

/// Eight-point Gauss–Legendre nodes and weights on `[-1, 1]`.
const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerIntegral {
    /// `None` when the shells toward an end stop shrinking.
    pub value: Option<f64>,
    pub ratio_lo: f64,
    pub ratio_hi: f64,
}

/// `∫_a^b |γ̇|^p` in dyadic shells toward both ends. Points where no density
/// estimate settles are treated as Lebesgue-null.
pub fn power_integral(curve: &Curve, a: f64, b: f64, p: f64, opts: &DerivativeOptions) -> Result<PowerIntegral> {
    const SHELLS: i32 = 30;
    let mid = a + (b - a) / 2.0;
    let half = mid - a;
    let mut total = 0.0;
    let mut finite = true;
    let mut ratios = [0.0; 2];
    for (side, toward) in [(0, a), (1, b)] {
        let sign = if side == 0 { 1.0 } else { -1.0 };
        let mut shells = Vec::with_capacity(SHELLS as usize);
        for k in 0..SHELLS {
            let (s0, s1) = (half * 2f64.powi(-(k + 1)), half * 2f64.powi(-k));
            let (c, r) = (0.5 * (s0 + s1), 0.5 * (s1 - s0));
            let mut s = 0.0;
            for (x, w) in GL8 {
                let t = toward + sign * (c + r * x);
                if let Some((d, _)) = point_density(curve, t, opts)? {
                    s += w * r * d.powf(p);
                }
            }
            shells.push(s);
        }
        total += shells.iter().sum::<f64>();
        let tail = &shells[shells.len() - 6..];
        let worst = tail
            .windows(2)
            .map(|w| if w[0] > 0.0 { w[1] / w[0] } else if w[1] > 0.0 { f64::INFINITY } else { 0.0 })
            .fold(0.0, f64::max);
        ratios[side] = worst;
        let last = tail[tail.len() - 1];
        if last == 0.0 {
            continue;
        }
        if worst <= 0.99 {
            total += last * worst / (1.0 - worst);
        } else {
            finite = false;
        }
    }
    Ok(PowerIntegral { value: finite.then_some(total), ratio_lo: ratios[0], ratio_hi: ratios[1] })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcpReport {
    pub p: f64,
    pub ac_loc: bool,
    pub certainty: Certainty,
    /// `∫ |γ̇|^p` over the domain; `None` when it diverges.
    pub integral: Option<f64>,
    pub ratio_lo: f64,
    pub ratio_hi: f64,
    /// `Var(γ; [s,t]) ≤ ∫_s^t |γ̇|` on every sampled piece.
    pub majorant_condition: bool,
    pub member: bool,
}

/// Membership in `AC^p`: absolutely continuous with `|γ̇| ∈ L^p`.
pub fn acp_classify(curve: &Curve, nu: &SpeedMeasure, p: f64, opts: &AcOptions) -> Result<AcpReport> {
    if !(p >= 1.0) {
        return Err(Error::Config(format!("AC^p needs p ≥ 1, got {p}")));
    }
    let verdict = banach_zaretsky_verdict(curve, Some(nu), opts)?;
    let d = curve.domain();
    let deriv = &opts.decomposition.derivative;
    let integral = power_integral(curve, d.lo, d.hi, p, deriv)?;

    const PIECES: usize = 8;
    let mut majorant_condition = true;
    for i in 0..PIECES {
        let s = d.lo + d.width() * (i as f64 / PIECES as f64);
        let t = if i + 1 == PIECES { d.hi } else { d.lo + d.width() * ((i + 1) as f64 / PIECES as f64) };
        let piece = Interval::new(s, t, d.contains(s), d.contains(t))?;
        let var = variation(curve, piece, &nu.options().variation)?.value;
        let bound = power_integral(curve, s, t, 1.0, deriv)?.value.unwrap_or(f64::INFINITY);
        if var > bound + 1e-4 * bound.max(1.0) {
            majorant_condition = false;
        }
    }

    Ok(AcpReport {
        p,
        ac_loc: verdict.ac_loc,
        certainty: verdict.certainty,
        integral: integral.value,
        ratio_lo: integral.ratio_lo,
        ratio_hi: integral.ratio_hi,
        majorant_condition,
        member: verdict.ac_loc && integral.value.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{Oracle, PowerParams, StepParams};
    use crate::space::{Point, Space};
    use crate::speed_measure::{build_speed_measure, SpeedMeasureOptions};
    use std::f64::consts::{PI, TAU};

    fn oracle(name: &str) -> Curve {
        Oracle::by_name(name).unwrap().curve().unwrap()
    }

    #[test]
    fn agreement_needs_matching_status() {
        let est = |value, status| MetricDerivativeEstimate { t: 0.3, value, status, h_used: 1e-6 };
        let ok = est(2.0, DerivativeStatus::Converged);
        assert!(estimates_agree(&ok, &est(2.0 + 1e-4, DerivativeStatus::Converged), 1e-4));
        assert!(!estimates_agree(&ok, &est(2.001, DerivativeStatus::Converged), 1e-4));
        assert!(!estimates_agree(&ok, &est(2.0, DerivativeStatus::NotResolved), 1e-4));
        // both sides see no limit; the values are whatever the last step gave
        let big = est(1e6, DerivativeStatus::Divergent);
        assert!(estimates_agree(&big, &est(1e6, DerivativeStatus::NotResolved), 1e-4));
    }

    fn nu(c: &Curve) -> SpeedMeasure {
        build_speed_measure(c, &SpeedMeasureOptions::default()).unwrap()
    }

    fn md(c: &Curve, t: f64) -> MetricDerivativeEstimate {
        metric_derivative(c, t, &DerivativeOptions::default()).unwrap()
    }

    #[test]
    fn metric_derivative_examples() {
        let arc = oracle("circle_arc");
        for t in [0.0, 1.0, PI, 5.0, TAU] {
            let e = md(&arc, t);
            assert!(e.converged() && (e.value - 1.0).abs() < 1e-9, "{e:?}");
        }
        let e = md(&oracle("cantor"), 0.5);
        assert!(e.converged() && e.value == 0.0);
        let e = md(&oracle("identity"), 0.3);
        assert!(e.converged() && (e.value - 1.0).abs() < 1e-12);
        assert_eq!(md(&oracle("step"), 0.5).status, DerivativeStatus::UndefinedAtJump);
    }

    #[test]
    fn snowflake_quotient_diverges() {
        let c = Curve::analytic(
            "snow",
            Space::snowflake(0.5).unwrap(),
            Interval::closed(0.0, 1.0),
            crate::curve::Analytic::continuous(Point::Scalar, false),
        )
        .unwrap();
        let e = md(&c, 0.5);
        assert_eq!(e.status, DerivativeStatus::Divergent);
        // the quotient is |ε|^-1/2 along the schedule
        assert!((e.value - e.h_used.powf(-0.5)).abs() < 1e-6 * e.value);
    }

    #[test]
    fn density_examples() {
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let d = density_profile(&oracle("identity"), &grid, &DerivativeOptions::default()).unwrap();
        assert!(d.iter().all(|p| (p.value - 1.0).abs() < 1e-9));

        let gap: Vec<f64> = (1..20).map(|i| 1.0 / 3.0 + i as f64 / 60.0).collect();
        let d = density_profile(&oracle("cantor"), &gap, &DerivativeOptions::default()).unwrap();
        assert!(d.iter().all(|p| p.value == 0.0 && p.source == DensitySource::MetricDerivative));
        let d = density_profile(&oracle("cantor_plus_linear"), &gap, &DerivativeOptions::default()).unwrap();
        assert!(d.iter().all(|p| (p.value - 1.0).abs() < 1e-9));
    }

    #[test]
    fn variation_quotient_of_sin() {
        let c = oracle("sin_wave");
        for t in [0.3, 1.0, 2.5, 4.0] {
            let e = variation_quotient(&c, t, &DerivativeOptions::default()).unwrap();
            assert!(e.converged() && (e.value - t.cos().abs()).abs() < 1e-4, "{e:?}");
        }
    }

    #[test]
    fn decomposition_examples() {
        let opts = DecompositionOptions::default();
        let c = oracle("identity");
        let d = decompose_interval(&c, &nu(&c), c.domain(), &opts).unwrap();
        assert!((d.totals.ac - 1.0).abs() < 1e-6 && d.totals.atomic == 0.0 && d.totals.sc < 1e-6);

        let c = oracle("cantor");
        let d = decompose_interval(&c, &nu(&c), c.domain(), &opts).unwrap();
        assert!(d.totals.ac < 1e-3 && d.totals.atomic == 0.0 && (d.totals.sc - 1.0).abs() < 1e-3, "{:?}", d.totals);

        let c = Curve::composite(
            "mixed",
            vec![oracle("cantor_plus_linear"), Oracle::Step(StepParams::cadlag(vec![0.75], vec![0.5])).curve().unwrap()],
        )
        .unwrap();
        let d = decompose_interval(&c, &nu(&c), c.domain(), &opts).unwrap();
        assert!((d.totals.ac - 1.0).abs() < 1e-3, "{:?}", d.totals);
        assert!((d.totals.atomic - 0.5).abs() < 1e-12);
        assert!((d.totals.sc - 1.0).abs() < 1e-3);
        assert_eq!(d.atomic.len(), 1);
    }

    #[test]
    fn mass_is_conserved_on_a_grid() {
        let c = oracle("staircase");
        let n = nu(&c);
        let grid: Vec<f64> = (0..=64).map(|i| i as f64 / 64.0).collect();
        let d = decompose(&c, &n, &grid, &DecompositionOptions::default()).unwrap();
        assert!((d.totals.nu - n.total_mass().unwrap()).abs() < 64.0 * 1e-6);
        assert!((d.totals.atomic - 1.0).abs() < 1e-12);
        assert!(d.density.iter().all(|p| !n.atoms().iter().any(|a| a.t == p.t)));
        let step = oracle("step");
        let d = decompose_interval(&step, &nu(&step), step.domain(), &DecompositionOptions::default()).unwrap();
        assert!(d.density.iter().all(|p| p.t != 0.5));
        assert_eq!(d.totals.atomic, 1.0);
    }

    #[test]
    fn length_identity_examples() {
        let opts = DecompositionOptions::default();
        let c = oracle("circle_arc");
        let r = length_identity_check(&c, &nu(&c), Interval::closed(0.0, TAU), &opts, 1e-4).unwrap();
        assert!(r.passed && (r.ac_integral - TAU).abs() < 1e-4 && r.singular < 1e-4, "{r:?}");

        let c = oracle("cantor");
        let r = length_identity_check(&c, &nu(&c), Interval::closed(0.0, 1.0), &opts, 1e-3).unwrap();
        assert!(r.passed && r.ac_integral < 1e-3 && (r.singular - 1.0).abs() < 1e-3, "{r:?}");

        let c = oracle("step");
        let r = length_identity_check(&c, &nu(&c), Interval::closed(0.5, 1.0), &opts, 1e-6).unwrap();
        assert!(r.passed && !r.equality_expected && r.variation == 0.0 && r.sum == 1.0, "{r:?}");
    }

    /// `∫_0^1 ((2/3) t^(-1/3))^p dt`, infinite for `p ≥ 3`.
    fn power_oracle(p: f64) -> f64 {
        if p < 3.0 {
            (2.0f64 / 3.0).powf(p) / (1.0 - p / 3.0)
        } else {
            f64::INFINITY
        }
    }

    #[test]
    fn power_integrals() {
        let c = Oracle::Power(PowerParams::default()).curve().unwrap();
        for p in [1.0, 2.0, 2.5] {
            let got = power_integral(&c, 0.0, 1.0, p, &DerivativeOptions::default()).unwrap();
            let want = power_oracle(p);
            assert!((got.value.unwrap() - want).abs() < 1e-3 * want, "p={p}: {got:?} vs {want}");
        }
        for p in [3.0, 4.0] {
            assert!(power_oracle(p).is_infinite());
            let got = power_integral(&c, 0.0, 1.0, p, &DerivativeOptions::default()).unwrap();
            assert_eq!(got.value, None, "p={p}: {got:?}");
        }
    }

    #[test]
    fn acp_rejects_small_p() {
        let c = oracle("identity");
        let e = acp_classify(&c, &nu(&c), 0.5, &AcOptions::default());
        assert!(matches!(e, Err(Error::Config(_))));
    }

    mod props {
        use proptest::prelude::*;

        use super::*;
        use crate::oracle::ORACLE_NAMES;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn density_is_nonnegative(k in 0..ORACLE_NAMES.len(), x in 0.0..=1.0f64) {
                let c = oracle(ORACLE_NAMES[k]);
                let d = c.domain();
                let t = d.lo + x * d.width();
                let e = metric_derivative(&c, t, &DerivativeOptions::default()).unwrap();
                prop_assert!(e.value >= 0.0);
                let pts = density_profile(&c, &[t], &DerivativeOptions::default()).unwrap();
                prop_assert!(pts[0].value >= 0.0 || pts[0].value.is_nan());
            }
        }
    }
}
