//! The speed measure `ν`, the Lebesgue–Stieltjes measure of the
//! right-continuous modification `v(t) = V_γ(t+)` of the cumulative variation,
//! with the extra left-endpoint atom `ν({a}) = V_γ(a+) − V_γ(a)`.
//!
//! `ν` is stored as its distribution function on a grid plus an explicit atom
//! list. Off-grid values of `V_γ` are filled in by a variation computation on
//! the partial cell, so queries at arbitrary times stay consistent with
//! additivity.

use std::fmt::Write as _;

use serde::Serialize;

use crate::curve::{one_sided_limits, Curve, Interval, JumpGaps};
use crate::error::{Error, Result};
use crate::variation::{closed_variation, cumulative_profile, variation, VariationOptions, VariationProfile};

/// A point mass of `ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    pub t: f64,
    pub left_gap: f64,
    pub right_gap: f64,
    pub mass: f64,
}

impl From<JumpGaps> for Atom {
    fn from(g: JumpGaps) -> Self {
        Atom { t: g.t, left_gap: g.left_gap, right_gap: g.right_gap, mass: g.left_gap + g.right_gap }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedMeasureOptions {
    pub variation: VariationOptions,
    /// Uniform cells of the distribution-function grid.
    pub grid_cells: usize,
    /// Excess mass in a cell, beyond what its neighbours' densities explain,
    /// that triggers a jump probe on black-box curves.
    pub jump_floor: f64,
}

impl Default for SpeedMeasureOptions {
    fn default() -> Self {
        SpeedMeasureOptions { variation: VariationOptions::default(), grid_cells: 256, jump_floor: 1e-7 }
    }
}

impl SpeedMeasureOptions {
    pub fn with_tol(tol: f64) -> Self {
        SpeedMeasureOptions { variation: VariationOptions::with_tol(tol), ..Default::default() }
    }
}

#[derive(Debug, Clone)]
pub struct SpeedMeasure {
    curve: Curve,
    domain: Interval,
    profile: VariationProfile,
    atoms: Vec<Atom>,
    left_endpoint_mass: f64,
    opts: SpeedMeasureOptions,
}

/// Builds `ν` for a curve that is of bounded variation on its domain.
pub fn build_speed_measure(curve: &Curve, opts: &SpeedMeasureOptions) -> Result<SpeedMeasure> {
    if opts.grid_cells == 0 {
        return Err(Error::Config("speed measure grid needs at least one cell".into()));
    }
    let domain = curve.domain();
    let whole = variation(curve, domain, &opts.variation)?;
    if !whole.bounded || (!whole.converged && whole.residual > 1e3 * opts.variation.tol) {
        return Err(Error::NotBoundedVariation {
            lo: domain.lo,
            hi: domain.hi,
            bound: if whole.bounded { whole.value } else { opts.variation.blowup_bound },
        });
    }
    let base_grid = uniform_grid(domain, opts.grid_cells);
    let gap_tol = opts.variation.gap_tol_for(curve);

    let atoms = match curve.declared_jumps() {
        Some(jumps) => {
            let mut atoms = Vec::new();
            for t in jumps {
                let g = one_sided_limits(curve, t, &opts.variation.schedule, gap_tol)?;
                if g.mass() > 0.0 {
                    atoms.push(Atom::from(g));
                }
            }
            atoms
        }
        None => {
            let profile = build_profile(curve, &base_grid, &[], opts)?;
            scan_for_jumps(curve, &profile, opts)?
        }
    };
    let profile = build_profile(curve, &base_grid, &atoms, opts)?;

    let left_endpoint_mass = if domain.lo_closed {
        atoms.iter().find(|a| a.t == domain.lo).map_or(0.0, |a| a.mass)
    } else {
        0.0
    };

    Ok(SpeedMeasure { curve: curve.clone(), domain, profile, atoms, left_endpoint_mass, opts: opts.clone() })
}

/// `cells + 1` equally spaced times over the closure, dropping excluded ends.
pub fn uniform_grid(domain: Interval, cells: usize) -> Vec<f64> {
    if domain.lo == domain.hi {
        return vec![domain.lo];
    }
    (0..=cells)
        .map(|i| if i == cells { domain.hi } else { domain.lo + domain.width() * (i as f64 / cells as f64) })
        .filter(|t| domain.contains(*t))
        .collect()
}

fn build_profile(curve: &Curve, grid: &[f64], atoms: &[Atom], opts: &SpeedMeasureOptions) -> Result<VariationProfile> {
    let mut grid = grid.to_vec();
    grid.extend(atoms.iter().map(|a| a.t));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let domain = curve.domain();
    let c = if domain.lo_closed { domain.lo } else { grid[0] };
    let profile = cumulative_profile(curve, c, &grid, &opts.variation)?;
    let total = profile.v_left[profile.v_left.len() - 1] - profile.v_left[0];
    if !(total <= opts.variation.blowup_bound) {
        return Err(Error::NotBoundedVariation {
            lo: domain.lo,
            hi: domain.hi,
            bound: opts.variation.blowup_bound,
        });
    }
    Ok(profile)
}

/// Locates jumps of a black-box curve from cells whose mass is not explained
/// by the density of the neighbouring cells.
fn scan_for_jumps(curve: &Curve, profile: &VariationProfile, opts: &SpeedMeasureOptions) -> Result<Vec<Atom>> {
    let g = &profile.grid;
    let n = g.len();
    if n < 2 {
        return Ok(Vec::new());
    }
    let mass: Vec<f64> = profile.v_left.windows(2).map(|w| w[1] - w[0]).collect();
    let density: Vec<f64> = mass.iter().zip(g.windows(2)).map(|(m, w)| m / (w[1] - w[0])).collect();
    let gap_tol = opts.variation.gap_tol_for(curve);
    let mut atoms: Vec<Atom> = Vec::new();
    for i in 0..mass.len() {
        let width = g[i + 1] - g[i];
        let left = if i > 0 { density[i - 1] } else { f64::INFINITY };
        let right = if i + 1 < density.len() { density[i + 1] } else { f64::INFINITY };
        let mut local = left.min(right);
        if !local.is_finite() {
            local = 0.0;
        }
        if mass[i] <= width * local + opts.jump_floor {
            continue;
        }
        if let Some(atom) = locate_jump(curve, g[i], g[i + 1], opts, gap_tol)? {
            if atom.mass > opts.jump_floor && !atoms.iter().any(|a| a.t == atom.t) {
                atoms.push(atom);
            }
        }
    }
    // a jump sitting on a grid point
    for &t in g {
        if atoms.iter().any(|a| a.t == t) {
            continue;
        }
        if let Ok(gaps) = one_sided_limits(curve, t, &opts.variation.schedule, gap_tol) {
            if gaps.mass() > opts.jump_floor {
                atoms.push(Atom::from(gaps));
            }
        }
    }
    atoms.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(atoms)
}

/// Bisects `[lo, hi]` toward the half carrying more variation and probes the
/// one-sided limits at the end of the bracket.
fn locate_jump(curve: &Curve, mut lo: f64, mut hi: f64, opts: &SpeedMeasureOptions, gap_tol: f64) -> Result<Option<Atom>> {
    let probe_opts = VariationOptions { min_depth: 2, ..opts.variation.clone() };
    let resolution = (hi - lo) * 1e-13;
    while hi - lo > resolution {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        let left = closed_variation(curve, lo, mid, &probe_opts)?.value;
        let right = closed_variation(curve, mid, hi, &probe_opts)?.value;
        if left >= right {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    for t in [hi, lo] {
        match one_sided_limits(curve, t, &opts.variation.schedule, gap_tol) {
            Ok(g) if g.mass() > opts.jump_floor => return Ok(Some(Atom::from(g))),
            Ok(_) | Err(Error::LimitNotResolved { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

impl SpeedMeasure {
    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn profile(&self) -> &VariationProfile {
        &self.profile
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn left_endpoint_mass(&self) -> f64 {
        self.left_endpoint_mass
    }

    pub fn options(&self) -> &SpeedMeasureOptions {
        &self.opts
    }

    pub fn atom_at(&self, t: f64) -> Option<&Atom> {
        self.atoms
            .binary_search_by(|a| a.t.total_cmp(&t))
            .ok()
            .map(|i| &self.atoms[i])
    }

    /// `ν({t})`.
    pub fn atom_mass(&self, t: f64) -> f64 {
        self.atom_at(t).map_or(0.0, |a| a.mass)
    }

    fn cell_options(&self) -> VariationOptions {
        let cells = (self.profile.grid.len().max(2) - 1) as f64;
        VariationOptions { tol: self.opts.variation.tol / cells, ..self.opts.variation.clone() }
    }

    /// `V_γ(t)` relative to the profile's base point.
    pub fn cumulative(&self, t: f64) -> Result<f64> {
        self.curve.check_time(t)?;
        let p = &self.profile;
        let opts = self.cell_options();
        match p.floor_index(t) {
            Some(i) if p.grid[i] == t => Ok(p.v_left[i]),
            Some(i) => Ok(p.v_left[i] + closed_variation(&self.curve, p.grid[i], t, &opts)?.value),
            None => Ok(p.v_left[0] - closed_variation(&self.curve, t, p.grid[0], &opts)?.value),
        }
    }

    /// `v(t) = V_γ(t+)`.
    pub fn distribution(&self, t: f64) -> Result<f64> {
        let right = self.atom_at(t).map_or(0.0, |a| a.right_gap);
        Ok(self.cumulative(t)? + right)
    }

    /// `V_γ(t−)`.
    fn distribution_left(&self, t: f64) -> Result<f64> {
        let left = self.atom_at(t).map_or(0.0, |a| a.left_gap);
        Ok(self.cumulative(t)? - left)
    }

    /// `V_γ(lo+)` at an open lower end of the domain.
    fn open_lo_limit(&self) -> Result<f64> {
        let g0 = self.profile.grid[0];
        let piece = variation(&self.curve, Interval::new(self.domain.lo, g0, false, true)?, &self.cell_options())?;
        Ok(self.profile.v_left[0] - piece.value)
    }

    /// `V_γ(hi−)` at an open upper end of the domain.
    fn open_hi_limit(&self) -> Result<f64> {
        let p = &self.profile;
        let last = p.grid.len() - 1;
        let piece = variation(&self.curve, Interval::new(p.grid[last], self.domain.hi, true, false)?, &self.cell_options())?;
        Ok(p.v_left[last] + piece.value)
    }

    /// `ν(J)` for any subinterval, honouring its end types.
    pub fn measure_interval(&self, j: Interval) -> Result<f64> {
        if !j.is_subset_of(&self.domain) {
            return Err(Error::Domain(format!("{j} is not inside {}", self.domain)));
        }
        if j.lo == j.hi {
            return Ok(self.atom_mass(j.lo));
        }
        let upper = if j.hi_closed {
            self.distribution(j.hi)?
        } else if self.domain.contains(j.hi) {
            self.distribution_left(j.hi)?
        } else {
            self.open_hi_limit()?
        };
        let lower = if j.lo_closed {
            self.distribution_left(j.lo)?
        } else if self.domain.contains(j.lo) {
            self.distribution(j.lo)?
        } else {
            self.open_lo_limit()?
        };
        Ok((upper - lower).max(0.0))
    }

    /// `V_γ` at sorted times, glued from cheap per-gap refinements.
    pub fn cumulative_many(&self, points: &[f64]) -> Result<Vec<f64>> {
        if points.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config("points must be sorted".into()));
        }
        let Some(&first) = points.first() else {
            return Ok(Vec::new());
        };
        let light = VariationOptions {
            tol: self.opts.variation.tol / (points.len() + 1) as f64,
            min_depth: 1,
            ..self.opts.variation.clone()
        };
        let mut out = Vec::with_capacity(points.len());
        let mut acc = self.cumulative(first)?;
        out.push(acc);
        for w in points.windows(2) {
            acc += closed_variation(&self.curve, w[0], w[1], &light)?.value;
            out.push(acc);
        }
        Ok(out)
    }

    /// `ν(J)` for many pairwise disjoint intervals at once, in input order.
    pub fn masses(&self, intervals: &[Interval]) -> Result<Vec<f64>> {
        check_disjoint(intervals)?;
        let mut points = Vec::with_capacity(2 * intervals.len());
        let mut fallback = vec![false; intervals.len()];
        for (k, j) in intervals.iter().enumerate() {
            if !j.is_subset_of(&self.domain) {
                return Err(Error::Domain(format!("{j} is not inside {}", self.domain)));
            }
            if self.domain.contains(j.lo) && self.domain.contains(j.hi) {
                points.push(j.lo);
                points.push(j.hi);
            } else {
                fallback[k] = true;
            }
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        let values = self.cumulative_many(&points)?;
        let v_at = |t: f64| values[points.partition_point(|p| *p < t)];
        let mut out = Vec::with_capacity(intervals.len());
        for (k, j) in intervals.iter().enumerate() {
            if fallback[k] {
                out.push(self.measure_interval(*j)?);
                continue;
            }
            if j.lo == j.hi {
                out.push(self.atom_mass(j.lo));
                continue;
            }
            let hi_atom = self.atom_at(j.hi);
            let lo_atom = self.atom_at(j.lo);
            let upper = v_at(j.hi)
                + if j.hi_closed { hi_atom.map_or(0.0, |a| a.right_gap) } else { -hi_atom.map_or(0.0, |a| a.left_gap) };
            let lower = v_at(j.lo)
                + if j.lo_closed { -lo_atom.map_or(0.0, |a| a.left_gap) } else { lo_atom.map_or(0.0, |a| a.right_gap) };
            out.push((upper - lower).max(0.0));
        }
        Ok(out)
    }

    /// `ν((s, t])`.
    pub fn measure_half_open(&self, s: f64, t: f64) -> Result<f64> {
        self.measure_interval(Interval::new(s, t, s == t, true)?)
    }

    /// `ν` of a union of pairwise disjoint intervals.
    pub fn measure_finite_union(&self, intervals: &[Interval]) -> Result<f64> {
        check_disjoint(intervals)?;
        intervals.iter().map(|j| self.measure_interval(*j)).sum()
    }

    /// `ν(domain)`.
    pub fn total_mass(&self) -> Result<f64> {
        self.measure_interval(self.domain)
    }

    /// True iff `ν` has no atoms, which happens exactly for curves.
    pub fn is_continuous(&self) -> bool {
        self.atoms.is_empty() && self.left_endpoint_mass == 0.0
    }

    /// `t, V(t), v(t), cumulative atom mass` on the profile grid.
    pub fn profile_csv(&self) -> String {
        let mut out = String::from("t,V,v,cumulative_atom_mass\n");
        let mut atom_mass = 0.0;
        let mut next = 0;
        for (i, &t) in self.profile.grid.iter().enumerate() {
            while next < self.atoms.len() && self.atoms[next].t <= t {
                atom_mass += self.atoms[next].mass;
                next += 1;
            }
            let _ = writeln!(out, "{t},{},{},{atom_mass}", self.profile.v_left[i], self.profile.v_right[i]);
        }
        out
    }

    pub fn atoms_csv(&self) -> String {
        let mut out = String::from("t,left_gap,right_gap,mass\n");
        for a in &self.atoms {
            let _ = writeln!(out, "{},{},{},{}", a.t, a.left_gap, a.right_gap, a.mass);
        }
        out
    }
}

pub fn measure_interval(nu: &SpeedMeasure, j: Interval) -> Result<f64> {
    nu.measure_interval(j)
}

pub fn measure_finite_union(nu: &SpeedMeasure, intervals: &[Interval]) -> Result<f64> {
    nu.measure_finite_union(intervals)
}

pub fn continuity_verdict(nu: &SpeedMeasure) -> bool {
    nu.is_continuous()
}

pub(crate) fn check_disjoint(intervals: &[Interval]) -> Result<()> {
    let mut sorted: Vec<&Interval> = intervals.iter().collect();
    sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
    for w in sorted.windows(2) {
        let (a, b) = (w[0], w[1]);
        let overlap = b.lo < a.hi || (b.lo == a.hi && a.hi_closed && b.lo_closed);
        if overlap {
            return Err(Error::Config(format!("intervals {a} and {b} overlap")));
        }
    }
    Ok(())
}

/// Comparison of `Var(γ; J)` with `ν(J)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarMeasureReport {
    pub interval: Interval,
    pub variation: f64,
    pub measure: f64,
    pub difference: f64,
    /// Continuity of `γ` at each end of `J`, whether or not the end is included.
    pub lo_continuous: bool,
    pub hi_continuous: bool,
    /// Every end that belongs to `J` is a continuity point.
    pub included_ends_continuous: bool,
    /// Equality predicted from the jump parts `J` cuts through.
    pub equality_expected: bool,
    pub equal: bool,
    pub passed: bool,
}

/// Checks `Var(γ; J) ≤ ν(J)`, with equality when the included ends of `J`
/// are continuity points.
pub fn var_vs_measure_check(curve: &Curve, nu: &SpeedMeasure, j: Interval, tol: f64) -> Result<VarMeasureReport> {
    let var = variation(curve, j, &nu.opts.variation)?;
    let measure = nu.measure_interval(j)?;
    let lo_atom = nu.atom_at(j.lo).copied();
    let hi_atom = nu.atom_at(j.hi).copied();
    let lo_continuous = lo_atom.is_none();
    let hi_continuous = hi_atom.is_none();
    let included_ends_continuous = (!j.lo_closed || lo_continuous) && (!j.hi_closed || hi_continuous);
    // Var misses exactly the left gap at an included lower end and the right
    // gap at an included upper end.
    let missed = if j.lo_closed { lo_atom.map_or(0.0, |a| a.left_gap) } else { 0.0 }
        + if j.hi_closed { hi_atom.map_or(0.0, |a| a.right_gap) } else { 0.0 };
    let equality_expected = missed == 0.0;
    let difference = measure - var.value;
    let equal = difference.abs() <= tol;
    let bound_ok = var.value <= measure + tol;
    let passed = bound_ok
        && (!included_ends_continuous || equal)
        && (equality_expected == equal || (missed > 0.0 && missed <= tol));
    Ok(VarMeasureReport {
        interval: j,
        variation: var.value,
        measure,
        difference,
        lo_continuous,
        hi_continuous,
        included_ends_continuous,
        equality_expected,
        equal,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{cantor, Oracle, StepParams};
    use crate::space::{Point, Space};

    fn nu_of(name: &str) -> SpeedMeasure {
        let c = Oracle::by_name(name).unwrap().curve().unwrap();
        build_speed_measure(&c, &SpeedMeasureOptions::default()).unwrap()
    }

    fn spike_nu() -> SpeedMeasure {
        let c = Oracle::Step(StepParams::spike(0.5, 5.0)).curve().unwrap();
        build_speed_measure(&c, &SpeedMeasureOptions::default()).unwrap()
    }

    /// Cantor measure of `(0, x]` for `x = num / 3^k`, by counting ternary
    /// digits: each digit 2 before the first 1 adds `2^-i`.
    fn cantor_measure_triadic(num: u64, k: u32) -> f64 {
        let mut digits = Vec::new();
        let mut n = num;
        for _ in 0..k {
            digits.push(n % 3);
            n /= 3;
        }
        digits.reverse();
        let mut acc = 0.0;
        for (i, d) in digits.iter().enumerate() {
            let w = 0.5f64.powi(i as i32 + 1);
            match d {
                0 => {}
                1 => return acc + w,
                _ => acc += w,
            }
        }
        acc
    }

    #[test]
    fn atoms_of_steps() {
        let nu = nu_of("step");
        assert_eq!(nu.atoms(), &[Atom { t: 0.5, left_gap: 1.0, right_gap: 0.0, mass: 1.0 }]);
        let nu = spike_nu();
        assert_eq!(nu.atoms(), &[Atom { t: 0.5, left_gap: 5.0, right_gap: 5.0, mass: 10.0 }]);
        assert!(nu_of("cantor").atoms().is_empty());
    }

    #[test]
    fn identity_measure_is_lebesgue() {
        let nu = nu_of("identity");
        let m = nu.measure_interval(Interval::left_open(0.2, 0.5)).unwrap();
        assert!((m - 0.3).abs() < 1e-12);
    }

    #[test]
    fn step_point_masses() {
        let nu = nu_of("step");
        assert_eq!(nu.measure_interval(Interval::point(0.5)).unwrap(), 1.0);
        assert_eq!(nu.measure_interval(Interval::left_open(0.5, 1.0)).unwrap(), 0.0);
        assert_eq!(nu.measure_interval(Interval::closed(0.5, 1.0)).unwrap(), 1.0);
        assert_eq!(nu.measure_interval(Interval::open(0.4, 0.5)).unwrap(), 0.0);
        assert_eq!(nu.measure_interval(Interval::left_open(0.4, 0.5)).unwrap(), 1.0);
        assert_eq!(nu.measure_interval(Interval::right_open(0.5, 0.6)).unwrap(), 1.0);
    }

    #[test]
    fn cantor_interval_masses() {
        let nu = nu_of("cantor");
        let gap = nu.measure_interval(Interval::left_open(1.0 / 3.0, 2.0 / 3.0)).unwrap();
        assert!(gap.abs() < 1e-9);
        let first = nu.measure_interval(Interval::left_open(0.0, 1.0 / 3.0)).unwrap();
        assert_eq!(cantor_measure_triadic(1, 1), 0.5);
        assert!((first - cantor_measure_triadic(1, 1)).abs() < 1e-9);
        for num in [1u64, 2, 5, 7, 20, 26] {
            let x = num as f64 / 27.0;
            let m = nu.measure_interval(Interval::left_open(0.0, x)).unwrap();
            assert!((m - cantor_measure_triadic(num, 3)).abs() < 1e-9, "{num}/27");
        }
    }

    #[test]
    fn finite_unions() {
        let nu = nu_of("identity");
        let m = nu
            .measure_finite_union(&[Interval::left_open(0.0, 0.1), Interval::left_open(0.5, 0.6)])
            .unwrap();
        assert!((m - 0.2).abs() < 1e-12);

        let nu_c = nu_of("cantor");
        let cover: Vec<Interval> = [0.0, 2.0, 6.0, 8.0]
            .iter()
            .map(|s| Interval::closed(s / 9.0, (s + 1.0) / 9.0))
            .collect();
        assert!((nu_c.measure_finite_union(&cover).unwrap() - 1.0).abs() < 1e-9);

        let nu_s = nu_of("step");
        let m = nu_s
            .measure_finite_union(&[Interval::left_open(0.0, 0.4), Interval::left_open(0.6, 1.0)])
            .unwrap();
        assert_eq!(m, 0.0);

        let e = nu.measure_finite_union(&[Interval::closed(0.0, 0.5), Interval::closed(0.5, 0.6)]);
        assert!(matches!(e, Err(Error::Config(_))));
    }

    #[test]
    fn outside_domain() {
        let nu = nu_of("identity");
        assert!(matches!(nu.measure_interval(Interval::closed(0.5, 1.5)), Err(Error::Domain(_))));
    }

    #[test]
    fn var_vs_measure_examples() {
        let step = Oracle::by_name("step").unwrap().curve().unwrap();
        let nu = nu_of("step");
        let r = var_vs_measure_check(&step, &nu, Interval::closed(0.5, 1.0), 1e-6).unwrap();
        assert_eq!((r.variation, r.measure), (0.0, 1.0));
        assert!(!r.equal && !r.lo_continuous && r.passed);
        let r = var_vs_measure_check(&step, &nu, Interval::open(0.4, 0.6), 1e-6).unwrap();
        assert_eq!((r.variation, r.measure), (1.0, 1.0));
        assert!(r.equal && r.passed);

        let cantor_c = Oracle::by_name("cantor").unwrap().curve().unwrap();
        let nu = nu_of("cantor");
        for j in [Interval::closed(0.1, 0.8), Interval::open(0.0, 0.3), Interval::right_open(0.25, 0.75)] {
            let r = var_vs_measure_check(&cantor_c, &nu, j, 1e-6).unwrap();
            assert!(r.equal && r.passed, "{r:?}");
        }
    }

    #[test]
    fn left_continuous_jump_keeps_equality() {
        // γ = 0 on [0, 0.5], 1 after: the jump part sits to the right of 0.5
        let jumps = vec![crate::oracle::StepJump { t: 0.5, at: 0.0, after: 1.0 }];
        let c = Oracle::Step(StepParams { jumps: Some(jumps), ..Default::default() }).curve().unwrap();
        let nu = build_speed_measure(&c, &SpeedMeasureOptions::default()).unwrap();
        let r = var_vs_measure_check(&c, &nu, Interval::closed(0.5, 1.0), 1e-6).unwrap();
        assert!(!r.included_ends_continuous);
        assert!(r.equality_expected && r.equal && r.passed);
    }

    #[test]
    fn continuity_verdicts() {
        assert!(continuity_verdict(&nu_of("cantor")));
        assert!(continuity_verdict(&nu_of("circle_arc")));
        assert!(!continuity_verdict(&nu_of("step")));
    }

    #[test]
    fn left_endpoint_atom() {
        let c = Oracle::Step(StepParams::cadlag(vec![0.0], vec![2.0])).curve().unwrap();
        // γ(0) = 2 = γ(0+): no atom; use a spike at the left end instead
        let nu = build_speed_measure(&c, &SpeedMeasureOptions::default()).unwrap();
        assert_eq!(nu.left_endpoint_mass(), 0.0);
        let c = Oracle::Step(StepParams::spike(0.0, 3.0)).curve().unwrap();
        let nu = build_speed_measure(&c, &SpeedMeasureOptions::default()).unwrap();
        assert_eq!(nu.left_endpoint_mass(), 3.0);
        assert_eq!(nu.atoms()[0].left_gap, 0.0);
        assert!(!nu.is_continuous());
        assert_eq!(nu.total_mass().unwrap(), 3.0);
    }

    #[test]
    fn total_mass_of_sampled_path_is_chord_sum() {
        let c = Curve::sampled(
            "path",
            Space::Discrete,
            vec![(0.0, Point::label("a")), (0.3, Point::label("b")), (0.7, Point::label("c"))],
            Some(Interval::closed(0.0, 1.0)),
        )
        .unwrap();
        let nu = build_speed_measure(&c, &SpeedMeasureOptions::default()).unwrap();
        assert_eq!(nu.atoms().len(), 2);
        assert_eq!(nu.total_mass().unwrap(), 2.0);
        assert!(!nu.is_continuous());
    }

    #[test]
    fn black_box_jump_is_found() {
        let t_star = 1.0 / std::f64::consts::PI;
        let c = Curve::analytic(
            "bb",
            Space::RealLine,
            Interval::closed(0.0, 1.0),
            crate::curve::Analytic::black_box(move |t| Point::Scalar(t + if t >= t_star { 2.0 } else { 0.0 })),
        )
        .unwrap();
        let nu = build_speed_measure(&c, &SpeedMeasureOptions::default()).unwrap();
        assert_eq!(nu.atoms().len(), 1, "{:?}", nu.atoms());
        let a = nu.atoms()[0];
        assert!((a.t - t_star).abs() < 1e-12);
        assert!((a.mass - 2.0).abs() < 1e-6);
        assert!((nu.total_mass().unwrap() - 3.0).abs() < 1e-6);
    }

    #[test]
    fn cantor_distribution_is_cantor_function() {
        let nu = nu_of("cantor");
        for i in 0..=50 {
            let t = i as f64 / 50.0;
            assert!((nu.distribution(t).unwrap() - cantor(t)).abs() < 1e-9);
        }
    }

    #[test]
    fn batch_masses_match_single_queries() {
        for nu in [nu_of("cantor"), spike_nu(), nu_of("staircase"), nu_of("sin_wave")] {
            let d = nu.domain();
            let w = d.width();
            let js = vec![
                Interval::closed(d.lo, d.lo + 0.1 * w),
                Interval::open(d.lo + 0.1 * w, d.lo + 0.5 * w),
                Interval::closed(d.lo + 0.5 * w, d.lo + 0.6 * w),
                Interval::left_open(d.lo + 0.6 * w, d.hi),
            ];
            let batch = nu.masses(&js).unwrap();
            for (j, m) in js.iter().zip(batch) {
                assert!((nu.measure_interval(*j).unwrap() - m).abs() < 1e-6, "{j}");
            }
        }
    }

    #[test]
    fn non_bv_curve_is_refused() {
        let c = Curve::analytic(
            "snow",
            Space::snowflake(0.5).unwrap(),
            Interval::closed(0.0, 1.0),
            crate::curve::Analytic::continuous(Point::Scalar, false),
        )
        .unwrap();
        let opts = SpeedMeasureOptions {
            variation: VariationOptions { blowup_bound: 1e3, ..Default::default() },
            ..Default::default()
        };
        assert!(matches!(build_speed_measure(&c, &opts), Err(Error::NotBoundedVariation { .. })));
    }

    #[test]
    fn csv_exports() {
        let nu = nu_of("step");
        let csv = nu.profile_csv();
        assert!(csv.starts_with("t,V,v,cumulative_atom_mass\n0,0,0,0\n"));
        assert_eq!(nu.atoms_csv(), "t,left_gap,right_gap,mass\n0.5,1,0,1\n");
    }

    #[test]
    fn telescoping() {
        let nu = nu_of("sin_wave");
        let g = &nu.profile().grid;
        for w in g.windows(3).step_by(7) {
            let (s, t, u) = (w[0], w[1], w[2]);
            let su = nu.measure_half_open(s, u).unwrap();
            let st = nu.measure_half_open(s, t).unwrap();
            let tu = nu.measure_half_open(t, u).unwrap();
            assert!((su - st - tu).abs() < 1e-12);
        }
    }

    mod props {
        use std::sync::OnceLock;

        use proptest::prelude::*;

        use super::*;
        use crate::oracle::ORACLE_NAMES;

        fn measures() -> &'static Vec<(Curve, SpeedMeasure)> {
            static CELL: OnceLock<Vec<(Curve, SpeedMeasure)>> = OnceLock::new();
            CELL.get_or_init(|| {
                ORACLE_NAMES
                    .iter()
                    .map(|n| {
                        let c = Oracle::by_name(n).unwrap().curve().unwrap();
                        let nu = build_speed_measure(&c, &SpeedMeasureOptions::default()).unwrap();
                        (c, nu)
                    })
                    .collect()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn open_interval_measure_is_variation(k in 0..ORACLE_NAMES.len(), x in 0.0..1.0f64, y in 0.0..1.0f64) {
                let (c, nu) = &measures()[k];
                let d = c.domain();
                let (x, y) = if x < y { (x, y) } else { (y, x) };
                prop_assume!(y - x > 1e-9);
                let j = Interval::open(d.lo + x * d.width(), d.lo + y * d.width());
                let var = variation(c, j, &nu.options().variation).unwrap().value;
                let m = nu.measure_interval(j).unwrap();
                prop_assert!((m - var).abs() <= 2e-6, "{} on {j}: ν = {m}, Var = {var}", c.name());
            }

            #[test]
            fn half_open_masses_telescope(k in 0..ORACLE_NAMES.len(), mut xs in prop::collection::vec(0.0..1.0f64, 3)) {
                let (c, nu) = &measures()[k];
                let d = c.domain();
                xs.sort_by(f64::total_cmp);
                let [s, t, u] = [xs[0], xs[1], xs[2]].map(|x| d.lo + x * d.width());
                let whole = nu.measure_half_open(s, u).unwrap();
                let parts = nu.measure_half_open(s, t).unwrap() + nu.measure_half_open(t, u).unwrap();
                prop_assert!((whole - parts).abs() <= 2e-6);
                prop_assert!(whole >= 0.0);
            }

            #[test]
            fn atoms_are_jump_sizes(k in 0..ORACLE_NAMES.len()) {
                let (_, nu) = &measures()[k];
                for a in nu.atoms() {
                    prop_assert_eq!(a.mass, a.left_gap + a.right_gap);
                    prop_assert!(a.mass > 0.0);
                    let jump = nu.measure_interval(Interval::point(a.t)).unwrap();
                    prop_assert_eq!(jump, a.mass);
                }
            }
        }
    }
}
