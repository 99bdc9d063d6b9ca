//! The invariant suite behind `verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use speedmeasure::ac_analysis::{banach_zaretsky_verdict, luzin_n_upper_bound, NestedNullSet};
use speedmeasure::curve::{estimate_one_sided_limits, one_sided_limits, Body, Curve, Interval, Schedule};
use speedmeasure::decomposition::{
    decompose_interval, estimates_agree, length_identity_check, metric_derivative, variation_quotient,
};
use speedmeasure::error::{Error, Result};
use speedmeasure::space::{metric_axiom_report, Metric, Point, Space};
use speedmeasure::speed_measure::{build_speed_measure, SpeedMeasure};
use speedmeasure::variation::{cumulative_profile, signed_variation, var_sum, variation};

use crate::run::{RunError, Settings};
use crate::spec::CurveSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Passed,
    Failed,
    /// The invariant has nothing to say about this curve.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub module: &'static str,
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub curve: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    /// One line per check.
    pub fn lines(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = match c.status {
                CheckStatus::Passed => "PASS",
                CheckStatus::Failed => "FAIL",
                CheckStatus::Skipped => "SKIP",
            };
            s.push_str(&format!("{tag} {} {}::{} {}\n", self.curve, c.module, c.name, c.detail));
        }
        s
    }
}

/// Random draws per sampled invariant.
const DRAWS: usize = 12;
/// Interior points for the derivative agreement check.
const AGREEMENT_POINTS: usize = 512;
/// Slack for identities that hold exactly in real arithmetic.
const ROUNDING: f64 = 1e-12;

struct Suite<'a> {
    curve: &'a Curve,
    settings: &'a Settings,
    rng: ChaCha8Rng,
    checks: Vec<Check>,
}

impl Suite<'_> {
    fn push(&mut self, module: &'static str, name: &'static str, ok: bool, detail: String) {
        let status = if ok { CheckStatus::Passed } else { CheckStatus::Failed };
        self.checks.push(Check { module, name, status, detail });
    }

    fn skip(&mut self, module: &'static str, name: &'static str, why: &str) {
        self.checks.push(Check { module, name, status: CheckStatus::Skipped, detail: why.into() });
    }

    fn tol(&self) -> f64 {
        self.settings.tolerances.tol
    }

    /// A time in the domain, avoiding open ends.
    fn time(&mut self) -> f64 {
        let d = self.curve.domain();
        loop {
            let t = self.rng.gen_range(d.lo..=d.hi);
            if d.contains(t) {
                return t;
            }
        }
    }

    fn sorted_times<const N: usize>(&mut self) -> [f64; N] {
        let mut ts = [0.0; N];
        for t in &mut ts {
            *t = self.time();
        }
        ts.sort_by(f64::total_cmp);
        ts
    }
}

/// Runs every invariant that applies to the curve of `spec`.
pub fn verify_curve(spec: &CurveSpec, settings: &Settings) -> Result<VerifyReport, RunError> {
    let curve = &spec.curve;
    let mut s = Suite { curve, settings, rng: ChaCha8Rng::seed_from_u64(settings.seed), checks: Vec::new() };
    metric_checks(&mut s)?;
    curve_checks(&mut s)?;
    variation_checks(&mut s)?;
    match build_speed_measure(curve, &settings.speed()) {
        Ok(nu) => {
            measure_checks(&mut s, &nu)?;
            decomposition_checks(&mut s, &nu)?;
            ac_checks(&mut s, &nu, spec.injective())?;
        }
        Err(Error::NotBoundedVariation { .. }) => {
            for (m, n) in MEASURE_CHECKS {
                s.skip(m, n, "not of bounded variation on the domain");
            }
        }
        Err(e) => return Err(e.into()),
    }
    let passed = s.checks.iter().all(|c| c.status != CheckStatus::Failed);
    Ok(VerifyReport { curve: curve.name().to_owned(), seed: settings.seed, passed, checks: s.checks })
}

const MEASURE_CHECKS: [(&str, &str); 13] = [
    ("speed_measure", "telescoping"),
    ("speed_measure", "open_interval_identity"),
    ("speed_measure", "atom_identity"),
    ("speed_measure", "sampled_total_mass"),
    ("decomposition", "ae_agreement"),
    ("decomposition", "mass_conservation"),
    ("decomposition", "nonnegativity"),
    ("decomposition", "atoms_outside_density"),
    ("decomposition", "length_identity"),
    ("ac_analysis", "probe_soundness"),
    ("ac_analysis", "cross_level_consistency"),
    ("ac_analysis", "luzin_monotone"),
    ("ac_analysis", "diameter_bound"),
];

fn metric_checks(s: &mut Suite) -> Result<()> {
    let mut samples: Vec<Point> = Vec::new();
    for _ in 0..8 {
        let t = s.time();
        samples.push(s.curve.eval(t)?);
    }
    if let Body::SampledCadlag(xs) = s.curve.body() {
        samples.extend(xs.iter().map(|(_, p)| p.clone()));
    }
    samples.dedup();
    let r = metric_axiom_report(s.curve.space(), &samples);
    s.push(
        "metric_spaces",
        "axioms",
        r.passed,
        format!("{} triples, {} failures", r.checked_triples, r.failures.len()),
    );

    let mut worst: f64 = 0.0;
    for _ in 0..DRAWS {
        let (x, y) = (Point::Scalar(s.rng.gen_range(-10.0..10.0)), Point::Scalar(s.rng.gen_range(-10.0..10.0)));
        let a = Space::Snowflake { alpha: 1.0 }.distance(&x, &y)?;
        let b = Space::RealLine.distance(&x, &y)?;
        worst = worst.max((a - b).abs());
    }
    s.push("metric_spaces", "snowflake_one_is_real_line", worst == 0.0, format!("max difference {worst:e}"));
    Ok(())
}

fn curve_checks(s: &mut Suite) -> Result<()> {
    let mut pure = true;
    for _ in 0..DRAWS {
        let t = s.time();
        pure &= s.curve.eval(t)? == s.curve.eval(t)?;
    }
    s.push("curves", "eval_pure", pure, format!("{DRAWS} repeated evaluations"));

    let schedule = Schedule::default();
    let gap_tol = s.settings.variation().gap_tol_for(s.curve);
    if let Body::SampledCadlag(xs) = s.curve.body() {
        let mut ok = true;
        for w in xs.windows(2) {
            let g = one_sided_limits(s.curve, w[1].0, &schedule, gap_tol)?;
            ok &= g.left_gap == s.curve.distance(&w[0].1, &w[1].1)? && g.right_gap == 0.0;
        }
        s.push("curves", "sampled_gaps", ok, format!("{} sample transitions", xs.len().saturating_sub(1)));
    } else {
        s.skip("curves", "sampled_gaps", "not a sampled curve");
    }

    let jumps = s.curve.declared_jumps().unwrap_or_default();
    if jumps.is_empty() {
        s.skip("curves", "declared_gaps_reproduced", "no declared jumps");
    } else {
        let mut worst: f64 = 0.0;
        for &t in &jumps {
            let exact = one_sided_limits(s.curve, t, &schedule, gap_tol)?;
            let est = estimate_one_sided_limits(s.curve, t, &schedule, gap_tol)?;
            worst = worst.max((exact.left_gap - est.left_gap).abs()).max((exact.right_gap - est.right_gap).abs());
        }
        s.push(
            "curves",
            "declared_gaps_reproduced",
            worst <= gap_tol,
            format!("{} jumps, max gap error {worst:e}", jumps.len()),
        );
    }
    Ok(())
}

fn var(s: &Suite, j: Interval) -> Result<f64> {
    Ok(variation(s.curve, j, &s.settings.variation())?.value)
}

fn variation_checks(s: &mut Suite) -> Result<()> {
    let tol = s.tol();
    let opts = s.settings.variation();
    if !variation(s.curve, s.curve.domain(), &opts)?.bounded {
        for n in ["additivity", "monotonicity", "sign_convention", "left_limit", "jump_additivity"] {
            s.skip("variation", n, "not of bounded variation on the domain");
        }
    } else {
        let mut worst: f64 = 0.0;
        for _ in 0..DRAWS {
            let [a, c, b] = s.sorted_times::<3>();
            let whole = var(s, Interval::closed(a, b))?;
            let parts = var(s, Interval::closed(a, c))? + var(s, Interval::closed(c, b))?;
            worst = worst.max((whole - parts).abs());
        }
        s.push("variation", "additivity", worst <= 3.0 * tol, format!("max defect {worst:e}"));

        let mut worst = f64::NEG_INFINITY;
        for _ in 0..DRAWS {
            let [a0, a, b, b0] = s.sorted_times::<4>();
            let inner = if a == b { Interval::point(a) } else { Interval::new(a, b, s.rng.gen(), s.rng.gen())? };
            worst = worst.max(var(s, inner)? - var(s, Interval::closed(a0, b0))?);
        }
        s.push("variation", "monotonicity", worst <= tol, format!("max excess {worst:e}"));

        let d = s.curve.domain();
        let c = s.time();
        let mut grid = s.sorted_times::<3>().to_vec();
        grid.push(c);
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let profile = cumulative_profile(s.curve, c, &grid, &opts)?;
        let mut worst: f64 = 0.0;
        for (i, &g) in grid.iter().enumerate() {
            let expect = if g <= c { -var(s, Interval::closed(g, c))? } else { var(s, Interval::closed(c, g))? };
            worst = worst.max((profile.v_left[i] - expect).abs());
        }
        let (x, y) = (s.time(), s.time());
        let flipped = signed_variation(s.curve, x, y, &opts)? + signed_variation(s.curve, y, x, &opts)?;
        s.push(
            "variation",
            "sign_convention",
            worst <= tol && flipped.abs() <= ROUNDING,
            format!("V(t) = ±Var between c and t within {worst:e}; Var(a,b) + Var(b,a) = {flipped:e}"),
        );

        let gaps = jump_gaps(s)?;
        let with_left: Vec<_> = gaps.iter().filter(|g| g.1 > 0.0 && g.0 > d.lo).copied().collect();
        if with_left.is_empty() {
            s.skip("variation", "left_limit", "no jump with a left gap");
            s.skip("variation", "jump_additivity", "no jump with a left gap");
        } else {
            let mut worst: f64 = 0.0;
            for &(t, lg) in &with_left {
                for k in [10, 20, 30] {
                    let h = d.width() * 2f64.powi(-k);
                    worst = worst.max((var(s, Interval::closed((t - h).max(d.lo), t))? - lg).abs());
                }
            }
            s.push("variation", "left_limit", worst <= tol, format!("max |Var([t-h, t]) - left gap| {worst:e}"));

            let mut worst: f64 = 0.0;
            for &(t, lg) in &with_left {
                let a = (t - 0.25 * d.width()).max(d.lo);
                let closed = var(s, Interval::left_open(a, t))?;
                let open = var(s, Interval::open(a, t))?;
                worst = worst.max((closed - open - lg).abs());
            }
            s.push(
                "variation",
                "jump_additivity",
                worst <= 2.0 * tol,
                format!("Var((a,t]) - Var((a,t)) - left gap, max {worst:e}"),
            );
        }
    }

    let mut ok = true;
    for _ in 0..DRAWS {
        let mut part: Vec<f64> = (0..8).map(|_| s.time()).collect();
        part.sort_by(f64::total_cmp);
        let coarse = var_sum(s.curve, &part)?;
        part.extend((0..8).map(|_| s.time()));
        part.sort_by(f64::total_cmp);
        let fine = var_sum(s.curve, &part)?;
        ok &= fine >= coarse - ROUNDING * coarse.max(1.0);
    }
    s.push("variation", "refinement_monotonicity", ok, format!("{DRAWS} refined partitions"));
    Ok(())
}

/// `(t, left_gap)` at every declared or sampled jump.
fn jump_gaps(s: &Suite) -> Result<Vec<(f64, f64)>> {
    let schedule = Schedule::default();
    let gap_tol = s.settings.variation().gap_tol_for(s.curve);
    let times: Vec<f64> = match s.curve.body() {
        Body::SampledCadlag(xs) => xs.iter().map(|x| x.0).collect(),
        _ => s.curve.declared_jumps().unwrap_or_default(),
    };
    times
        .into_iter()
        .filter(|t| s.curve.domain().contains(*t))
        .map(|t| one_sided_limits(s.curve, t, &schedule, gap_tol).map(|g| (t, g.left_gap)))
        .collect()
}

fn measure_checks(s: &mut Suite, nu: &SpeedMeasure) -> Result<()> {
    let tol = s.tol();
    let mut worst: f64 = 0.0;
    for _ in 0..DRAWS {
        let [a, b, c] = s.sorted_times::<3>();
        let whole = nu.measure_half_open(a, c)?;
        let parts = nu.measure_half_open(a, b)? + nu.measure_half_open(b, c)?;
        worst = worst.max((whole - parts).abs() / whole.max(1.0));
    }
    s.push("speed_measure", "telescoping", worst <= ROUNDING, format!("max relative defect {worst:e}"));

    let mut worst: f64 = 0.0;
    let mut drawn = 0;
    while drawn < DRAWS {
        let [a, b] = s.sorted_times::<2>();
        if a == b {
            continue;
        }
        drawn += 1;
        let j = Interval::open(a, b);
        worst = worst.max((nu.measure_interval(j)? - var(s, j)?).abs());
    }
    s.push(
        "speed_measure",
        "open_interval_identity",
        worst <= 2.0 * tol,
        format!("max |nu(J) - Var(J)| {worst:e}"),
    );

    if nu.atoms().is_empty() {
        s.skip("speed_measure", "atom_identity", "no atoms");
    } else {
        let d = s.curve.domain();
        let mut exact = true;
        let mut worst: f64 = 0.0;
        for a in nu.atoms() {
            exact &= a.mass == a.left_gap + a.right_gap;
            let h = d.width() * 2f64.powi(-30);
            let around = Interval::closed((a.t - h).max(d.lo), (a.t + h).min(d.hi));
            worst = worst.max((a.mass - var(s, around)?).abs());
        }
        s.push(
            "speed_measure",
            "atom_identity",
            exact && worst <= tol,
            format!("{} atoms, max |mass - Var([t-h, t+h])| {worst:e}", nu.atoms().len()),
        );
    }

    if let Body::SampledCadlag(xs) = s.curve.body() {
        let mut chords = 0.0;
        for w in xs.windows(2) {
            chords += s.curve.distance(&w[0].1, &w[1].1)?;
        }
        let total = nu.total_mass()?;
        s.push(
            "speed_measure",
            "sampled_total_mass",
            (total - chords).abs() <= ROUNDING * chords.max(1.0),
            format!("nu(domain) = {total}, chord sum = {chords}"),
        );
    } else {
        s.skip("speed_measure", "sampled_total_mass", "not a sampled curve");
    }
    Ok(())
}

fn decomposition_checks(s: &mut Suite, nu: &SpeedMeasure) -> Result<()> {
    let d = s.curve.domain();
    let dopts = s.settings.derivative();
    let mut agree = 0usize;
    let mut counted = 0usize;
    for i in 1..=AGREEMENT_POINTS {
        let t = d.lo + d.width() * i as f64 / (AGREEMENT_POINTS + 1) as f64;
        if nu.atom_at(t).is_some() {
            continue;
        }
        counted += 1;
        let m = metric_derivative(s.curve, t, &dopts)?;
        let q = variation_quotient(s.curve, t, &dopts)?;
        if estimates_agree(&m, &q, dopts.deriv_tol) {
            agree += 1;
        }
    }
    let share = agree as f64 / counted.max(1) as f64;
    s.push("decomposition", "ae_agreement", share >= 0.99, format!("{agree}/{counted} points agree"));

    let opts = s.settings.decomposition();
    let dec = decompose_interval(s.curve, nu, d, &opts)?;
    let total = nu.total_mass()?;
    let t = dec.totals;
    let defect = (t.ac + t.atomic + t.sc - total).abs();
    s.push(
        "decomposition",
        "mass_conservation",
        defect <= dec.cells.len() as f64 * dec.tol,
        format!("|ac + atomic + sc - nu(domain)| = {defect:e}"),
    );

    let dens_ok = dec.density.iter().all(|p| p.value >= 0.0);
    let sc_ok = dec.cells.iter().all(|c| c.sc >= -dec.tol);
    s.push(
        "decomposition",
        "nonnegativity",
        dens_ok && sc_ok,
        format!("{} density samples, {} cells", dec.density.len(), dec.cells.len()),
    );

    let outside = dec.density.iter().all(|p| nu.atom_at(p.t).is_none());
    let atom_sum: f64 = nu.atoms().iter().map(|a| a.mass).sum();
    s.push(
        "decomposition",
        "atoms_outside_density",
        outside && (t.atomic - atom_sum).abs() <= ROUNDING * atom_sum.max(1.0),
        format!("atomic part {} against atom masses {atom_sum}", t.atomic),
    );

    let li = length_identity_check(s.curve, nu, d, &opts, 10.0 * s.tol().max(opts.tol))?;
    s.push(
        "decomposition",
        "length_identity",
        li.passed,
        format!("Var = {}, ac + singular = {}", li.variation, li.sum),
    );
    Ok(())
}

fn ac_checks(s: &mut Suite, nu: &SpeedMeasure, injective: bool) -> Result<()> {
    let verdict = banach_zaretsky_verdict(s.curve, Some(nu), &s.settings.ac())?;
    match verdict.probe.as_ref() {
        Some(p) if p.violation => {
            let ok = match &p.witness {
                Some(w) => {
                    let chords = w.family.chord_sum(s.curve)?;
                    p.witness_sound
                        && chords > p.epsilon
                        && (chords - w.chord_sum).abs() <= ROUNDING * chords.max(1.0)
                        && (w.family.total_length() - w.total_length).abs() <= ROUNDING
                }
                None => false,
            };
            let detail = p.witness.as_ref().map_or("violation without witness".into(), |w| {
                format!("{} intervals, length {:e}, chord sum {}", w.family.len(), w.total_length, w.chord_sum)
            });
            s.push("ac_analysis", "probe_soundness", ok, detail);
        }
        _ => s.push("ac_analysis", "probe_soundness", true, "no violation reported, so no witness to re-check".into()),
    }
    s.push(
        "ac_analysis",
        "cross_level_consistency",
        verdict.consistent,
        format!("ac_loc = {}, numeric = {}", verdict.ac_loc, verdict.numeric_ac),
    );

    let d = s.curve.domain();
    let (lo, hi) = if d.is_closed() {
        (d.lo, d.hi)
    } else {
        let m = 1e-3 * d.width();
        (d.lo + m, d.hi - m)
    };
    let cover = NestedNullSet::cantor_generations(lo, hi, 8)?;
    let r = luzin_n_upper_bound(s.curve, &cover, nu, injective, s.tol())?;
    // Σ diam itself can grow when a cover piece wraps around (a full circle has
    // diameter π, its two first-generation arcs 4π/3 together); what shrinks
    // with the cover is Σ ν, and every later Σ diam stays below it.
    let tol = s.tol();
    let mut ok = true;
    let mut ceiling = f64::INFINITY;
    for g in &r.generations {
        ok &= g.measure_bound <= ceiling + tol && g.bound <= ceiling + tol;
        ceiling = ceiling.min(g.measure_bound);
    }
    s.push(
        "ac_analysis",
        "luzin_monotone",
        ok,
        format!(
            "{} generations; sum of nu nonincreasing and bounding later diameter sums; diameter sums monotone: {}",
            r.generations.len(),
            r.monotone
        ),
    );
    let ok = r.generations.iter().all(|g| g.diameters_within_measure);
    s.push("ac_analysis", "diameter_bound", ok, "diam <= nu on every cover interval".into());
    Ok(())
}
