//! Runs the analyses a spec asks for, in dependency order.

use std::path::Path;

use serde::Serialize;
use speedmeasure::ac_analysis::{
    banach_zaretsky_verdict, luzin_n_upper_bound, AcOptions, BzVerdict, LuzinReport, NullSetDescriptor,
};
use speedmeasure::curve::{Curve, Interval};
use speedmeasure::decomposition::{
    acp_classify, decompose_interval, length_identity_check, AcpReport, DecompositionOptions, DecompositionTotals,
    DensitySource, DerivativeOptions, LengthIdentityReport, LebesgueDecomposition,
};
use speedmeasure::error::Error;
use speedmeasure::space::Space;
use speedmeasure::speed_measure::{build_speed_measure, Atom, SpeedMeasure, SpeedMeasureOptions};
use speedmeasure::variation::{variation, Variation, VariationOptions};

use crate::report::{render, write_atomic, Format};
use crate::spec::{Analysis, CurveSource, CurveSpec, Tolerances};
use crate::verify::{verify_curve, VerifyReport};
use crate::ExitStatus;

/// Everything that shapes the numerics besides the curve spec.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl Settings {
    pub fn variation(&self) -> VariationOptions {
        let t = &self.tolerances;
        let base = VariationOptions::default();
        VariationOptions {
            tol: t.tol,
            max_depth: t.max_depth,
            min_depth: base.min_depth.min(t.max_depth),
            blowup_bound: t.blowup_bound,
            ..base
        }
    }

    pub fn speed(&self) -> SpeedMeasureOptions {
        SpeedMeasureOptions { variation: self.variation(), grid_cells: self.tolerances.grid, ..Default::default() }
    }

    pub fn derivative(&self) -> DerivativeOptions {
        DerivativeOptions { deriv_tol: self.tolerances.deriv_tol, ..Default::default() }
    }

    pub fn decomposition(&self) -> DecompositionOptions {
        DecompositionOptions { cells: self.tolerances.grid, derivative: self.derivative(), ..Default::default() }
    }

    pub fn ac(&self) -> AcOptions {
        AcOptions { speed: self.speed(), decomposition: self.decomposition(), ..Default::default() }
    }
}

/// Nested cover used by `luzin` when a spec file names none.
pub const DEFAULT_NULL_SET: NullSetDescriptor = NullSetDescriptor::CantorGenerations { depth: 15, lo: None, hi: None };

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveInfo {
    pub name: String,
    pub space: Space,
    pub domain: Interval,
    pub source: CurveSource,
}

/// A block that could not be computed because the curve is not of bounded
/// variation on its domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Block<T> {
    Done(T),
    Skipped { skipped: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedMeasureBlock {
    pub total_mass: f64,
    pub continuous: bool,
    pub left_endpoint_mass: f64,
    pub atoms: Vec<Atom>,
    pub grid_points: usize,
    pub converged: bool,
    pub refinement_depth: u32,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensitySources {
    pub metric_derivative: usize,
    pub variation_quotient: usize,
    pub interpolated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionBlock {
    pub totals: DecompositionTotals,
    pub cells: usize,
    pub clamped_cells: usize,
    pub tol: f64,
    /// How each density sample was obtained; interpolated samples are the
    /// ones where no estimate settled.
    pub density_sources: DensitySources,
    pub length_identity: LengthIdentityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LuzinBlock {
    pub null_set: NullSetDescriptor,
    pub injective: bool,
    #[serde(flatten)]
    pub report: LuzinReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub tol: f64,
    pub max_depth: u32,
    pub min_depth: u32,
    pub blowup_bound: f64,
    pub grid: usize,
    pub deriv_tol: f64,
    pub probe_budget: usize,
    pub probe_bases: Vec<u32>,
    pub measure_budget: usize,
    pub seed: u64,
}

impl Provenance {
    pub fn new(settings: &Settings) -> Self {
        let var = settings.variation();
        let ac = settings.ac();
        Provenance {
            version: env!("CARGO_PKG_VERSION"),
            tol: var.tol,
            max_depth: var.max_depth,
            min_depth: var.min_depth,
            blowup_bound: var.blowup_bound,
            grid: settings.tolerances.grid,
            deriv_tol: settings.tolerances.deriv_tol,
            probe_budget: ac.probe.budget,
            probe_bases: ac.probe.bases.clone(),
            measure_budget: ac.measure_budget,
            seed: settings.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub curve: CurveInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variation: Option<Variation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speed_measure: Option<Block<SpeedMeasureBlock>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Block<DecompositionBlock>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ac: Option<BzVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub luzin: Option<Block<LuzinBlock>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub acp: Vec<Block<AcpReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyReport>,
    pub provenance: Provenance,
}

/// Plot-ready files produced next to the report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvFiles(pub Vec<(&'static str, String)>);

/// Why a run stopped early.
#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Inconsistency(String),
}

impl RunError {
    pub fn status(&self) -> ExitStatus {
        match self {
            RunError::Usage(_) => ExitStatus::Usage,
            RunError::Inconsistency(_) => ExitStatus::Inconsistency,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Usage(m) => write!(f, "error: {m}"),
            RunError::Inconsistency(m) => write!(f, "numeric inconsistency: {m}"),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Inconsistency(_) | Error::LimitNotResolved { .. } => RunError::Inconsistency(e.to_string()),
            other => RunError::Usage(other.to_string()),
        }
    }
}

const NOT_BV: &str = "not of bounded variation on the domain";

/// Builds `ν`, or `None` when the curve is not of bounded variation.
fn speed_measure_of(curve: &Curve, settings: &Settings) -> Result<Option<SpeedMeasure>, RunError> {
    match build_speed_measure(curve, &settings.speed()) {
        Ok(nu) => Ok(Some(nu)),
        Err(Error::NotBoundedVariation { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn density_sources(dec: &LebesgueDecomposition) -> DensitySources {
    let count = |s: DensitySource| dec.density.iter().filter(|p| p.source == s).count();
    DensitySources {
        metric_derivative: count(DensitySource::MetricDerivative),
        variation_quotient: count(DensitySource::VariationQuotient),
        interpolated: count(DensitySource::Interpolated),
    }
}

/// Executes every requested analysis. Returns the report, the CSV files to
/// emit, and whether `verify` found a violation.
pub fn analyze(spec: &CurveSpec, settings: &Settings) -> Result<(AnalysisReport, CsvFiles), RunError> {
    let curve = &spec.curve;
    let mut csv = CsvFiles::default();
    let mut report = AnalysisReport {
        curve: CurveInfo {
            name: curve.name().to_owned(),
            space: *curve.space(),
            domain: curve.domain(),
            source: spec.source.clone(),
        },
        variation: None,
        speed_measure: None,
        decomposition: None,
        ac: None,
        luzin: None,
        acp: Vec::new(),
        verify: None,
        provenance: Provenance::new(settings),
    };

    if spec.wants(Analysis::Variation) {
        report.variation = Some(variation(curve, curve.domain(), &settings.variation())?);
    }

    let needs_nu = spec
        .analyses
        .iter()
        .any(|a| !matches!(a, Analysis::Variation | Analysis::Verify));
    let nu = if needs_nu { speed_measure_of(curve, settings)? } else { None };

    if spec.wants(Analysis::SpeedMeasure) {
        report.speed_measure = Some(match &nu {
            Some(nu) => {
                csv.0.push(("profile.csv", nu.profile_csv()));
                csv.0.push(("atoms.csv", nu.atoms_csv()));
                let p = nu.profile();
                Block::Done(SpeedMeasureBlock {
                    total_mass: nu.total_mass()?,
                    continuous: nu.is_continuous(),
                    left_endpoint_mass: nu.left_endpoint_mass(),
                    atoms: nu.atoms().to_vec(),
                    grid_points: p.grid.len(),
                    converged: p.converged,
                    refinement_depth: p.refinement_depth,
                    residual: p.residual,
                })
            }
            None => Block::Skipped { skipped: NOT_BV.into() },
        });
    }

    if spec.wants(Analysis::Decompose) {
        report.decomposition = Some(match &nu {
            Some(nu) => {
                let opts = settings.decomposition();
                let dec = decompose_interval(curve, nu, curve.domain(), &opts)?;
                let li = length_identity_check(curve, nu, curve.domain(), &opts, 10.0 * settings.tolerances.tol.max(opts.tol))?;
                csv.0.push(("density.csv", dec.density_csv()));
                csv.0.push(("cells.csv", dec.cells_csv()));
                Block::Done(DecompositionBlock {
                    totals: dec.totals,
                    cells: dec.cells.len(),
                    clamped_cells: dec.clamped_cells,
                    tol: dec.tol,
                    density_sources: density_sources(&dec),
                    length_identity: li,
                })
            }
            None => Block::Skipped { skipped: NOT_BV.into() },
        });
    }

    if spec.wants(Analysis::Ac) {
        let verdict = banach_zaretsky_verdict(curve, nu.as_ref(), &settings.ac())?;
        if let Some(w) = verdict.probe.as_ref().and_then(|p| p.witness.as_ref()) {
            let mut s = String::from("a,b\n");
            for (a, b) in w.family.pairs() {
                s.push_str(&format!("{a},{b}\n"));
            }
            csv.0.push(("witness.csv", s));
        }
        report.ac = Some(verdict);
    }

    if spec.wants(Analysis::Luzin) {
        report.luzin = Some(match &nu {
            Some(nu) => {
                let desc = spec.null_set.clone().unwrap_or(DEFAULT_NULL_SET);
                let cover = desc.build(curve.domain())?;
                let injective = spec.injective();
                let r = luzin_n_upper_bound(curve, &cover, nu, injective, settings.tolerances.tol)?;
                let mut s = String::from("generation,intervals,total_length,bound,measure_bound\n");
                for g in &r.generations {
                    s.push_str(&format!(
                        "{},{},{},{},{}\n",
                        g.generation, g.intervals, g.total_length, g.bound, g.measure_bound
                    ));
                }
                csv.0.push(("luzin.csv", s));
                Block::Done(LuzinBlock { null_set: desc, injective, report: r })
            }
            None => Block::Skipped { skipped: NOT_BV.into() },
        });
    }

    for a in &spec.analyses {
        if let Analysis::Acp(p) = a {
            report.acp.push(match &nu {
                Some(nu) => Block::Done(acp_classify(curve, nu, *p, &settings.ac())?),
                None => Block::Skipped { skipped: NOT_BV.into() },
            });
        }
    }

    if spec.wants(Analysis::Verify) {
        report.verify = Some(verify_curve(spec, settings)?);
    }
    Ok((report, csv))
}

/// `run` subcommand: analyze, print the report, and write the report plus CSV
/// files into `out` when given.
pub fn run(spec: &CurveSpec, settings: &Settings, format: Format, out: Option<&Path>) -> Result<(String, ExitStatus), RunError> {
    let (report, csv) = analyze(spec, settings)?;
    let value = serde_json::to_value(&report).map_err(|e| RunError::Usage(e.to_string()))?;
    let text = render(&value, format);
    if let Some(dir) = out {
        let io = |e: std::io::Error| RunError::Usage(format!("cannot write to {}: {e}", dir.display()));
        for (name, contents) in &csv.0 {
            write_atomic(dir, name, contents).map_err(io)?;
        }
        write_atomic(dir, format.file_name(), &text).map_err(io)?;
    }
    let status = match &report.verify {
        Some(v) if !v.passed => ExitStatus::Violation,
        _ => ExitStatus::Success,
    };
    Ok((text, status))
}

#[cfg(test)]
mod tests {
    use std::sync::atomic::{AtomicU64, Ordering};

    use speedmeasure::curve::Analytic;
    use speedmeasure::oracle::Oracle;
    use speedmeasure::space::Point;

    use super::*;

    fn settings() -> Settings {
        Settings { tolerances: Tolerances::default(), seed: 0 }
    }

    #[test]
    fn impure_curve_is_a_violation() {
        let calls = AtomicU64::new(0);
        let body = Analytic::black_box(move |t| {
            let n = calls.fetch_add(1, Ordering::Relaxed);
            Point::Scalar(t + (n % 2) as f64 * 1e-3)
        });
        let curve = Curve::analytic("flicker", Space::RealLine, Interval::closed(0.0, 1.0), body).unwrap();
        let spec = CurveSpec {
            curve,
            source: CurveSource::Composite { parts: vec![] },
            analyses: vec![Analysis::Verify],
            null_set: None,
            tolerances: Tolerances::default(),
        };
        // the flicker never lets the variation settle, so keep refinement shallow
        let shallow = Settings { tolerances: Tolerances { max_depth: 10, ..Tolerances::default() }, seed: 0 };
        let (_, status) = run(&spec, &shallow, Format::Json, None).unwrap();
        assert_eq!(status, ExitStatus::Violation);
        let report = verify_curve(&spec, &shallow).unwrap();
        assert!(report.lines().contains("FAIL flicker curves::eval_pure"));
    }

    #[test]
    fn only_requested_blocks_are_filled() {
        let oracle = Oracle::by_name("identity").unwrap();
        let spec = CurveSpec {
            curve: oracle.curve().unwrap(),
            source: CurveSource::Oracle { oracle },
            analyses: vec![Analysis::Variation],
            null_set: None,
            tolerances: Tolerances::default(),
        };
        let (report, csv) = analyze(&spec, &settings()).unwrap();
        let v = serde_json::to_value(&report).unwrap();
        assert_eq!(v["variation"]["value"], 1.0);
        assert!(v.get("decomposition").is_none());
        assert!(csv.0.iter().all(|(name, _)| *name != "density.csv"));
    }

    #[test]
    fn library_errors_map_to_exit_statuses() {
        assert_eq!(RunError::from(Error::Inconsistency("x".into())).status(), ExitStatus::Inconsistency);
        assert_eq!(RunError::from(Error::Config("x".into())).status(), ExitStatus::Usage);
    }
}
