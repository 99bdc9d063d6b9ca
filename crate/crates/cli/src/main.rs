use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use speedmeasure::oracle::{catalog, Oracle, ORACLE_NAMES};
use speedmeasure_cli::report::{render, write_atomic, Format};
use speedmeasure_cli::run::{run, RunError, Settings};
use speedmeasure_cli::spec::{self, Analysis, CurveSource, CurveSpec, Tolerances};
use speedmeasure_cli::verify::verify_curve;
use speedmeasure_cli::ExitStatus;

#[derive(Parser)]
#[command(name = "speedmeasure", version, about = "Variation, speed measure and absolute continuity of curves in metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analyses listed in a spec file.
    Run {
        spec: PathBuf,
        /// Directory for the report and CSV files.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        numeric: Numeric,
    },
    /// Run the invariant suite on a spec's curve, on named oracles, or on
    /// every oracle when neither is given.
    Verify {
        spec: Option<PathBuf>,
        #[arg(long = "oracle", value_parser = clap::builder::PossibleValuesParser::new(ORACLE_NAMES))]
        oracles: Vec<String>,
        /// Directory for verify.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        numeric: Numeric,
    },
    /// Print the built-in oracles with their parameters and known values.
    ListOracles {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// Flags that override a spec file's tolerances.
#[derive(Args)]
struct Numeric {
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_depth: Option<u32>,
    /// Cells of the distribution-function and decomposition grids.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    blowup_bound: Option<f64>,
    /// Seed of the randomized checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Numeric {
    fn settings(&self, base: &Tolerances) -> Result<Settings, String> {
        let t = Tolerances {
            tol: self.tol.unwrap_or(base.tol),
            max_depth: self.max_depth.unwrap_or(base.max_depth),
            grid: self.grid.unwrap_or(base.grid),
            blowup_bound: self.blowup_bound.unwrap_or(base.blowup_bound),
            deriv_tol: base.deriv_tol,
        };
        t.validate().map_err(|e| format!("flag {}", e.to_string().trim_start_matches("tolerances.")))?;
        Ok(Settings { tolerances: t, seed: self.seed })
    }
}

fn fail(status: ExitStatus, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("{message}");
    ExitCode::from(status.code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { spec, out, format, numeric } => {
            let parsed = match spec::load(&spec) {
                Ok(s) => s,
                Err(e) => return fail(ExitStatus::Usage, format!("{}: {e}", spec.display())),
            };
            let settings = match numeric.settings(&parsed.tolerances) {
                Ok(s) => s,
                Err(e) => return fail(ExitStatus::Usage, e),
            };
            match run(&parsed, &settings, format, out.as_deref()) {
                Ok((text, status)) => {
                    print!("{text}");
                    ExitCode::from(status.code() as u8)
                }
                Err(e) => fail(e.status(), e),
            }
        }
        Command::Verify { spec, oracles, out, numeric } => verify(spec, oracles, out, numeric),
        Command::ListOracles { format } => {
            let value = serde_json::to_value(catalog()).unwrap_or_default();
            print!("{}", render(&serde_json::json!({ "oracles": value }), format));
            ExitCode::SUCCESS
        }
    }
}

fn oracle_spec(name: &str, tolerances: Tolerances) -> Result<CurveSpec, RunError> {
    let oracle = Oracle::by_name(name).map_err(RunError::from)?;
    let curve = oracle.curve().map_err(RunError::from)?;
    Ok(CurveSpec {
        curve,
        source: CurveSource::Oracle { oracle },
        analyses: vec![Analysis::Verify],
        null_set: None,
        tolerances,
    })
}

fn verify(spec: Option<PathBuf>, oracles: Vec<String>, out: Option<PathBuf>, numeric: Numeric) -> ExitCode {
    let mut specs = Vec::new();
    if let Some(path) = &spec {
        match spec::load(path) {
            Ok(s) => specs.push(s),
            Err(e) => return fail(ExitStatus::Usage, format!("{}: {e}", path.display())),
        }
    }
    let names: Vec<&str> = if spec.is_none() && oracles.is_empty() {
        ORACLE_NAMES.to_vec()
    } else {
        oracles.iter().map(String::as_str).collect()
    };
    for name in names {
        match oracle_spec(name, Tolerances::default()) {
            Ok(s) => specs.push(s),
            Err(e) => return fail(e.status(), e),
        }
    }
    let mut reports = Vec::with_capacity(specs.len());
    for s in &specs {
        let settings = match numeric.settings(&s.tolerances) {
            Ok(x) => x,
            Err(e) => return fail(ExitStatus::Usage, e),
        };
        match verify_curve(s, &settings) {
            Ok(r) => {
                print!("{}", r.lines());
                reports.push(r);
            }
            Err(e) => return fail(e.status(), e),
        }
    }
    if let Some(dir) = out {
        let text = render(&serde_json::json!({ "verify": reports }), Format::Json);
        if let Err(e) = write_atomic(&dir, "verify.json", &text) {
            return fail(ExitStatus::Usage, format!("cannot write to {}: {e}", dir.display()));
        }
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} curves verified, {failed} with violations", reports.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(ExitStatus::Violation.code() as u8)
    }
}
