//! Command-line front end: verification suites, single cocycle evaluations,
//! the disk twist experiment, and the report schema.
//!
//! Exit codes: 0 all gated cases pass, 1 at least one case failed, 2 usage
//! or scenario error, 3 numeric failure (a case errored, or an `eval`
//! computation failed).

use clap::{Args, Parser, Subcommand};
use cocycle_lab::cohomology::CocycleEngine;
use cocycle_lab::element::{GroupElement, MoebiusMatrix, TwistProfile};
use cocycle_lab::geom::{Point, QuadratureConfig};
use cocycle_lab::lab::{disk_experiment, run_suite, Report, Scenario, SCHEMA_VERSION};
use cocycle_lab::model::hyperbolic::{gamma_cochain, gw_cocycle, make_h2, triangle_area_oracle};
use cocycle_lab::model::{heisenberg_closed_form, make_disk, make_r2n};
use nalgebra::DVector;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "cocycle-lab",
    version,
    about = "Numerical laboratory for two-cocycles on groups of symplectomorphisms"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suite for a model and emit a report.
    Verify(VerifyArgs),
    /// Evaluate a single cocycle value and its cross-checks.
    Eval {
        #[command(subcommand)]
        target: EvalTarget,
    },
    /// Exploratory twist-word experiment on the disk (info-only fits).
    DiskExperiment(DiskArgs),
    /// Print the JSON layout of run reports.
    ReportSchema,
}

#[derive(Args)]
struct VerifyArgs {
    /// Model id: r2n:<n> | h2 | disk | torus | product:<a>,<b>
    #[arg(long)]
    model: Option<String>,
    /// Seed for the per-case random draws.
    #[arg(long)]
    seed: Option<u64>,
    /// Sample budget per case (trial counts scale with it, up to caps).
    #[arg(long)]
    samples: Option<usize>,
    /// Tolerance override `<suite>=<value>` or `<suite>/<case>=<value>`; repeatable.
    #[arg(long = "tol", value_name = "SUITE=VALUE")]
    tol: Vec<String>,
    /// Scenario file (TOML keys model/seed/samples/basepoint/[tolerances]);
    /// flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit the CSV flattening instead of JSON.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct DiskArgs {
    /// Number of generator words (at least 4).
    #[arg(long, default_value_t = 6)]
    words: usize,
    /// Word depth for the random walks (2 or 3).
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit the CSV flattening instead of JSON.
    #[arg(long)]
    csv: bool,
}

#[derive(Subcommand)]
enum EvalTarget {
    /// Translation cocycle on the flat chart: C(transl(x), transl(y)).
    Heisenberg {
        /// Displacement of the first translation, comma-separated (even length).
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        x: Vec<f64>,
        /// Displacement of the second translation, same length as --x.
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        y: Vec<f64>,
    },
    /// Upper half-plane cocycle for two Moebius elements, each a,b,c,d.
    H2 {
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        g1: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        g2: Vec<f64>,
    },
    /// Disk cocycle for two radial twists given by profile coefficients,
    /// evaluated from the off-center basepoint (0.3, 0).
    Disk {
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        g1: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        g2: Vec<f64>,
    },
}

/// CLI failure with its exit code: usage problems are 2, numeric failures 3.
enum CliError {
    Usage(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) => m,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.code()
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.cmd {
        Command::Verify(args) => {
            let scenario = scenario_from(&args)?;
            let report = run_suite(&scenario).map_err(|e| usage(e.to_string()))?;
            print_case_lines(&report);
            emit(&report, args.out.as_deref(), args.csv)?;
            Ok(report.exit_code() as i32)
        }
        Command::Eval { target } => {
            let body = eval(target)?;
            print_body(&body, 0)?;
            Ok(0)
        }
        Command::DiskExperiment(args) => {
            let report = disk_experiment(args.words, args.depth, args.seed)
                .map_err(|e| usage(e.to_string()))?;
            print_case_lines(&report);
            emit(&report, args.out.as_deref(), args.csv)?;
            Ok(report.exit_code() as i32)
        }
        Command::ReportSchema => {
            let mut body = schema_document();
            body.push('\n');
            print_body(&body, 0)?;
            Ok(0)
        }
    }
}

/// Writes `body` to stdout in one shot. A closed pipe downstream (for example
/// `... | head`) is not an error in this program: by the time output is
/// produced the verdict is already known, so the process exits with
/// `code_if_closed` instead of panicking or reporting a spurious failure.
fn print_body(body: &str, code_if_closed: i32) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(body.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(code_if_closed);
        }
        return Err(usage(format!("cannot write to stdout: {e}")));
    }
    Ok(())
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    model: Option<String>,
    seed: Option<u64>,
    samples: Option<usize>,
    basepoint: Option<Vec<f64>>,
    tolerances: Option<BTreeMap<String, f64>>,
}

fn scenario_from(args: &VerifyArgs) -> Result<Scenario, CliError> {
    let mut scenario = Scenario::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let file: ConfigFile = toml::from_str(&text)
            .map_err(|e| usage(format!("bad config {}: {e}", path.display())))?;
        if let Some(m) = file.model {
            scenario.model = m;
        }
        if let Some(s) = file.seed {
            scenario.seed = s;
        }
        if let Some(s) = file.samples {
            scenario.samples = s;
        }
        scenario.basepoint = file.basepoint;
        if let Some(tols) = file.tolerances {
            scenario.tolerances.extend(tols);
        }
    }
    if let Some(m) = &args.model {
        scenario.model = m.clone();
    }
    if let Some(s) = args.seed {
        scenario.seed = s;
    }
    if let Some(s) = args.samples {
        scenario.samples = s;
    }
    for entry in &args.tol {
        let (key, value) = entry
            .split_once('=')
            .ok_or_else(|| usage(format!("--tol expects <suite>=<value>, got '{entry}'")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| usage(format!("--tol value in '{entry}' is not a number")))?;
        scenario.tolerances.insert(key.trim().to_string(), value);
    }
    Ok(scenario)
}

/// Human-oriented per-case lines on stderr; stdout carries the report body.
fn print_case_lines(report: &Report) {
    for case in &report.cases {
        let status = match case.status {
            cocycle_lab::lab::CaseStatus::Pass => "pass",
            cocycle_lab::lab::CaseStatus::Fail => "FAIL",
            cocycle_lab::lab::CaseStatus::Info => "info",
            cocycle_lab::lab::CaseStatus::Error => "ERROR",
        };
        match case.residual {
            Some(r) => eprintln!(
                "[{status}] {id} residual {r:.3e} (tolerance {tol:.1e})",
                id = case.id,
                tol = case.tolerance
            ),
            None => eprintln!("[{status}] {id} {note}", id = case.id, note = case.note),
        }
    }
    let s = &report.summary;
    eprintln!(
        "{}: {} passed, {} failed, {} info, {} errors",
        report.suite, s.passed, s.failed, s.info, s.errors
    );
}

fn emit(report: &Report, out: Option<&Path>, csv: bool) -> Result<(), CliError> {
    let body = if csv {
        report.to_csv()
    } else {
        report.to_json()
    };
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => print_body(&body, report.exit_code() as i32),
    }
}

fn eval(target: EvalTarget) -> Result<String, CliError> {
    use std::fmt::Write as _;
    let mut body = String::new();
    match target {
        EvalTarget::Heisenberg { x, y } => {
            if x.len() != y.len() {
                return Err(usage("--x and --y must have the same length"));
            }
            if x.len() < 2 || x.len() % 2 != 0 {
                return Err(usage("displacements need an even length of at least 2"));
            }
            let n = x.len() / 2;
            let engine = CocycleEngine::new(Arc::new(make_r2n(n)));
            let u = DVector::from_vec(x);
            let v = DVector::from_vec(y);
            let quad = engine
                .cocycle_quadrature(
                    &GroupElement::Translation(u.clone()),
                    &GroupElement::Translation(v.clone()),
                )
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            let closed =
                heisenberg_closed_form(&u, &v).map_err(|e| CliError::Numeric(e.to_string()))?;
            let _ = writeln!(body, "C = {:.12}", quad.value);
            let _ = writeln!(
                body,
                "quadrature error estimate = {:.3e}",
                quad.error_estimate
            );
            let _ = writeln!(body, "closed form = {:.12}", closed);
            let _ = writeln!(body, "difference = {:.3e}", (quad.value - closed).abs());
        }
        EvalTarget::H2 { g1, g2 } => {
            if g1.len() != 4 || g2.len() != 4 {
                return Err(usage("--g1 and --g2 each need four entries a,b,c,d"));
            }
            let a = MoebiusMatrix::new(g1[0], g1[1], g1[2], g1[3])
                .map_err(|e| usage(format!("--g1: {e}")))?;
            let b = MoebiusMatrix::new(g2[0], g2[1], g2[2], g2[3])
                .map_err(|e| usage(format!("--g2: {e}")))?;
            let model = Arc::new(make_h2());
            let cfg = QuadratureConfig::default();
            let engine = CocycleEngine::new(model.clone());
            let numeric = |e: cocycle_lab::Error| CliError::Numeric(e.to_string());
            let quad = engine
                .cocycle_quadrature(
                    &GroupElement::Moebius(a.clone()),
                    &GroupElement::Moebius(b.clone()),
                )
                .map_err(numeric)?;
            let dgamma = gamma_cochain(&model, &cfg, &b).map_err(numeric)?
                - gamma_cochain(&model, &cfg, &a.mul(&b)).map_err(numeric)?
                + gamma_cochain(&model, &cfg, &a).map_err(numeric)?;
            let gw = gw_cocycle(&model, &cfg, &a, &b).map_err(numeric)?;
            let z0 = model.basepoint();
            let (oracle, degenerate) = triangle_area_oracle(z0, &a.act(z0), &a.mul(&b).act(z0));
            let _ = writeln!(body, "C = {:.12}", quad.value);
            let _ = writeln!(
                body,
                "quadrature error estimate = {:.3e}",
                quad.error_estimate
            );
            let _ = writeln!(body, "D(gamma) = {:.12}", dgamma);
            let _ = writeln!(body, "gw (triangle circulation) = {:.12}", gw);
            let _ = writeln!(body, "C + D(gamma) - gw = {:.3e}", quad.value + dgamma - gw);
            if degenerate {
                let _ = writeln!(body, "angle-defect oracle = (degenerate triangle)");
            } else {
                let _ = writeln!(body, "angle-defect oracle = {:.12}", oracle);
                let _ = writeln!(body, "gw - oracle = {:.3e}", gw - oracle);
            }
        }
        EvalTarget::Disk { g1, g2 } => {
            let model = make_disk()
                .with_basepoint(Point::new(vec![0.3, 0.0]))
                .expect("the off-center basepoint lies in the disk");
            let engine = CocycleEngine::new(Arc::new(model));
            let quad = engine
                .cocycle_quadrature(
                    &GroupElement::Twist(TwistProfile::new(g1)),
                    &GroupElement::Twist(TwistProfile::new(g2)),
                )
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            let _ = writeln!(body, "C = {:.12}", quad.value);
            let _ = writeln!(
                body,
                "quadrature error estimate = {:.3e}",
                quad.error_estimate
            );
            let _ = writeln!(
                body,
                "note: twists preserve every circle about the origin, so C vanishes \
                 identically on the twist subgroup"
            );
        }
    }
    Ok(body)
}

fn schema_document() -> String {
    let schema = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "description": "Layout of run reports emitted by `verify` and `disk-experiment`.",
        "report": {
            "schema_version": "integer; this document's version",
            "suite": "string; `verify` or `disk-experiment`",
            "model": "string; normalized model id",
            "seed": "unsigned integer; drives all random draws",
            "samples": "unsigned integer; per-case trial budget",
            "versions": "object; package name -> version",
            "cases": "array of case objects, sorted by id",
            "summary": {
                "total": "integer",
                "passed": "integer",
                "failed": "integer",
                "info": "integer",
                "errors": "integer"
            }
        },
        "case": {
            "id": "string; `<suite>/<name>`, unique within the report",
            "digest": "string; 16 hex digits derived from (seed, case id, samples)",
            "values": "object; named floats produced by the case",
            "residual": "float or null; the quantity gated against the tolerance",
            "tolerance": "float; pass iff |residual| <= tolerance",
            "status": "string; one of pass | fail | info | error",
            "note": "string; what was checked, or the failure message"
        },
        "conventions": {
            "determinism": "identical scenario and seed produce byte-identical JSON",
            "inverted_controls": "cases that must stay large report residual = max(0, threshold - actual) with tolerance 0; the raw value is in `values`",
            "info_cases": "status `info` carries no pass/fail meaning and never affects the exit code"
        },
        "exit_codes": {
            "0": "all gated cases pass",
            "1": "at least one case failed",
            "2": "usage or scenario error",
            "3": "numeric failure (a case errored, or an eval computation failed)"
        },
        "csv": {
            "header": "suite,model,seed,samples,case_id,digest,status,residual,tolerance,values,note",
            "values": "flattened as key=value pairs joined with `;`"
        }
    });
    let mut s = serde_json::to_string_pretty(&schema).expect("schema serializes");
    s.push('\n');
    s
}
