//! The `phigeom` command line.
//!
//! Subcommands map one-to-one onto library calls:
//!
//! - `compute` — measures for one config, JSON report plus a text table;
//! - `sweep` — one CSV row per value of a template parameter;
//! - `verify` — hierarchy checks over seeded random systems;
//! - `fit` — least-squares AR fit of a time series to a Gaussian config;
//! - `random` — seeded random config.
//!
//! Exit codes: 0 success, 1 computation failure (solver error, hierarchy
//! violation in `verify`), 2 usage error (bad flags, invalid input files,
//! unsupported measure).

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use phi_geom::error::Error;
use phi_geom::gaussian::gaussian_phi_all;
use phi_geom::hierarchy::HierarchyReport;
use phi_geom::io::{fit_ar, load_system, parse_system, read_timeseries, save_system, System};
use phi_geom::model::SplitModelKind;
use phi_geom::phi::{phi_all, PhiOptions};
use phi_geom::random::{random_discrete_with, random_gaussian};
use phi_geom::report::{compute_report, default_measures, write_csv, PhiReport, Units};
use phi_geom::SystemConfig;

/// Integrated-information measures via KL projections onto split models.
#[derive(Debug, Parser)]
#[command(name = "phigeom", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute measures for one system config.
    Compute(ComputeArgs),
    /// Evaluate a config template over a range of one parameter.
    Sweep(SweepArgs),
    /// Check the measure hierarchy on seeded random systems.
    Verify(VerifyArgs),
    /// Fit a Gaussian AR system to a time series.
    Fit(FitArgs),
    /// Write a seeded random system config.
    Random(RandomArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Discrete,
    Gaussian,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// System config (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated subset of i,fs,ds,md,g. Defaults to all applicable.
    #[arg(long, value_delimiter = ',')]
    pub measures: Option<Vec<SplitModelKind>>,
    #[arg(long, default_value = "nats")]
    pub units: Units,
    /// Where to write the JSON report.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Config in which `"$NAME"` marks the swept scalar.
    #[arg(long)]
    pub template: PathBuf,
    #[arg(long)]
    pub param: String,
    /// Inclusive range `LO:HI:STEP`.
    #[arg(long)]
    pub range: String,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value = "nats")]
    pub units: Units,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Number of random systems.
    #[arg(long)]
    pub seeds: u64,
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// First seed; system k uses seed `seed + k`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of elements.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Dirichlet concentration of discrete tables (small = near-deterministic).
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with a header of channel names and one row per time step.
    #[arg(long)]
    pub timeseries: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct RandomArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    pub fn computation(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = format!("{}: {e}", e.code());
        if is_input_error(&e) {
            Failure::usage(message)
        } else {
            Failure::computation(message)
        }
    }
}

/// Errors caused by what the user passed in rather than by a solver.
fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::DimensionMismatch { .. }
            | Error::UnsupportedSize(_)
            | Error::NotNormalized { .. }
            | Error::InvalidProbability { .. }
            | Error::InvalidVarSet(_)
            | Error::NotSymmetric(_)
            | Error::NotPositiveDefinite(_)
            | Error::BadMatrixShape(_)
            | Error::InsufficientData { .. }
            | Error::Schema(_)
            | Error::StateOutOfRange { .. }
            | Error::UnsupportedMeasure(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_)
    )
}

/// Successful output: text for stdout.
pub type Outcome = Result<String, Failure>;

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Compute(a) => compute(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Verify(a) => verify(&a),
        Command::Fit(a) => fit(&a),
        Command::Random(a) => random(&a),
    }
}

/// Runs the parsed command, printing output and mapping failures to exit
/// codes.
pub fn main_with(cli: Cli) -> ExitCode {
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Honors `PHI_THREADS` as a cap on the worker pool.
fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("PHI_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("PHI_THREADS must be a positive integer, got `{v}`"))?;
    if threads == 0 {
        return Err("PHI_THREADS must be at least 1".into());
    }
    // Only fails if a pool already exists, e.g. on a second call in-process.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

fn file_stem(path: &std::path::Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "system".into())
}

pub fn compute(args: &ComputeArgs) -> Outcome {
    let cfg = load_system(&args.input)?;
    let system = cfg.build()?;
    let measures = match &args.measures {
        Some(m) => m.clone(),
        None => default_measures(&system),
    };
    let report = compute_report(&cfg, &measures, args.units, &file_stem(&args.input))?;
    if let Some(path) = &args.output {
        fs::write(path, report.to_json()).map_err(Error::from)?;
    }
    let table = report.render_table();
    if report.has_failures() {
        return Err(Failure::computation(format!(
            "one or more measures failed\n{table}"
        )));
    }
    Ok(table)
}

/// `LO:HI:STEP`, inclusive of `HI` up to rounding. Values are `LO + k STEP`.
pub fn parse_range(text: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Failure::usage(format!("range must be LO:HI:STEP, got `{text}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let num = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite());
    let (lo, hi, step) = match (num(parts[0]), num(parts[1]), num(parts[2])) {
        (Some(lo), Some(hi), Some(step)) => (lo, hi, step),
        _ => return Err(bad()),
    };
    if step == 0.0 || (hi - lo) * step < 0.0 {
        return Err(Failure::usage(format!(
            "range step {step} does not move from {lo} towards {hi}"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(Failure::usage(format!("range has {count} points")));
    }
    Ok((0..count).map(|k| lo + k as f64 * step).collect())
}

/// Replaces `"$NAME"` (quoted or bare) by a JSON number.
pub fn substitute(template: &str, name: &str, value: f64) -> String {
    let literal = serde_json::Number::from_f64(value)
        .map(|n| n.to_string())
        .unwrap_or_else(|| "null".into());
    let marker = format!("${name}");
    template
        .replace(&format!("\"{marker}\""), &literal)
        .replace(&marker, &literal)
}

pub fn sweep(args: &SweepArgs) -> Outcome {
    let template = fs::read_to_string(&args.template).map_err(Error::from)?;
    if !template.contains(&format!("${}", args.param)) {
        return Err(Failure::usage(format!(
            "template does not contain the placeholder \"${}\"",
            args.param
        )));
    }
    let values = parse_range(&args.range)?;
    // Configs are validated up front so a bad template is a usage error,
    // while per-row solver failures only flag the row.
    let configs = values
        .iter()
        .map(|&v| parse_system(&substitute(&template, &args.param, v)))
        .collect::<Result<Vec<SystemConfig>, Error>>()?;
    let rows: Vec<Result<PhiReport, Error>> = configs
        .par_iter()
        .zip(values.par_iter())
        .map(|(cfg, v)| {
            let system = cfg.build()?;
            let label = format!("{}={v}", args.param);
            compute_report(cfg, &default_measures(&system), args.units, &label)
        })
        .collect();
    let reports = rows.into_iter().collect::<Result<Vec<_>, Error>>()?;

    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &args.param, &values, &reports)?;
    fs::write(&args.output, buf).map_err(Error::from)?;
    let flagged = reports.iter().filter(|r| r.has_failures()).count();
    let mut out = format!(
        "{} rows written to {}\n",
        reports.len(),
        args.output.display()
    );
    if flagged > 0 {
        let _ = writeln!(
            out,
            "{flagged} rows flagged with non-finite or failed measures"
        );
    }
    Ok(out)
}

/// Sweep CSV: the parameter value, then the standard report columns.
fn write_sweep_csv(
    out: &mut Vec<u8>,
    param: &str,
    values: &[f64],
    reports: &[PhiReport],
) -> Result<(), Error> {
    let mut inner = Vec::new();
    write_csv(&mut inner, reports)?;
    let text = String::from_utf8(inner).expect("csv output is utf-8");
    for (k, line) in text.lines().enumerate() {
        let lead = if k == 0 {
            param.to_string()
        } else {
            values[k - 1].to_string()
        };
        out.extend_from_slice(format!("{lead},{line}\n").as_bytes());
    }
    Ok(())
}

/// Outcome of checking one random system.
struct Checked {
    seed: u64,
    report: Option<HierarchyReport>,
    failures: Vec<String>,
}

fn check_discrete(n: usize, seed: u64, alpha: f64, tol: f64) -> Checked {
    let p = match random_discrete_with(n, seed, alpha) {
        Ok(p) => p,
        Err(e) => {
            return Checked {
                seed,
                report: None,
                failures: vec![format!("generate: {}", e.code())],
            }
        }
    };
    let opts = PhiOptions {
        seed,
        ..PhiOptions::default()
    };
    let suite = phi_all(&p, &opts);
    let failures = [
        ("fs", &suite.fs),
        ("ds", &suite.ds),
        ("md", &suite.md),
        ("g", &suite.g),
    ]
    .iter()
    .filter_map(|(name, r)| r.as_ref().err().map(|e| format!("{name}: {}", e.code())))
    .collect();
    Checked {
        seed,
        report: Some(suite.hierarchy(tol)),
        failures,
    }
}

fn check_gaussian(n: usize, seed: u64, tol: f64) -> Checked {
    let sys = match random_gaussian(n, seed) {
        Ok(s) => s,
        Err(e) => {
            return Checked {
                seed,
                report: None,
                failures: vec![format!("generate: {}", e.code())],
            }
        }
    };
    let suite = gaussian_phi_all(&sys);
    let failures = [("fs", &suite.fs), ("ds", &suite.ds), ("g", &suite.g)]
        .iter()
        .filter_map(|(name, r)| r.as_ref().err().map(|e| format!("{name}: {}", e.code())))
        .collect();
    Checked {
        seed,
        report: Some(suite.hierarchy(tol)),
        failures,
    }
}

pub fn verify(args: &VerifyArgs) -> Outcome {
    if args.seeds == 0 {
        return Err(Failure::usage("--seeds must be at least 1"));
    }
    if !(args.tol >= 0.0) {
        return Err(Failure::usage("--tol must be nonnegative"));
    }
    if !(args.alpha > 0.0 && args.alpha.is_finite()) {
        return Err(Failure::usage("--alpha must be positive"));
    }
    match args.kind {
        Kind::Discrete if args.n == 0 || args.n > phi_geom::discrete::MAX_ELEMENTS => {
            return Err(Failure::usage(format!(
                "--n must be in 1..={} for discrete systems",
                phi_geom::discrete::MAX_ELEMENTS
            )))
        }
        Kind::Gaussian if args.n == 0 => return Err(Failure::usage("--n must be at least 1")),
        _ => {}
    }
    let seeds: Vec<u64> = (0..args.seeds).map(|k| args.seed.wrapping_add(k)).collect();
    let results: Vec<Checked> = seeds
        .par_iter()
        .map(|&s| match args.kind {
            Kind::Discrete => check_discrete(args.n, s, args.alpha, args.tol),
            Kind::Gaussian => check_gaussian(args.n, s, args.tol),
        })
        .collect();

    let mut out = String::new();
    let kind = match args.kind {
        Kind::Discrete => "discrete",
        Kind::Gaussian => "gaussian",
    };
    let _ = writeln!(
        out,
        "verify: {} {kind} systems, n = {}, seeds {}..{}, tol {:e}",
        results.len(),
        args.n,
        args.seed,
        args.seed.wrapping_add(args.seeds - 1),
        args.tol
    );
    let mut violations = 0usize;
    let mut violating_systems = 0usize;
    let mut failed_systems = 0usize;
    let mut fs_above_i = 0usize;
    // Worst (smallest) margin per named check over all systems.
    let mut worst: Vec<(String, f64, u64)> = Vec::new();
    for c in &results {
        if !c.failures.is_empty() {
            failed_systems += 1;
            let _ = writeln!(
                out,
                "  seed {}: solver failure ({})",
                c.seed,
                c.failures.join(", ")
            );
        }
        let Some(r) = &c.report else { continue };
        if r.violations > 0 {
            violating_systems += 1;
            violations += r.violations;
            for check in r.failed() {
                let _ = writeln!(
                    out,
                    "  seed {}: {} violated by {:e}",
                    c.seed, check.name, -check.margin
                );
            }
        }
        if r.fs_exceeds_i {
            fs_above_i += 1;
        }
        for check in &r.checks {
            match worst.iter_mut().find(|(name, _, _)| *name == check.name) {
                Some(entry) if check.margin < entry.1 => {
                    entry.1 = check.margin;
                    entry.2 = c.seed;
                }
                Some(_) => {}
                None => worst.push((check.name.to_string(), check.margin, c.seed)),
            }
        }
    }
    let _ = writeln!(out, "worst margins:");
    for (name, margin, seed) in &worst {
        let _ = writeln!(out, "  {name:<15} {margin:>+.3e} (seed {seed})");
    }
    let _ = writeln!(
        out,
        "violations: {violations} in {violating_systems} systems; solver failures: {failed_systems} systems; phi_fs > I: {fs_above_i} systems"
    );
    if violations > 0 || failed_systems > 0 {
        return Err(Failure::computation(out));
    }
    Ok(out)
}

pub fn fit(args: &FitArgs) -> Outcome {
    let ts = read_timeseries(&args.timeseries)?;
    let fitted = fit_ar(&ts)?;
    let label = file_stem(&args.timeseries);
    let cfg = SystemConfig::from_gaussian(&fitted.system).with_label(label);
    save_system(&args.output, &cfg)?;
    let mut out = format!(
        "fitted {} channels from {} transitions; written to {}\nresidual variance per channel:\n",
        ts.channels(),
        fitted.pairs,
        args.output.display()
    );
    for (name, v) in ts.names.iter().zip(&fitted.residual_variances) {
        let _ = writeln!(out, "  {name:<12} {v:.6}");
    }
    Ok(out)
}

pub fn random(args: &RandomArgs) -> Outcome {
    let cfg = match args.kind {
        Kind::Discrete => {
            if args.n == 0 || args.n > phi_geom::discrete::MAX_ELEMENTS {
                return Err(Failure::usage(format!(
                    "--n must be in 1..={} for discrete systems",
                    phi_geom::discrete::MAX_ELEMENTS
                )));
            }
            SystemConfig::from_discrete(&random_discrete_with(args.n, args.seed, 1.0)?)
                .with_label(format!("random-discrete-n{}-seed{}", args.n, args.seed))
        }
        Kind::Gaussian => {
            if args.n == 0 {
                return Err(Failure::usage("--n must be at least 1"));
            }
            SystemConfig::from_gaussian(&random_gaussian(args.n, args.seed)?)
                .with_label(format!("random-gaussian-n{}-seed{}", args.n, args.seed))
        }
    }
    .with_seed(args.seed);
    save_system(&args.output, &cfg)?;
    let kind = match cfg.build()? {
        System::Discrete(_) => "discrete",
        System::Gaussian(_) => "gaussian",
    };
    Ok(format!(
        "{kind} system (n = {}, seed {}) written to {}\n",
        args.n,
        args.seed,
        args.output.display()
    ))
}
