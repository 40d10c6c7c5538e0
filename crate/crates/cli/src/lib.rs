//! `rotor-scatter`: configuration in, CSV/JSON/SVG out.
//!
//! Each subcommand is a plain function returning what it wrote, so tests
//! drive the same code the binary does. Exit codes: 0 success, 1 for
//! configuration or usage errors, 2 for numerical or validation failures.

pub mod args;
pub mod manifest;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use rayon::prelude::*;
use rotor_core::analysis::{self, AnalysisError};
use rotor_core::born::{evaluate_profile, BornError};
use rotor_core::model::{validate_config, validate_document, ThetaDoc, ValidatedConfig};
use rotor_core::specfun::{bessel_j_batch, BesselOrderRange};
use rotor_core::validate::{self, CheckGroup, ValidateOptions, ValidationReport};
use rotor_core::{CrossSectionProfile, EngineVariant};
use serde::Serialize;

pub use args::{Cli, Command, Format};
pub use manifest::{RunManifest, Subcommand};
pub use output::SweepMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable, malformed or invalid input; exit 1.
    Config(String),
    /// Output could not be written; exit 1.
    Io(String),
    /// An engine or analysis step failed on valid input; exit 2.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<BornError> for CliError {
    fn from(e: BornError) -> Self {
        match e {
            // A closed form asked of a potential or beam it does not describe.
            BornError::UnsupportedVariant { .. } | BornError::Model(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

/// What a subcommand produced. `success` is false when it ran to completion
/// but found a failure to report (a failed self-check).
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub stdout: String,
    pub success: bool,
}

/// Parses `argv` and runs it, printing results; the binary's whole body.
pub fn main_with<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            for path in &outcome.written {
                eprintln!("wrote {}", path.display());
            }
            ExitCode::from(if outcome.success { 0 } else { 2 })
        }
        Err(e) => {
            eprintln!("rotor-scatter: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let threads = match &cli.command {
        Command::Profile(a) | Command::Compare(args::CompareArgs { run: a, .. }) => a.threads,
        Command::Sweep(s) => s.run.threads,
        Command::Validate(v) => v.threads,
        Command::BesselTable(_) => None,
    };
    with_threads(threads, || match &cli.command {
        Command::Profile(a) => run_profile(a),
        Command::Sweep(s) => run_sweep(s),
        Command::Compare(c) => run_compare(c),
        Command::Validate(v) => run_validate(v),
        Command::BesselTable(b) => bessel_table(b.n_max, b.x).map(|stdout| Outcome {
            stdout,
            success: true,
            ..Outcome::default()
        }),
    })
}

fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError> {
    match threads {
        None => f(),
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
            .install(f),
    }
}

/// Reads and validates a configuration file, then applies grid overrides
/// and validates again so overrides get the same field-level errors.
pub fn load_config(path: &Path, grid: &args::GridOverrides) -> Result<ValidatedConfig, CliError> {
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let config = validate_config(&raw).map_err(|e| CliError::Config(e.to_string()))?;
    apply_overrides(&config, grid)
}

pub fn apply_overrides(
    config: &ValidatedConfig,
    grid: &args::GridOverrides,
) -> Result<ValidatedConfig, CliError> {
    if grid.theta_min.is_none()
        && grid.theta_max.is_none()
        && grid.theta_steps.is_none()
        && grid.k.is_empty()
    {
        return Ok(config.clone());
    }
    let mut doc = config.to_document();
    let scan = doc.scan.get_or_insert_with(Default::default);
    let theta = scan.theta.get_or_insert(ThetaDoc {
        min: config.scan.theta.min,
        max: config.scan.theta.max,
        steps: config.scan.theta.steps as i64,
    });
    if let Some(v) = grid.theta_min {
        theta.min = v;
    }
    if let Some(v) = grid.theta_max {
        theta.max = v;
    }
    if let Some(v) = grid.theta_steps {
        theta.steps = v;
    }
    if !grid.k.is_empty() {
        scan.k = Some(grid.k.clone());
    }
    validate_document(&doc).map_err(|e| CliError::Config(e.to_string()))
}

/// σ(θ) for `variant` at wavenumber `k` on the configured θ grid.
pub fn profile_at(
    config: &ValidatedConfig,
    variant: EngineVariant,
    k: f64,
) -> Result<CrossSectionProfile, CliError> {
    let beam = config.beam.with_wavenumber(k).map_err(|e| CliError::Config(e.to_string()))?;
    let thetas = config.scan.theta.values();
    Ok(evaluate_profile(variant, &config.molecule, &beam, &config.potential, &thetas)?)
}

/// σ over the configured θ grid and k list. Columns are computed in
/// parallel and assembled in k order, so the result is thread-count free.
pub fn sweep_matrix(
    config: &ValidatedConfig,
    variant: EngineVariant,
) -> Result<SweepMatrix, CliError> {
    let sigma = config
        .scan
        .k
        .par_iter()
        .map(|&k| profile_at(config, variant, k).map(|p| p.sigma().to_vec()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepMatrix {
        engine: variant.as_str().into(),
        thetas: config.scan.theta.values(),
        ks: config.scan.k.clone(),
        sigma,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub engine: String,
    pub structureless_engine: String,
    #[serde(serialize_with = "output::json_real")]
    pub k: f64,
    #[serde(serialize_with = "output::json_reals")]
    pub window: [f64; 2],
    #[serde(serialize_with = "output::json_real")]
    pub visibility_internal: f64,
    #[serde(serialize_with = "output::json_real")]
    pub visibility_structureless: f64,
    #[serde(serialize_with = "output::json_real")]
    pub suppression_ratio: f64,
}

/// The configured engine and its structureless counterpart at the beam
/// wavenumber, with their fringe visibilities over `window`.
pub fn compare(
    config: &ValidatedConfig,
    window: Option<(f64, f64)>,
) -> Result<(CrossSectionProfile, CrossSectionProfile, CompareReport), CliError> {
    let engine = config.engine;
    if !engine.has_internal_structure() {
        return Err(CliError::Config(format!(
            "compare needs an engine with internal structure, got {engine}"
        )));
    }
    let partner = engine.structureless_partner();
    let k = config.beam.wavenumber();
    let with = profile_at(config, engine, k)?;
    let without = profile_at(config, partner, k)?;
    let window = window.unwrap_or((config.scan.theta.min, config.scan.theta.max));
    let report = CompareReport {
        engine: engine.as_str().into(),
        structureless_engine: partner.as_str().into(),
        k,
        window: [window.0, window.1],
        visibility_internal: analysis::visibility(&with, window)?,
        visibility_structureless: analysis::visibility(&without, window)?,
        suppression_ratio: analysis::suppression_ratio(&with, &without, window)?,
    };
    Ok((with, without, report))
}

/// `n,J_n` rows for n = 0..=n_max.
pub fn bessel_table(n_max: u32, x: f64) -> Result<String, CliError> {
    let values = bessel_j_batch(BesselOrderRange::new(n_max), x)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut out = String::from("n,J_n\n");
    for (n, v) in values.iter().enumerate() {
        out.push_str(&format!("{n},{}\n", output::real(*v)));
    }
    Ok(out)
}

fn write(
    manifest: &RunManifest,
    label: &str,
    ext: &str,
    body: &str,
    written: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    let path = manifest.output_path(label, ext);
    fs::write(&path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    written.push(path);
    Ok(())
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn write_profile(
    manifest: &RunManifest,
    profile: &CrossSectionProfile,
    engine: EngineVariant,
    k: f64,
    written: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    let label = engine.as_str();
    for format in &manifest.formats {
        let body = match format {
            Format::Csv => output::profile_csv(profile),
            Format::Json => output::profile_json(profile, label, k),
            Format::Svg => output::svg_plot(label, profile.thetas(), &[profile.sigma()]),
        };
        write(manifest, label, format.extension(), &body, written)?;
    }
    Ok(())
}

fn write_sweep(
    manifest: &RunManifest,
    m: &SweepMatrix,
    written: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    for format in &manifest.formats {
        let body = match format {
            Format::Csv => output::sweep_csv(m),
            Format::Json => output::sweep_json(m),
            Format::Svg => {
                let columns: Vec<&[f64]> = m.sigma.iter().map(|c| c.as_slice()).collect();
                output::svg_plot(&m.engine, &m.thetas, &columns)
            }
        };
        write(manifest, &m.engine, format.extension(), &body, written)?;
    }
    Ok(())
}

fn run_manifest(
    sub: Subcommand,
    a: &args::RunArgs,
    options: Vec<String>,
) -> Result<RunManifest, CliError> {
    let config = load_config(&a.config, &a.grid)?;
    Ok(RunManifest::new(
        sub,
        Some(a.config.clone()),
        a.out.clone(),
        &a.format,
        Some(config),
        options,
    ))
}

fn run_profile(a: &args::RunArgs) -> Result<Outcome, CliError> {
    if a.grid.k.len() > 1 {
        return Err(CliError::Config("profile takes a single --k".into()));
    }
    let mut manifest = run_manifest(Subcommand::Profile, a, Vec::new())?;
    let config = manifest.config.as_mut().expect("profile has a config");
    if let Some(&k) = a.grid.k.first() {
        config.beam =
            config.beam.with_wavenumber(k).map_err(|e| CliError::Config(e.to_string()))?;
    }
    let config = config.clone();
    let k = config.beam.wavenumber();
    let profile = profile_at(&config, config.engine, k)?;
    prepare_dir(&manifest.output_dir)?;
    let mut written = Vec::new();
    write_profile(&manifest, &profile, config.engine, k, &mut written)?;
    Ok(Outcome { written, stdout: String::new(), success: true })
}

fn run_sweep(s: &args::SweepArgs) -> Result<Outcome, CliError> {
    let manifest = run_manifest(Subcommand::Sweep, &s.run, vec![format!("paired={}", s.paired)])?;
    let config = manifest.config.clone().expect("sweep has a config");
    let mut variants = vec![config.engine];
    if s.paired {
        if !config.engine.has_internal_structure() {
            return Err(CliError::Config(format!(
                "--paired needs an engine with internal structure, got {}",
                config.engine
            )));
        }
        variants.push(config.engine.structureless_partner());
    }
    let matrices =
        variants.into_iter().map(|v| sweep_matrix(&config, v)).collect::<Result<Vec<_>, _>>()?;
    prepare_dir(&manifest.output_dir)?;
    let mut written = Vec::new();
    for m in &matrices {
        write_sweep(&manifest, m, &mut written)?;
    }
    Ok(Outcome { written, stdout: String::new(), success: true })
}

fn run_compare(c: &args::CompareArgs) -> Result<Outcome, CliError> {
    let window = match c.window.as_deref() {
        None => None,
        Some([lo, hi]) if lo < hi => Some((*lo, *hi)),
        Some(_) => return Err(CliError::Config("--window needs lo,hi with lo < hi".into())),
    };
    let options =
        window.map(|(lo, hi)| vec![format!("window={},{}", output::real(lo), output::real(hi))]);
    let manifest = run_manifest(Subcommand::Compare, &c.run, options.unwrap_or_default())?;
    let config = manifest.config.clone().expect("compare has a config");
    let (with, without, report) = compare(&config, window)?;
    prepare_dir(&manifest.output_dir)?;
    let mut written = Vec::new();
    write_profile(&manifest, &with, config.engine, report.k, &mut written)?;
    write_profile(
        &manifest,
        &without,
        config.engine.structureless_partner(),
        report.k,
        &mut written,
    )?;
    let json = output::to_json(&report);
    write(&manifest, "report", "json", &json, &mut written)?;
    Ok(Outcome { written, stdout: json, success: true })
}

pub fn parse_groups(only: &[String]) -> Result<Vec<CheckGroup>, CliError> {
    only.iter()
        .map(|name| {
            CheckGroup::parse(name).ok_or_else(|| {
                let known: Vec<&str> = CheckGroup::ALL.iter().map(|g| g.as_str()).collect();
                CliError::Config(format!(
                    "unknown check group {name:?}; known: {}",
                    known.join(", ")
                ))
            })
        })
        .collect()
}

#[derive(Serialize)]
struct CheckJson<'a> {
    name: &'a str,
    group: &'a str,
    #[serde(serialize_with = "output::json_real")]
    worst_deviation: f64,
    #[serde(serialize_with = "output::json_real")]
    tolerance: f64,
    pass: bool,
    detail: &'a str,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    all_pass: bool,
    checks: Vec<CheckJson<'a>>,
}

pub fn validation_json(report: &ValidationReport) -> String {
    output::to_json(&ReportJson {
        all_pass: report.all_pass(),
        checks: report
            .checks
            .iter()
            .map(|c| CheckJson {
                name: &c.name,
                group: c.group.as_str(),
                worst_deviation: c.worst_deviation,
                tolerance: c.tolerance,
                pass: c.pass,
                detail: &c.detail,
            })
            .collect(),
    })
}

fn run_validate(v: &args::ValidateArgs) -> Result<Outcome, CliError> {
    let groups = parse_groups(&v.only)?;
    let mut names: Vec<String> = groups.iter().map(|g| g.as_str().to_string()).collect();
    names.sort();
    names.dedup();
    let report = validate::run(&ValidateOptions { groups, ..ValidateOptions::default() });
    let json = validation_json(&report);
    let mut written = Vec::new();
    if let Some(dir) = &v.out {
        let manifest = RunManifest::new(
            Subcommand::Validate,
            None,
            dir.clone(),
            &[Format::Json],
            None,
            vec![format!("only={}", names.join(","))],
        );
        prepare_dir(dir)?;
        write(&manifest, "report", "json", &json, &mut written)?;
    }
    Ok(Outcome { written, stdout: json, success: report.all_pass() })
}
