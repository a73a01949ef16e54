//! Command-line front end: argument and config-file parsing, CSV/JSON output,
//! exit codes.
//!
//! Config files hold `key = value` lines whose keys are the long flag names
//! (`theta-steps = 61`); `#` starts a comment. Flags given on the command line
//! override file values.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{self, BoundFlavor, BoundReport, Quadrature};
use crate::error::Error;
use crate::hamiltonian::Topology;
use crate::qstate::{density_from_pure, product_state};
use crate::selftest::{self, CheckRow, Fault};
use crate::sweeps::{self, GridRange, Model, SweepConfig, SweepResult, SweepSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

pub const THREADS_ENV: &str = "QSLGEOM_THREADS";

pub const CSV_HEADER: &str = "theta,tau,dH,overlap_angle,E_G,G_E,lhs,delta";

#[derive(Parser, Debug)]
#[command(
    name = "qslgeom",
    version,
    about = "Geometric quantum speed limits and entanglement"
)]
struct Cli {
    #[command(subcommand)]
    command: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Evaluate the bound on a (theta, tau) grid and write CSV.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Evaluate the bound at one point and print the report as JSON.
    #[command(allow_negative_numbers = true)]
    Check(CheckArgs),
    /// Run the built-in oracle suite.
    Selftest(SelftestArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModelArg {
    Cluster,
    Xyz,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TopologyArg {
    Open,
    Ring,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FlavorArg {
    PureFs,
    MixedFs,
    Bures,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FaultArg {
    DhSign,
}

/// Options shared by `sweep` and `check`.
#[derive(Args, Debug, Default, Clone)]
struct ModelArgs {
    /// Read defaults from a `key = value` file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    /// Number of qubits.
    #[arg(long)]
    n: Option<usize>,
    /// Coupling J.
    #[arg(long)]
    j: Option<f64>,
    /// XYZ anisotropy.
    #[arg(long)]
    gamma: Option<f64>,
    /// XYZ ZZ coupling.
    #[arg(long)]
    mu: Option<f64>,
    /// XYZ longitudinal field.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long, value_enum)]
    topology: Option<TopologyArg>,
    /// Azimuth of the initial product state.
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long, value_enum)]
    flavor: Option<FlavorArg>,
    /// Depolarizing weight of the initial state (mixed flavors).
    #[arg(long)]
    mixing_p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Restarts of the product-state optimizer (mixed flavors).
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug, Default, Clone)]
struct SweepArgs {
    #[command(flatten)]
    common: ModelArgs,
    #[arg(long)]
    theta_min: Option<f64>,
    #[arg(long)]
    theta_max: Option<f64>,
    #[arg(long)]
    theta_steps: Option<usize>,
    #[arg(long)]
    tau_min: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    tau_steps: Option<usize>,
    /// Cells with delta below this count as saturated.
    #[arg(long)]
    saturation_threshold: Option<f64>,
    /// CSV output path (standard output when absent).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// JSON summary output path.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Clone)]
struct CheckArgs {
    #[command(flatten)]
    common: ModelArgs,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    /// Trapezoid intervals for the mixed path length (closed form when absent).
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct SelftestArgs {
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<FaultArg>,
}

/// A validated command.
#[derive(Debug, Clone)]
pub enum CliCommand {
    Sweep {
        config: SweepConfig,
        out: Option<PathBuf>,
        json: Option<PathBuf>,
    },
    Check {
        config: SweepConfig,
        theta: f64,
        tau: f64,
        quadrature: Quadrature,
    },
    Selftest {
        fault: Option<Fault>,
    },
}

#[derive(Debug)]
pub enum ParseOutcome {
    Command(CliCommand),
    /// `--help` or `--version`: print and exit 0.
    Info(String),
    Usage(String),
}

macro_rules! prefer {
    ($primary:expr, $fallback:expr; $($field:ident),*) => {
        $( if $primary.$field.is_none() { $primary.$field = $fallback.$field.take(); } )*
    };
}

impl ModelArgs {
    fn fill_from(&mut self, mut file: ModelArgs) {
        prefer!(self, file; model, n, j, gamma, mu, h, topology, phi, flavor, mixing_p, seed,
            restarts, max_iters, tol);
    }
}

impl SweepArgs {
    fn fill_from(&mut self, mut file: SweepArgs) {
        self.common.fill_from(file.common.clone());
        prefer!(self, file; theta_min, theta_max, theta_steps, tau_min, tau_max, tau_steps,
            saturation_threshold, out, json);
    }
}

impl CheckArgs {
    fn fill_from(&mut self, mut file: CheckArgs) {
        self.common.fill_from(file.common.clone());
        prefer!(self, file; theta, tau, steps);
    }
}

/// Turns a config file into `--key value` tokens.
fn config_tokens(path: &Path) -> std::result::Result<Vec<String>, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut tokens = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected `key = value`", path.display(), lineno + 1))?;
        let key = key.trim();
        if key == "config" {
            return Err(format!(
                "{}:{}: nested config files are not supported",
                path.display(),
                lineno + 1
            ));
        }
        tokens.push(format!("--{key}={}", value.trim()));
    }
    Ok(tokens)
}

fn parse_file<T>(
    verb: &str,
    path: &Path,
    pick: impl Fn(Verb) -> Option<T>,
) -> std::result::Result<T, String> {
    let mut argv = vec!["qslgeom".to_string(), verb.to_string()];
    argv.extend(config_tokens(path)?);
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        format!(
            "in config {}: {}",
            path.display(),
            e.render().to_string().trim_end()
        )
    })?;
    pick(cli.command).ok_or_else(|| "config parsed into the wrong verb".to_string())
}

fn base_config(c: &ModelArgs) -> std::result::Result<SweepConfig, String> {
    let model = match c.model.unwrap_or(ModelArg::Cluster) {
        ModelArg::Cluster => Model::Cluster,
        ModelArg::Xyz => Model::Xyz,
    };
    if model == Model::Cluster && (c.gamma.is_some() || c.mu.is_some() || c.h.is_some()) {
        return Err("--gamma, --mu and --h apply only to --model xyz".into());
    }
    let flavor = match c.flavor.unwrap_or(FlavorArg::PureFs) {
        FlavorArg::PureFs => BoundFlavor::PureFs,
        FlavorArg::MixedFs => BoundFlavor::MixedFs,
        FlavorArg::Bures => BoundFlavor::Bures,
    };
    if flavor == BoundFlavor::PureFs && c.mixing_p.is_some() {
        return Err("--mixing-p requires --flavor mixed-fs or bures".into());
    }
    let defaults = SweepConfig::default();
    let finite = |name: &str, v: Option<f64>, d: f64| {
        let v = v.unwrap_or(d);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("--{name} must be finite"))
        }
    };
    Ok(SweepConfig {
        model,
        n_qubits: c.n.unwrap_or(defaults.n_qubits),
        j: finite("j", c.j, defaults.j)?,
        gamma: finite("gamma", c.gamma, defaults.gamma)?,
        mu: finite("mu", c.mu, defaults.mu)?,
        h: finite("h", c.h, defaults.h)?,
        topology: c.topology.map(|t| match t {
            TopologyArg::Open => Topology::Open,
            TopologyArg::Ring => Topology::Ring,
        }),
        phi: finite("phi", c.phi, defaults.phi)?,
        flavor,
        mixing_p: c.mixing_p,
        seed: c.seed.unwrap_or(defaults.seed),
        restarts: c.restarts.unwrap_or(defaults.restarts),
        max_iters: c.max_iters.unwrap_or(defaults.max_iters),
        tol: finite("tol", c.tol, defaults.tol)?,
        ..defaults
    })
}

fn validated(config: SweepConfig) -> std::result::Result<SweepConfig, String> {
    config.validate().map_err(|e| e.to_string())?;
    config.hamiltonian().map_err(|e| e.to_string())?;
    if config.restarts == 0 {
        return Err("--restarts must be at least 1".into());
    }
    Ok(config)
}

fn build_sweep(mut args: SweepArgs) -> std::result::Result<CliCommand, String> {
    if let Some(path) = args.common.config.clone() {
        let file = parse_file("sweep", &path, |v| match v {
            Verb::Sweep(a) => Some(a),
            _ => None,
        })?;
        args.fill_from(file);
    }
    let mut config = base_config(&args.common)?;
    let d = SweepConfig::default();
    config.theta_range = GridRange::new(
        args.theta_min.unwrap_or(d.theta_range.min),
        args.theta_max.unwrap_or(d.theta_range.max),
        args.theta_steps.unwrap_or(d.theta_range.steps),
    );
    config.tau_range = GridRange::new(
        args.tau_min.unwrap_or(d.tau_range.min),
        args.tau_max.unwrap_or(d.tau_range.max),
        args.tau_steps.unwrap_or(d.tau_range.steps),
    );
    config.saturation_threshold = args.saturation_threshold.unwrap_or(d.saturation_threshold);
    Ok(CliCommand::Sweep {
        config: validated(config)?,
        out: args.out,
        json: args.json,
    })
}

fn build_check(mut args: CheckArgs) -> std::result::Result<CliCommand, String> {
    if let Some(path) = args.common.config.clone() {
        let file = parse_file("check", &path, |v| match v {
            Verb::Check(a) => Some(a),
            _ => None,
        })?;
        args.fill_from(file);
    }
    let config = validated(base_config(&args.common)?)?;
    let theta = args.theta.ok_or("check requires --theta")?;
    let tau = args.tau.ok_or("check requires --tau")?;
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err("--theta must lie within [0, pi]".into());
    }
    if !(tau.is_finite() && tau >= 0.0) {
        return Err("--tau must be finite and nonnegative".into());
    }
    let quadrature = match args.steps {
        None => Quadrature::ClosedForm,
        Some(_) if config.flavor == BoundFlavor::PureFs => {
            return Err("--steps applies only to mixed flavors".into())
        }
        Some(s) if s < 2 => return Err("--steps must be at least 2".into()),
        Some(s) => Quadrature::Trapezoid(s),
    };
    Ok(CliCommand::Check {
        config,
        theta,
        tau,
        quadrature,
    })
}

pub fn parse_args<I, T>(argv: I) -> ParseOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ParseOutcome::Info(text),
                _ => ParseOutcome::Usage(text),
            };
        }
    };
    let built = match cli.command {
        Verb::Sweep(a) => build_sweep(a),
        Verb::Check(a) => build_check(a),
        Verb::Selftest(a) => Ok(CliCommand::Selftest {
            fault: a.inject_fault.map(|f| match f {
                FaultArg::DhSign => Fault::DhSign,
            }),
        }),
    };
    match built {
        Ok(c) => ParseOutcome::Command(c),
        Err(msg) => ParseOutcome::Usage(format!("error: {msg}\n")),
    }
}

/// 17 significant digits; zero (of either sign) is written as `0`.
pub fn format_value(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_csv<W: Write>(result: &SweepResult, mut w: W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for c in &result.cells {
        let fields = [
            c.params.theta.unwrap_or(f64::NAN),
            c.params.tau,
            c.fluctuation,
            c.rhs_geodesic,
            c.entanglement,
            c.rhs_entanglement,
            c.lhs,
            c.delta,
        ];
        let line: Vec<String> = fields.iter().map(|&x| format_value(x)).collect();
        w.write_all(line.join(",").as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> io::Result<()> {
    let file = fs::File::create(path)?;
    write_csv(result, io::BufWriter::new(file))
}

#[derive(Serialize)]
struct SweepJson<'a> {
    config: &'a SweepConfig,
    summary: SweepSummary,
    violations: Vec<&'a BoundReport>,
}

fn sweep_json(result: &SweepResult) -> serde_json::Result<String> {
    serde_json::to_string_pretty(&SweepJson {
        config: &result.config,
        summary: sweeps::summarize(result),
        violations: result
            .violations
            .iter()
            .map(|v| result.cell(v.theta_index, v.tau_index))
            .collect(),
    })
}

fn report_violations(cells: &[&BoundReport], err: &mut dyn Write) {
    for c in cells {
        let record = serde_json::to_string(c).unwrap_or_default();
        let _ = writeln!(err, "violation: {record}");
    }
}

fn runtime_error(err: &mut dyn Write, e: impl std::fmt::Display) -> i32 {
    let _ = writeln!(err, "error: {e}");
    EXIT_RUNTIME
}

fn run_sweep_command(
    config: &SweepConfig,
    out_path: Option<&Path>,
    json_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let result = match sweeps::run_sweep(config) {
        Ok(r) => r,
        Err(Error::Sweep(cells)) => {
            for c in &cells {
                let _ = writeln!(
                    err,
                    "cell ({}, {}): {}",
                    c.theta_index, c.tau_index, c.message
                );
            }
            return EXIT_RUNTIME;
        }
        Err(e) => return runtime_error(err, e),
    };
    let written = match out_path {
        Some(p) => emit_csv(&result, p),
        None => write_csv(&result, &mut *out),
    };
    if let Err(e) = written {
        return runtime_error(err, e);
    }
    if let Some(p) = json_path {
        match sweep_json(&result) {
            Ok(text) => {
                if let Err(e) = fs::write(p, text + "\n") {
                    return runtime_error(err, e);
                }
            }
            Err(e) => return runtime_error(err, e),
        }
    }
    let bad: Vec<&BoundReport> = result
        .violations
        .iter()
        .map(|v| result.cell(v.theta_index, v.tau_index))
        .collect();
    if bad.is_empty() {
        EXIT_OK
    } else {
        report_violations(&bad, err);
        EXIT_VIOLATION
    }
}

fn run_check_command(
    config: &SweepConfig,
    theta: f64,
    tau: f64,
    quadrature: Quadrature,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let report = (|| -> crate::Result<BoundReport> {
        let spec = config.hamiltonian()?;
        let psi0 = product_state(theta, config.phi, config.n_qubits)?;
        if config.flavor == BoundFlavor::PureFs {
            return Ok(bounds::check_pure(&spec, &psi0, tau)?.at_angles(theta, config.phi));
        }
        let p = config.mixing_p.unwrap_or(0.0);
        let rho0 = density_from_pure(&psi0).depolarized(p)?;
        let opts = config.als_options();
        let r = if config.flavor == BoundFlavor::MixedFs {
            bounds::check_mixed_fs(&spec, &rho0, tau, quadrature, &opts)?
        } else {
            bounds::check_bures(&spec, &rho0, tau, quadrature, &opts)?
        };
        Ok(r.at_angles(theta, config.phi).with_mixing(p))
    })();
    let report = match report {
        Ok(r) => r,
        Err(e) => return runtime_error(err, e),
    };
    match serde_json::to_string_pretty(&report) {
        Ok(text) => {
            if let Err(e) = writeln!(out, "{text}") {
                return runtime_error(err, e);
            }
        }
        Err(e) => return runtime_error(err, e),
    }
    if report.is_violation() {
        report_violations(&[&report], err);
        EXIT_VIOLATION
    } else {
        EXIT_OK
    }
}

fn print_table(rows: &[CheckRow], out: &mut dyn Write) -> io::Result<()> {
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in rows {
        writeln!(
            out,
            "{}  {:width$}  worst {:.3e}  tol {:.1e}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.worst,
            r.tolerance,
        )?;
    }
    Ok(())
}

/// Executes a parsed command and returns the process exit code.
pub fn execute(command: &CliCommand, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match command {
        CliCommand::Sweep {
            config,
            out: path,
            json,
        } => run_sweep_command(config, path.as_deref(), json.as_deref(), out, err),
        CliCommand::Check {
            config,
            theta,
            tau,
            quadrature,
        } => run_check_command(config, *theta, *tau, *quadrature, out, err),
        CliCommand::Selftest { fault } => {
            let rows = selftest::run_selftest(*fault);
            if let Err(e) = print_table(&rows, out) {
                return runtime_error(err, e);
            }
            if rows.iter().all(|r| r.passed) {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            }
        }
    }
}

/// Reads `QSLGEOM_THREADS` and sizes the global worker pool.
pub fn configure_threads() -> std::result::Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Full program: parse, configure, execute.
pub fn main_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let command = match parse_args(argv) {
        ParseOutcome::Command(c) => c,
        ParseOutcome::Info(text) => {
            let _ = write!(out, "{text}");
            return EXIT_OK;
        }
        ParseOutcome::Usage(text) => {
            let _ = write!(err, "{text}");
            return EXIT_USAGE;
        }
    };
    if let Err(msg) = configure_threads() {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_USAGE;
    }
    execute(&command, out, err)
}
