//! The `onelevel` command-line driver.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 a verification tolerance
//! was exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{make_report_with, sample_phi, sigma_range, sweep, sweep_csv, ReportOptions};
use crate::error::{Error, Result};
use crate::fredholm::{nystrom_solve, oracle_discrepancy, NystromConfig};
use crate::kernels::Group;
use crate::optimal::{build_optimal_g, check_sigma, delay_ode_residuals, verify_criterion, OptimalG, ODE_SAMPLES, ODE_STEP};

pub const CRITERION_TOL: f64 = 1e-8;
pub const ODE_TOL: f64 = 1e-6;
pub const ORACLE_TOL: f64 = 1e-3;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_TOLERANCE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "onelevel", version, about = "Optimal 1-level density test functions and rank bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// SOeven, SOodd, Sp, O or U.
    #[arg(long)]
    pub group: Option<String>,
    /// A value in [1, 1.5], or start:stop:step for `sweep`.
    #[arg(long)]
    pub sigma: Option<String>,
    /// Points in the verification / export grid.
    #[arg(long = "grid", default_value_t = 1001)]
    pub grid_size: usize,
    /// Uniform Nystrom nodes.
    #[arg(long = "nodes", default_value_t = 1001)]
    pub nystrom_nodes: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Defaults to csv for `sweep`, json otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct the optimal g and print it as JSON.
    Build(Common),
    /// Check (I + K) g = 1 and the delay ODEs.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Verify a previously built g instead of constructing one.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Compare the closed form with a Nystrom solve.
    Oracle(Common),
    /// Every bound for one (group, sigma).
    Bounds(Common),
    /// Bounds over a sigma range, as CSV.
    Sweep(Common),
    /// Write g, phi and phi^ samples.
    ExportPhi {
        #[command(flatten)]
        common: Common,
        /// Half-width of the phi grid.
        #[arg(long, default_value_t = 3.0)]
        x_max: f64,
    },
}

/// Parsed and validated command.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: &'static str,
    pub groups: Vec<Group>,
    pub sigmas: Vec<f64>,
    pub grid_size: usize,
    pub nystrom_nodes: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Tolerance(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn parse_groups(raw: Option<&str>, command: &str) -> Result<Vec<Group>> {
    match raw {
        Some(s) => s.split(',').map(|g| g.trim().parse()).collect(),
        None if command == "sweep" => Ok(Group::ORTHOSYMPLECTIC.to_vec()),
        None => Err(Error::InvalidArgument("--group is required".into())),
    }
}

fn parse_sigma(raw: &str) -> Result<f64> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("invalid sigma '{raw}'")))?;
    check_sigma(v)?;
    Ok(v)
}

fn parse_sigmas(raw: Option<&str>, command: &str) -> Result<Vec<f64>> {
    let raw = raw.ok_or_else(|| Error::InvalidArgument("--sigma is required".into()))?;
    let parts: Vec<&str> = raw.split(':').collect();
    match parts.as_slice() {
        [one] => Ok(vec![parse_sigma(one)?]),
        [start, stop, step] if command == "sweep" => {
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("invalid sigma range '{raw}'")))
            };
            let values = sigma_range(num(start)?, num(stop)?, num(step)?)?;
            for &v in &values {
                check_sigma(v)?;
            }
            Ok(values)
        }
        _ => Err(Error::InvalidArgument(format!("invalid sigma '{raw}'"))),
    }
}

impl RunConfig {
    fn from_common(command: &'static str, c: &Common, needs_sigma: bool) -> Result<Self> {
        if c.grid_size < 2 {
            return Err(Error::InvalidArgument("--grid must be at least 2".into()));
        }
        let groups = if needs_sigma || c.group.is_some() {
            parse_groups(c.group.as_deref(), command)?
        } else {
            Vec::new()
        };
        let sigmas = if needs_sigma || c.sigma.is_some() {
            parse_sigmas(c.sigma.as_deref(), command)?
        } else {
            Vec::new()
        };
        Ok(Self {
            command,
            groups,
            sigmas,
            grid_size: c.grid_size,
            nystrom_nodes: c.nystrom_nodes,
            output: c.output.clone(),
            format: c.format.unwrap_or(if command == "sweep" { Format::Csv } else { Format::Json }),
        })
    }

    fn single(&self) -> (Group, f64) {
        (self.groups[0], self.sigmas[0])
    }

    fn require_single(&self) -> Result<()> {
        if self.groups.len() != 1 {
            return Err(Error::InvalidArgument(format!("{} takes exactly one group", self.command)));
        }
        Ok(())
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => out.write_all(text.as_bytes()),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable value");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct VerifyOutput {
    group: Group,
    sigma: f64,
    grid_size: usize,
    criterion_residual: f64,
    ode_residual_inner: f64,
    ode_residual_outer: f64,
    pass: bool,
}

#[derive(Serialize)]
struct OracleOutput {
    group: Group,
    sigma: f64,
    nystrom_nodes: usize,
    oracle_discrepancy: f64,
    pass: bool,
}

fn cmd_build(cfg: &RunConfig, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    cfg.require_single()?;
    let (g, s) = cfg.single();
    let og = build_optimal_g(g, s)?;
    let text = match cfg.format {
        Format::Json => to_json(&og),
        Format::Csv => og.f.to_csv(cfg.grid_size),
    };
    emit(out, cfg.output.as_deref(), &text)?;
    Ok(())
}

fn verify_og(og: &OptimalG, cfg: &RunConfig, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let criterion_residual = verify_criterion(og, cfg.grid_size)?;
    let ode = delay_ode_residuals(og, ODE_STEP, ODE_SAMPLES)?;
    let pass = criterion_residual <= CRITERION_TOL && ode.max() <= ODE_TOL;
    let report = VerifyOutput {
        group: og.group,
        sigma: og.sigma,
        grid_size: cfg.grid_size,
        criterion_residual,
        ode_residual_inner: ode.inner,
        ode_residual_outer: ode.outer,
        pass,
    };
    let text = match cfg.format {
        Format::Json => to_json(&report),
        Format::Csv => format!(
            "group,sigma,grid_size,criterion_residual,ode_residual_inner,ode_residual_outer,pass\n{},{},{},{},{},{},{}\n",
            report.group,
            crate::piecewise::fmt_f64(report.sigma),
            report.grid_size,
            crate::piecewise::fmt_f64(report.criterion_residual),
            crate::piecewise::fmt_f64(report.ode_residual_inner),
            crate::piecewise::fmt_f64(report.ode_residual_outer),
            report.pass
        ),
    };
    emit(out, cfg.output.as_deref(), &text)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Tolerance(format!(
            "criterion residual {criterion_residual:e} or ODE residual {:e} above tolerance",
            ode.max()
        )))
    }
}

fn cmd_verify(cfg: &RunConfig, input: Option<&Path>, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let og = match input {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str::<OptimalG>(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        None => {
            cfg.require_single()?;
            let (g, s) = cfg.single();
            build_optimal_g(g, s)?
        }
    };
    verify_og(&og, cfg, out)
}

fn cmd_oracle(cfg: &RunConfig, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    cfg.require_single()?;
    let (g, s) = cfg.single();
    let og = build_optimal_g(g, s)?;
    let sampled = nystrom_solve(g, s, &NystromConfig::new(cfg.nystrom_nodes)?)?;
    let d = oracle_discrepancy(&og, &sampled)?;
    let summary = OracleOutput {
        group: g,
        sigma: s,
        nystrom_nodes: sampled.nodes.len(),
        oracle_discrepancy: d,
        pass: d <= ORACLE_TOL,
    };
    let csv = sampled.comparison_csv(&og);
    match (&cfg.output, cfg.format) {
        (Some(path), _) => {
            fs::write(path, &csv)?;
            out.write_all(to_json(&summary).as_bytes())?;
        }
        (None, Format::Csv) => out.write_all(csv.as_bytes())?,
        (None, Format::Json) => out.write_all(to_json(&summary).as_bytes())?,
    }
    if summary.pass {
        Ok(())
    } else {
        Err(Failure::Tolerance(format!("oracle discrepancy {d:e} above {ORACLE_TOL:e}")))
    }
}

fn report_options(cfg: &RunConfig) -> ReportOptions {
    ReportOptions { grid_size: cfg.grid_size, nystrom_nodes: cfg.nystrom_nodes }
}

fn cmd_bounds(cfg: &RunConfig, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    cfg.require_single()?;
    let (g, s) = cfg.single();
    NystromConfig::new(cfg.nystrom_nodes)?;
    let report = make_report_with(g, s, &report_options(cfg))?;
    let text = match cfg.format {
        Format::Json => to_json(&report),
        Format::Csv => sweep_csv(std::slice::from_ref(&report)),
    };
    emit(out, cfg.output.as_deref(), &text)?;
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    if cfg.groups.contains(&Group::U) {
        return Err(Error::UnsupportedGroup(Group::U).into());
    }
    NystromConfig::new(cfg.nystrom_nodes)?;
    let reports = sweep(&cfg.groups, &cfg.sigmas, &report_options(cfg))?;
    let text = match cfg.format {
        Format::Csv => sweep_csv(&reports),
        Format::Json => to_json(&reports),
    };
    emit(out, cfg.output.as_deref(), &text)?;
    Ok(())
}

fn cmd_export_phi(cfg: &RunConfig, x_max: f64, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    cfg.require_single()?;
    if !(x_max > 0.0) || !x_max.is_finite() {
        return Err(Failure::Usage(format!("--x-max must be positive, got {x_max}")));
    }
    let (g, s) = cfg.single();
    let og = build_optimal_g(g, s)?;
    let sample = sample_phi(&og.f, x_max, cfg.grid_size, cfg.grid_size);
    let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let stem = format!("{}_{}", g, s);
    let files = [
        (dir.join(format!("g_{stem}.csv")), og.f.to_csv(cfg.grid_size)),
        (dir.join(format!("phi_{stem}.csv")), sample.phi_csv()),
        (dir.join(format!("phi_hat_{stem}.csv")), sample.phi_hat_csv()),
    ];
    for (path, text) in &files {
        fs::write(path, text)?;
        writeln!(out, "{}", path.display())?;
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to stderr. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = dispatch(&cli.command, out);
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Tolerance(msg)) => {
            eprintln!("verification failed: {msg}");
            EXIT_TOLERANCE
        }
    }
}

fn dispatch(command: &Command, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    match command {
        Command::Build(c) => cmd_build(&RunConfig::from_common("build", c, true)?, out),
        Command::Verify { common, input } => {
            let cfg = RunConfig::from_common("verify", common, input.is_none())?;
            cmd_verify(&cfg, input.as_deref(), out)
        }
        Command::Oracle(c) => cmd_oracle(&RunConfig::from_common("oracle", c, true)?, out),
        Command::Bounds(c) => cmd_bounds(&RunConfig::from_common("bounds", c, true)?, out),
        Command::Sweep(c) => cmd_sweep(&RunConfig::from_common("sweep", c, true)?, out),
        Command::ExportPhi { common, x_max } => {
            cmd_export_phi(&RunConfig::from_common("export-phi", common, true)?, *x_max, out)
        }
    }
}
