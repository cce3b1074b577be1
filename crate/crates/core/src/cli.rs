//! Command-line front end.
//!
//! ```text
//! wcs compute --family paper --a 2 --s 1 --density-out f.csv --report-out r.json
//! wcs compute --lambda 1 --mu "2 + 0.5*sin(alpha)" --nu "2 - cos(alpha)"
//! wcs sweep --a 2,4,8 --s 1
//! wcs verify
//! ```
//!
//! Every flag can also come from a JSON file given with `--config`; flags on
//! the command line take precedence over the file.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{parse_expr, QuadratureSpec, Rule, DEFAULT_SAMPLES, DEFAULT_TOLERANCE};
use crate::cs::{cs_class, CSConfig, CSReport, DEFAULT_INTEGRALITY_TOLERANCE};
use crate::error::Error;
use crate::geometry::BergerMetric;
use crate::verify;

pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("invalid config file {path}: {source}")]
    ConfigFile {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{failed} invariant check(s) failed")]
    Invariants { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                Error::Parse { .. } => EXIT_PARSE,
                Error::NonConvergence { .. } | Error::Domain { .. } => EXIT_NUMERICAL,
                Error::ImaginaryResidue { .. } | Error::Contract(_) => EXIT_INVARIANT,
                Error::InvalidMetric(_) | Error::Config(_) => EXIT_CONFIG,
            },
            CliError::Invariants { .. } => EXIT_INVARIANT,
            CliError::Io { .. } | CliError::ConfigFile { .. } | CliError::Csv(_) | CliError::Usage(_) => {
                EXIT_CONFIG
            }
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Parser)]
#[command(name = "wcs", version, about = "Wodzicki-Chern-Simons class on L(S^3 x S^1)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density, integral and class value for one metric.
    Compute(Flags),
    /// One report per family parameter.
    Sweep(Flags),
    /// Run the invariant suite; exits 4 on any failure.
    Verify(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Paper,
    Custom,
}

/// Flags shared by all subcommands; all optional so a config file can fill
/// them in.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Flags {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Family parameter; a comma-separated list for `sweep`.
    #[arg(long = "a", value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Vec<i64>,
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long)]
    pub nu: Option<String>,
    /// Sobolev parameter, > 1/2.
    #[arg(long)]
    pub s: Option<f64>,
    /// Initial number of quadrature subintervals.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Absolute tolerance between successive quadrature refinements.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Distance from an integer below which no verdict is given.
    #[arg(long = "int-tol")]
    pub int_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub rule: Option<RuleArg>,
    #[arg(long = "density-out")]
    pub density_out: Option<PathBuf>,
    #[arg(long = "report-out")]
    pub report_out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleArg {
    Simpson,
    Romberg,
}

impl Flags {
    /// Fields set here win over those in `base`.
    fn over(self, base: Flags) -> Flags {
        Flags {
            family: self.family.or(base.family),
            a: if self.a.is_empty() { base.a } else { self.a },
            lambda: self.lambda.or(base.lambda),
            mu: self.mu.or(base.mu),
            nu: self.nu.or(base.nu),
            s: self.s.or(base.s),
            samples: self.samples.or(base.samples),
            tol: self.tol.or(base.tol),
            int_tol: self.int_tol.or(base.int_tol),
            rule: self.rule.or(base.rule),
            density_out: self.density_out.or(base.density_out),
            report_out: self.report_out.or(base.report_out),
            config: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Compute,
    Sweep,
    Verify,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricSource {
    Paper { a: Vec<i64> },
    Custom {
        lambda: String,
        mu: String,
        nu: String,
        a: i64,
    },
}

/// Fully resolved invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub metric: Option<MetricSource>,
    pub cs: CSConfig,
    pub density_out: Option<PathBuf>,
    pub report_out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(mode: Mode, flags: Flags) -> Result<Self, CliError> {
        let flags = match &flags.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(io_err(path))?;
                let base: Flags = serde_json::from_str(&text).map_err(|source| CliError::ConfigFile {
                    path: path.clone(),
                    source,
                })?;
                flags.over(base)
            }
            None => flags,
        };

        let rule = match flags.rule {
            Some(RuleArg::Romberg) => Rule::Romberg,
            _ => Rule::Simpson,
        };
        let quad = QuadratureSpec::new(
            flags.samples.unwrap_or(DEFAULT_SAMPLES),
            flags.tol.unwrap_or(DEFAULT_TOLERANCE),
            rule,
        )?;
        let cs = CSConfig::new(
            flags.s.unwrap_or(1.0),
            quad,
            flags.int_tol.unwrap_or(DEFAULT_INTEGRALITY_TOLERANCE),
        )?;

        if let (Some(d), Some(r)) = (&flags.density_out, &flags.report_out) {
            if d == r {
                return Err(CliError::Usage("--density-out and --report-out must differ".into()));
            }
        }

        let any_expr = flags.lambda.is_some() || flags.mu.is_some() || flags.nu.is_some();
        let family = match (flags.family, any_expr) {
            (Some(Family::Paper), true) => {
                return Err(CliError::Usage(
                    "--family paper cannot be combined with --lambda/--mu/--nu".into(),
                ))
            }
            (Some(f), _) => Some(f),
            (None, true) => Some(Family::Custom),
            (None, false) if !flags.a.is_empty() => Some(Family::Paper),
            (None, false) => None,
        };
        let metric = match family {
            Some(Family::Paper) => {
                if flags.a.is_empty() {
                    return Err(CliError::Usage("--family paper needs --a".into()));
                }
                if mode == Mode::Compute && flags.a.len() != 1 {
                    return Err(CliError::Usage("compute takes a single --a".into()));
                }
                Some(MetricSource::Paper { a: flags.a })
            }
            Some(Family::Custom) => {
                let (Some(lambda), Some(mu), Some(nu)) = (flags.lambda, flags.mu, flags.nu) else {
                    return Err(CliError::Usage("custom metrics need --lambda, --mu and --nu".into()));
                };
                if flags.a.len() > 1 {
                    return Err(CliError::Usage("custom metrics take at most one --a".into()));
                }
                Some(MetricSource::Custom {
                    lambda,
                    mu,
                    nu,
                    a: flags.a.first().copied().unwrap_or(1),
                })
            }
            None => None,
        };
        if metric.is_none() && mode != Mode::Verify {
            return Err(CliError::Usage(
                "no metric given: use --family paper --a <int> or --lambda/--mu/--nu".into(),
            ));
        }
        if mode == Mode::Sweep && matches!(metric, Some(MetricSource::Custom { .. })) {
            return Err(CliError::Usage("sweep takes --family paper with a list of --a values".into()));
        }
        Ok(Self {
            mode,
            metric,
            cs,
            density_out: flags.density_out,
            report_out: flags.report_out,
        })
    }
}

/// Builds a metric from three expressions in the input grammar. Positivity
/// is checked on a 1024-point grid.
pub fn parse_metric_exprs(lambda: &str, mu: &str, nu: &str, a: i64) -> Result<BergerMetric, Error> {
    BergerMetric::new(parse_expr(lambda)?, parse_expr(mu)?, parse_expr(nu)?, a)
}

#[derive(Debug, Serialize)]
struct ReportJson<'a> {
    #[serde(flatten)]
    report: &'a CSReport,
    lambda: String,
    mu: String,
    nu: String,
}

fn report_json<'a>(report: &'a CSReport, m: &BergerMetric) -> ReportJson<'a> {
    let [l, mu, nu] = m.scales().clone().map(|e| e.to_string());
    ReportJson {
        report,
        lambda: l,
        mu,
        nu,
    }
}

/// Writes `alpha,f` rows with 17 significant digits.
pub fn write_density_csv(path: &Path, samples: &[(f64, f64)]) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(file);
    w.write_record(["alpha", "f"])?;
    for &(alpha, f) in samples {
        w.write_record([format!("{alpha:.16e}"), format!("{f:.16e}")])?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn suffixed(path: &Path, a: i64) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_a{a}.{ext}"),
        None => format!("{stem}_a{a}"),
    };
    path.with_file_name(name)
}

fn summary_line(r: &CSReport) -> String {
    let a = r.a.map_or_else(|| "-".to_string(), |a| a.to_string());
    format!(
        "{a:>4}  {:>14.6}  {:>12.6}  {:>9.6}  {:>9.6}  {:?}",
        r.integral, r.class_value, r.mod_z, r.alt_mod_z, r.verdict
    )
}

const SUMMARY_HEADER: &str = "   a        integral   class(s/4)   mod Z     alt mod Z  verdict";

pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let stdout_err = |e| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    };
    match cfg.mode {
        Mode::Compute => {
            let m = match cfg.metric.as_ref().expect("resolved") {
                MetricSource::Paper { a } => BergerMetric::paper_family(a[0])?,
                MetricSource::Custom { lambda, mu, nu, a } => parse_metric_exprs(lambda, mu, nu, *a)?,
            };
            let report = cs_class(&m, &cfg.cs)?;
            if let Some(p) = &cfg.density_out {
                write_density_csv(p, &report.samples)?;
            }
            match &cfg.report_out {
                Some(p) => write_json(p, &report_json(&report, &m))?,
                None => {
                    let text = serde_json::to_string_pretty(&report_json(&report, &m)).expect("serializable");
                    writeln!(out, "{text}").map_err(stdout_err)?;
                }
            }
            writeln!(out, "{SUMMARY_HEADER}").map_err(stdout_err)?;
            writeln!(out, "{}", summary_line(&report)).map_err(stdout_err)?;
        }
        Mode::Sweep => {
            let Some(MetricSource::Paper { a }) = &cfg.metric else {
                unreachable!("resolve admits only --family paper for sweeps")
            };
            if a.contains(&0) {
                return Err(Error::Config("family parameter a must be nonzero".into()).into());
            }
            writeln!(out, "{SUMMARY_HEADER}").map_err(stdout_err)?;
            let mut reports = Vec::with_capacity(a.len());
            for &ai in a {
                let m = BergerMetric::paper_family(ai)?;
                let mut r = cs_class(&m, &cfg.cs)?;
                r.a = Some(ai);
                writeln!(out, "{}", summary_line(&r)).map_err(stdout_err)?;
                if let Some(p) = &cfg.density_out {
                    write_density_csv(&suffixed(p, ai), &r.samples)?;
                }
                if let Some(p) = &cfg.report_out {
                    write_json(&suffixed(p, ai), &report_json(&r, &m))?;
                }
                reports.push(r);
            }
            if let Some(p) = &cfg.report_out {
                write_json(p, &reports)?;
            }
        }
        Mode::Verify => {
            let outcomes = verify::run_all(cfg.cs.quadrature())?;
            for o in &outcomes {
                writeln!(out, "{o}").map_err(stdout_err)?;
            }
            if let Some(p) = &cfg.report_out {
                write_json(p, &outcomes)?;
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed > 0 {
                return Err(CliError::Invariants { failed });
            }
        }
    }
    Ok(())
}

/// Parses `args`, runs, and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let (mode, flags) = match cli.command {
        Command::Compute(f) => (Mode::Compute, f),
        Command::Sweep(f) => (Mode::Sweep, f),
        Command::Verify(f) => (Mode::Verify, f),
    };
    let result = RunConfig::resolve(mode, flags).and_then(|cfg| run(&cfg, &mut io::stdout().lock()));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
