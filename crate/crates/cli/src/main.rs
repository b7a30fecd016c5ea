mod commands;
mod manifest;
mod svg;

use clap::{Args, Parser, Subcommand};
use shadowtrace::{CurveSpec, ErrorKind, IntegrationConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "shadowtrace", version, about = "Shadowing curves of closed planar curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Curve spec: a JSON file, or inline JSON starting with `{`.
    #[arg(long)]
    pub curve: String,
    /// Fixed RK4 steps per period 2π.
    #[arg(long, default_value_t = 4096)]
    pub steps_per_period: usize,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate one shadowing curve; writes CSV, SVG, cusp JSON and a manifest.
    Trace {
        #[command(flatten)]
        common: Common,
        #[arg(long = "R", value_parser = parse_angle, allow_hyphen_values = true)]
        r: f64,
        #[arg(long, default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
        theta0: f64,
        /// `a:b`; each side may use `pi`, e.g. `0:4pi` or `-pi/2:pi`.
        #[arg(long, default_value = "0:2pi", value_parser = parse_span, allow_hyphen_values = true)]
        t_span: (f64, f64),
    },
    /// Rotation numbers on a uniform grid of distances.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long = "R-min")]
        r_min: f64,
        #[arg(long = "R-max")]
        r_max: f64,
        #[arg(long, default_value_t = 100)]
        n_points: usize,
        #[arg(long, default_value_t = 512)]
        n_periods: usize,
    },
    /// Critical distance, and optionally the turning distance.
    Critical {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long)]
        turning: bool,
        #[arg(long, default_value_t = 512)]
        n_periods: usize,
    },
    /// Distance with rotation number `ω₀ − q/p`, and one closed period of it.
    Subharmonic {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
        theta0: f64,
    },
    /// Cross-check the integrators against the circle closed forms.
    OracleCheck {
        #[arg(long, default_value_t = 512)]
        n_periods: usize,
        #[arg(long, default_value_t = 4096)]
        steps_per_period: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Corrupt the integrator on purpose (`flip-se-sign`).
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
}

/// Parses `x`, `xpi`, `pi/x` or `xpi/y`.
fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d.trim().parse::<f64>().map_err(|e| format!("bad denominator in {s:?}: {e}"))?),
        None => (s, 1.0),
    };
    let num = num.trim();
    let value = match num.strip_suffix("pi") {
        Some("") => std::f64::consts::PI,
        Some("-") => -std::f64::consts::PI,
        Some(c) => c.trim().parse::<f64>().map_err(|e| format!("bad number {s:?}: {e}"))? * std::f64::consts::PI,
        None => num.parse::<f64>().map_err(|e| format!("bad number {s:?}: {e}"))?,
    };
    let v = value / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

fn parse_span(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got {s:?}"))?;
    Ok((parse_angle(a)?, parse_angle(b)?))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] shadowtrace::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Check(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Validation => 2,
                ErrorKind::Numerical => 3,
                ErrorKind::Hypothesis => 4,
            },
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 1,
            CliError::Check(_) => 3,
        }
    }
}

pub fn read_curve(arg: &str) -> Result<CurveSpec, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|source| CliError::Io { path: arg.into(), source })?
    };
    Ok(CurveSpec::from_json(&text)?)
}

pub fn integration(steps_per_period: usize) -> Result<IntegrationConfig, CliError> {
    let cfg = IntegrationConfig::rk4(steps_per_period);
    cfg.validate()?;
    Ok(cfg)
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("SHADOWTRACE_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Usage(format!("SHADOWTRACE_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::Trace { common, r, theta0, t_span } => commands::trace(&common, r, theta0, t_span),
        Command::Sweep {
            common,
            r_min,
            r_max,
            n_points,
            n_periods,
        } => commands::sweep(&common, r_min, r_max, n_points, n_periods),
        Command::Critical {
            common,
            tol,
            turning,
            n_periods,
        } => commands::critical(&common, tol, turning, n_periods),
        Command::Subharmonic { common, p, q, tol, theta0 } => commands::subharmonic(&common, p, q, tol, theta0),
        Command::OracleCheck {
            n_periods,
            steps_per_period,
            out,
            inject_fault,
        } => commands::oracle_check(n_periods, steps_per_period, &out, inject_fault.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
