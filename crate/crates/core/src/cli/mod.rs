//! Command-line front end: `mfh analyze | simulate | validate | figure`.
//!
//! Exit codes: 0 success, 1 usage/config/IO error, 2 numeric failure,
//! 3 oracle vs Monte Carlo disagreement.

pub mod config;
pub mod csv;
pub mod sweep;
pub mod validate;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use config::{parse_config, ConfigError, OracleChoice, PuModel, ScenarioConfig, SweepVariable};
pub use csv::{emit_csv, write_csv, WriteError};
pub use sweep::{
    cmd_analyze, cmd_conventional_fh, cmd_figure, cmd_simulate, Curve, Figure, SweepResult,
    SweepRow,
};
pub use validate::{cmd_validate, ValidationReport};

use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "mfh",
    version,
    about = "Mode-frequency hopping anti-jamming analysis"
)]
pub struct Args {
    /// Overrides the config's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the config's Monte Carlo trial count.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Output file (a directory for `figure`); standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// closed-form, numeric or both.
    #[arg(long, global = true)]
    pub oracle: Option<OracleChoice>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic sweep of the configured variable.
    Analyze { config: PathBuf },
    /// Analytic sweep plus simulated capacity.
    Simulate { config: PathBuf },
    /// Audit closed forms against the quadrature oracle and Monte Carlo.
    Validate { config: PathBuf },
    /// Reproduce one figure family, one CSV per curve.
    Figure { name: Figure, config: PathBuf },
}

impl Command {
    fn config_path(&self) -> &Path {
        match self {
            Self::Analyze { config }
            | Self::Simulate { config }
            | Self::Validate { config }
            | Self::Figure { config, .. } => config,
        }
    }
}

fn numeric_exit(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter { .. } => EXIT_USAGE,
        Error::Domain(_) | Error::Convergence { .. } | Error::ClosedFormUnavailable(_) => {
            EXIT_NUMERIC
        }
    }
}

fn load(args: &Args) -> Result<ScenarioConfig, String> {
    let path = args.command.config_path();
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut cfg = parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(oracle) = args.oracle {
        cfg.oracle = oracle;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn emit_sweep<W: Write>(
    result: &SweepResult,
    out: Option<&Path>,
    stdout: &mut W,
) -> Result<(), String> {
    match out {
        Some(path) => emit_csv(result, path).map_err(|e| e.to_string()),
        None => {
            write_csv(result, stdout).map_err(|e| format!("cannot write to standard output: {e}"))
        }
    }
}

fn emit_curves<W: Write>(
    fig: Figure,
    curves: &[Curve],
    out: Option<&Path>,
    stdout: &mut W,
) -> Result<(), String> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
            for c in curves {
                let path = dir.join(format!("{fig}_{}.csv", c.label()));
                emit_csv(&c.result, &path).map_err(|e| e.to_string())?;
            }
            Ok(())
        }
        None => {
            for c in curves {
                writeln!(stdout, "# curve: {}", c.label())
                    .and_then(|_| write_csv(&c.result, &mut *stdout))
                    .map_err(|e| format!("cannot write to standard output: {e}"))?;
            }
            Ok(())
        }
    }
}

/// Validation CSV goes to `--out` (or stdout); the text summary to `err`.
fn emit_validation<W: Write, E: Write>(
    report: &ValidationReport,
    out: Option<&Path>,
    stdout: &mut W,
    err: &mut E,
) -> Result<(), String> {
    match out {
        Some(path) => {
            let file = fs::File::create(path)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            report
                .write_csv(std::io::BufWriter::new(file))
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        }
        None => report
            .write_csv(&mut *stdout)
            .map_err(|e| format!("cannot write to standard output: {e}"))?,
    }
    report.write_text(err).map_err(|e| e.to_string())
}

/// Run the CLI on `argv` (program name first) and return the exit code.
pub fn run<I, T, W, E>(argv: I, stdout: &mut W, stderr: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    W: Write,
    E: Write,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    let cfg = match load(&args) {
        Ok(c) => c,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let out = args.out.as_deref();

    let outcome: Result<i32, (i32, String)> = match &args.command {
        Command::Analyze { .. } => cmd_analyze(&cfg)
            .map_err(|e| (numeric_exit(&e), e.to_string()))
            .and_then(|r| emit_sweep(&r, out, stdout).map_err(|m| (EXIT_USAGE, m)))
            .map(|_| EXIT_OK),
        Command::Simulate { .. } => cmd_simulate(&cfg)
            .map_err(|e| (numeric_exit(&e), e.to_string()))
            .and_then(|r| emit_sweep(&r, out, stdout).map_err(|m| (EXIT_USAGE, m)))
            .map(|_| EXIT_OK),
        Command::Figure { name, .. } => cmd_figure(*name, &cfg)
            .map_err(|e| (numeric_exit(&e), e.to_string()))
            .and_then(|c| emit_curves(*name, &c, out, stdout).map_err(|m| (EXIT_USAGE, m)))
            .map(|_| EXIT_OK),
        Command::Validate { .. } => cmd_validate(&cfg)
            .map_err(|e| (numeric_exit(&e), e.to_string()))
            .and_then(|r| {
                emit_validation(&r, out, stdout, stderr).map_err(|m| (EXIT_USAGE, m))?;
                Ok(if r.disagreements() > 0 {
                    EXIT_VALIDATION
                } else if r.oracle_failures() > 0 {
                    EXIT_NUMERIC
                } else {
                    EXIT_OK
                })
            }),
    };
    match outcome {
        Ok(code) => code,
        Err((code, msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
    }
}
