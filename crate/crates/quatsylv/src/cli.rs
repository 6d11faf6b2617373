//! Command-line front end.
//!
//! Exit codes: 0 success or consistent, 2 inconsistent or failed verification,
//! 3 input error (bad flags, unreadable or malformed files).

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::instances::{
    generate_consistent, load_fixture, solution_from_json, solution_to_json, spec_from_json, spec_to_json, FixtureId,
    ShapeProfile,
};
use crate::quat::EtaAxis;
use crate::sylvester::{self, ConsistencyReport, FreeParams, FreePolicy, SystemSpec, Tol, Variant};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONSISTENT: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

/// Environment variable consulted when a command needs a seed and none was given.
pub const SEED_ENV: &str = "QUATSYLV_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] crate::Error),

    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },

    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(name = "quatsylv", version, about = "Solve coupled two-sided Sylvester-like quaternion tensor equations")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Relative singular-value cutoff for every pseudo-inverse.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol_rank: f64,

    /// Relative threshold for consistency conditions.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_cond: f64,

    /// Free parameters: `zero`, `random:<seed>`, or `random` with the seed from QUATSYLV_SEED.
    #[arg(long, global = true, default_value = "zero")]
    pub free: String,

    /// Expected (check, solve, verify) or requested (generate) variant.
    #[arg(long, global = true)]
    pub variant: Option<Variant>,

    /// Axis of the η-Hermitian structure; only for the eta variant.
    #[arg(long, global = true)]
    pub eta: Option<EtaAxis>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Output file; standard output when absent.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every consistency condition of a spec.
    Check {
        /// Spec file, `-` for standard input.
        spec: PathBuf,
    },
    /// Solve a spec; writes the solution, or the report when inconsistent.
    Solve {
        /// Spec file, `-` for standard input.
        spec: PathBuf,
        /// Also write the consistency report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Substitute a solution into a spec and report the equation residuals.
    Verify {
        /// Spec file.
        spec: PathBuf,
        /// Solution file, `-` for standard input.
        solution: PathBuf,
    },
    /// Draw a consistent spec (to --output) and its ground-truth solution.
    Generate {
        /// Seed; falls back to QUATSYLV_SEED.
        #[arg(long)]
        seed: Option<u64>,
        /// Size of every mode.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Number of row modes (equal to the number of column modes).
        #[arg(long, default_value_t = 2)]
        modes: usize,
        /// Where to write the ground-truth solution.
        #[arg(long)]
        solution_out: Option<PathBuf>,
    },
    /// Materialize a bundled fixture and verify its listed solution.
    Example {
        #[arg(long)]
        id: FixtureId,
        /// Directory that receives spec.json and solution.json.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

/// Parses `args` and runs the command, printing diagnostics to standard error.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match run(&config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

/// Runs one command and returns its exit code; errors are input errors.
pub fn run(config: &RunConfig) -> Result<i32, CliError> {
    let c = &config.common;
    let tol = Tol::new(c.tol_rank, c.tol_cond)?;
    match &config.command {
        Command::Check { spec } => {
            let spec = read_spec(spec, c)?;
            let report = sylvester::check(&spec, &tol)?;
            emit_report(c, &report)?;
            if let Some(f) = report.first_failure() {
                eprintln!("inconsistent: condition {} ({}) failed at stage {}", f.condition_id, f.label, f.stage);
            }
            Ok(status(&report))
        }
        Command::Solve { spec, report: report_path } => {
            let spec = read_spec(spec, c)?;
            let fp = FreeParams::with_policy(free_policy(&c.free)?);
            let outcome = sylvester::solve(&spec, &fp, &tol)?;
            if let Some(p) = report_path {
                write_to(Some(p), &format_report(c.format, &outcome.report))?;
            }
            match outcome.solution {
                Some(sol) => {
                    write_to(c.output.as_deref(), &solution_to_json(&sol))?;
                    Ok(EXIT_OK)
                }
                None => {
                    eprintln!("{}", sylvester::inconsistent(&outcome.report));
                    if report_path.is_none() {
                        // the report takes the solution's place
                        emit_report(c, &outcome.report)?;
                    }
                    Ok(EXIT_INCONSISTENT)
                }
            }
        }
        Command::Verify { spec, solution } => {
            let spec = read_spec(spec, c)?;
            let sol = solution_from_json(&read_input(solution)?)?;
            let report = sylvester::verify(&spec, &sol, &tol)?;
            emit_report(c, &report)?;
            Ok(status(&report))
        }
        Command::Generate { seed, dim, modes, solution_out } => {
            let variant = c.variant.ok_or_else(|| CliError::Usage("generate needs --variant".into()))?;
            let seed = match seed {
                Some(s) => *s,
                None => env_seed()?,
            };
            let profile = ShapeProfile::uniform(variant, &vec![*dim; *modes])?;
            let (spec, truth) = generate_consistent(&profile, c.eta, seed)?;
            write_to(c.output.as_deref(), &spec_to_json(&spec))?;
            if let Some(p) = solution_out {
                write_to(Some(p), &solution_to_json(&truth))?;
            }
            Ok(EXIT_OK)
        }
        Command::Example { id, out_dir } => {
            let (spec, sol) = load_fixture(*id)?;
            if let Some(dir) = out_dir {
                fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
                write_to(Some(&dir.join("spec.json")), &spec_to_json(&spec))?;
                write_to(Some(&dir.join("solution.json")), &solution_to_json(&sol))?;
            }
            let report = sylvester::verify(&spec, &sol, &tol)?;
            emit_report(c, &report)?;
            Ok(status(&report))
        }
    }
}

fn status(report: &ConsistencyReport) -> i32 {
    if report.overall {
        EXIT_OK
    } else {
        EXIT_INCONSISTENT
    }
}

fn free_policy(s: &str) -> Result<FreePolicy, CliError> {
    if s == "random" {
        return Ok(FreePolicy::Random(env_seed()?));
    }
    Ok(s.parse()?)
}

fn env_seed() -> Result<u64, CliError> {
    let v = std::env::var(SEED_ENV).map_err(|_| CliError::Usage(format!("no seed given and {SEED_ENV} is not set")))?;
    v.trim().parse().map_err(|e| CliError::Usage(format!("{SEED_ENV}=`{v}` is not a u64: {e}")))
}

fn read_spec(path: &Path, c: &Common) -> Result<SystemSpec<f64>, CliError> {
    let spec = spec_from_json(&read_input(path)?)?;
    if let Some(v) = c.variant {
        if v != spec.variant {
            return Err(CliError::Usage(format!("--variant {v} but the spec is {}", spec.variant)));
        }
    }
    if let Some(axis) = c.eta {
        if spec.eta != Some(axis) {
            return Err(CliError::Usage(format!("--eta {axis} does not match the spec")));
        }
    }
    Ok(spec)
}

fn read_input(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| io_error(path, e))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn write_to(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_error(p, e)),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| io_error(Path::new("<stdout>"), e)),
    }
}

fn io_error(path: &Path, source: io::Error) -> CliError {
    CliError::Io { path: path.display().to_string(), source }
}

fn format_report(format: Format, report: &ConsistencyReport) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("report serialization") + "\n",
        Format::Text => report.to_text(),
    }
}

fn emit_report(c: &Common, report: &ConsistencyReport) -> Result<(), CliError> {
    write_to(c.output.as_deref(), &format_report(c.format, report))
}
