//! Command-line front end: `solve`, `check` and `decompose`.
//!
//! Exit status is 0 on success, 1 for unreadable or malformed input and 2
//! when a solver fails.

pub mod spec;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use quatode::driver::{analyze, Strategy};
use quatode::phase::decompose;
use quatode::{Method, Quaternion, SolveReport};
use serde::Serialize;
use thiserror::Error;

pub use spec::{ProblemSpec, SpecError};

#[derive(Debug, Parser)]
#[command(
    name = "quatode",
    version,
    about = "Solve q'(t) = a(t) q(t) over the quaternions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a problem file and write the trajectory as CSV.
    Solve {
        file: PathBuf,
        /// Also integrate with RK4 and report the deviation.
        #[arg(long)]
        verify: bool,
        /// auto, commutative, special, picard or oracle.
        #[arg(long)]
        method: Option<Method>,
        /// Output grid spacing.
        #[arg(long)]
        step: Option<f64>,
        /// Tolerance of the structure tests.
        #[arg(long)]
        tol: Option<f64>,
        /// CSV destination; the JSON summary then goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report which closed forms apply without solving.
    Check { file: PathBuf },
    /// Phase angles of a unit quaternion.
    Decompose {
        #[arg(allow_negative_numbers = true)]
        w: f64,
        #[arg(allow_negative_numbers = true)]
        x: f64,
        #[arg(allow_negative_numbers = true)]
        y: f64,
        #[arg(allow_negative_numbers = true)]
        z: f64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Spec { path: PathBuf, source: SpecError },
    #[error("invalid input: {0}")]
    Input(quatode::Error),
    #[error("solver failed: {0}")]
    Solve(quatode::Error),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solve(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub strategy: String,
    pub segments: usize,
    pub picard_iterations: Vec<usize>,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_deviation: Option<f64>,
    pub wall_time_ms: f64,
}

impl From<&SolveReport> for Summary {
    fn from(r: &SolveReport) -> Self {
        Self {
            strategy: r.strategy.to_string(),
            segments: r.segments,
            picard_iterations: r.picard_iterations.clone(),
            max_residual: r.max_residual,
            oracle_deviation: r.oracle_deviation,
            wall_time_ms: r.wall_time_ms,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub proportional: bool,
    pub degenerate: bool,
    pub direction: [f64; 3],
    pub max_deviation: f64,
    pub special_case: Option<String>,
    /// What `method = auto` would use.
    pub strategy: String,
}

#[derive(Debug, Serialize)]
pub struct PhaseReport {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Trajectory as CSV: `t,q_w,q_x,q_y,q_z,norm,residual`, 17 significant
/// digits, residual blank where it is undefined.
pub fn trajectory_csv(report: &SolveReport) -> String {
    let traj = &report.trajectory;
    let mut out = String::from("t,q_w,q_x,q_y,q_z,norm,residual\n");
    for (k, (t, q)) in traj.times.iter().zip(&traj.states).enumerate() {
        let residual = report
            .residuals
            .get(k)
            .copied()
            .flatten()
            .map(num)
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            num(*t),
            num(q.w),
            num(q.x),
            num(q.y),
            num(q.z),
            num(q.norm()),
            residual
        );
    }
    out
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes") + "\n"
}

fn load_spec(path: &Path) -> Result<ProblemSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    ProblemSpec::parse(&text).map_err(|source| CliError::Spec {
        path: path.to_path_buf(),
        source,
    })
}

fn write_to(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(sink: &mut dyn Write, text: &str) -> Result<(), CliError> {
    sink.write_all(text.as_bytes())
        .map_err(|source| CliError::Write {
            path: PathBuf::from("-"),
            source,
        })
}

pub fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            file,
            verify,
            method,
            step,
            tol,
            out,
        } => {
            let spec = load_spec(&file)?;
            let mut problem = spec.to_problem();
            problem.verify = verify;
            if let Some(m) = method {
                problem.method = m;
            }
            if let Some(h) = step {
                problem.step = h;
            }
            if let Some(e) = tol {
                problem.tol = e;
            }
            problem.validate().map_err(CliError::Input)?;
            let report = quatode::solve(&problem).map_err(CliError::Solve)?;
            let csv = trajectory_csv(&report);
            let summary = json(&Summary::from(&report));
            match out.or(spec.output) {
                Some(path) => {
                    write_to(&path, &csv)?;
                    emit(stdout, &summary)
                }
                None => {
                    emit(stdout, &csv)?;
                    emit(stderr, &summary)
                }
            }
        }
        Command::Check { file } => {
            let problem = load_spec(&file)?.to_problem();
            let analysis = analyze(&problem).map_err(CliError::Solve)?;
            let prop = &analysis.proportionality;
            let strategy = if prop.is_proportional {
                Strategy::Commutative {
                    degenerate: prop.degenerate,
                }
            } else if let Some(sc) = analysis.special_case {
                Strategy::SpecialCase(sc.kind)
            } else {
                Strategy::Picard
            };
            let report = CheckReport {
                proportional: prop.is_proportional,
                degenerate: prop.degenerate,
                direction: [prop.direction.x, prop.direction.y, prop.direction.z],
                max_deviation: prop.max_deviation,
                special_case: analysis.special_case.map(|sc| sc.kind.label().to_string()),
                strategy: strategy.to_string(),
            };
            emit(stdout, &json(&report))
        }
        Command::Decompose { w, x, y, z } => {
            let p = decompose(Quaternion::new(w, x, y, z)).map_err(CliError::Input)?;
            emit(
                stdout,
                &json(&PhaseReport {
                    theta1: p.theta1,
                    theta2: p.theta2,
                    theta3: p.theta3,
                }),
            )
        }
    }
}

/// Parse `args` (including the program name), run, and return the exit
/// status. Diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
