//! Command-line front-end for `bc-canon`.
//!
//! `run_command` is the whole program minus process I/O: it parses an
//! argument vector, runs one subcommand and returns the report with its exit
//! code (0 success, 1 failed criterion, 2 input error, 3 numerical failure).

mod report;
mod selftest;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use bc_canon::io::{parse_matrix_file, write_matrix_file};
use bc_canon::matcore::{numerical_rank, row_space_angle, unitarity_residual};
use bc_canon::{
    canonical_decompose, check_self_adjoint, construct_from_w, even_canonical_decompose,
    generate_random_pair, BoundaryPair, ComplexMatrix, Error, OrderSpec, Tolerances,
};
use clap::{Parser, Subcommand};

pub use report::{format_report, Format, Metric, Report};
pub use selftest::run_selftest;

/// Environment variable holding default tolerance overrides.
pub const TOL_ENV: &str = "BC_CANON_TOL";

#[derive(Debug, Parser)]
#[command(name = "bc-canon", version, about = "Self-adjoint boundary-condition pairs (A:B)")]
pub struct Cli {
    /// Residual tolerance (sets residual_abs; overrides BC_CANON_TOL).
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test rank(A:B) = m and A C A* = B C B*.
    Check { a: PathBuf, b: PathBuf },
    /// Compute the canonical factorization.
    Canon {
        a: PathBuf,
        b: PathBuf,
        /// Directory for one JSON file per factor plus manifest.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a pair and report the rank offset.
    Classify { a: PathBuf, b: PathBuf },
    /// Write a random self-adjoint pair as A.json and B.json.
    Generate {
        /// Matrix size m (2n+1 or 2n).
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Target k in 0..=n: rank(A) = m - k for odd m, rank(S) = n - k for m = 2n.
        #[arg(long)]
        unit_cosines: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the invariant suite on random inputs.
    Selftest {
        #[arg(long, value_delimiter = ',', default_value = "3,5,7,9")]
        orders: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Failure = 1,
    InputError = 2,
    NumericalError = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

pub fn parse_args<I, T>(argv: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(argv)
}

/// Defaults, then `env` (a [`Tolerances`] override string), then `flag`.
pub fn resolve_tolerances(flag: Option<f64>, env: Option<&str>) -> bc_canon::Result<Tolerances> {
    let mut tol = Tolerances::default();
    if let Some(env) = env {
        tol = tol.with_overrides(env)?;
    }
    if let Some(v) = flag {
        tol.residual_abs = v;
    }
    tol.validate()?;
    Ok(tol)
}

fn error_status(err: &Error) -> ExitStatus {
    match err {
        Error::Parse(_)
        | Error::DimensionMismatch(_)
        | Error::NonFinite { .. }
        | Error::PartitionMismatch { .. }
        | Error::UnsupportedOrder { .. }
        | Error::OddSize { .. }
        | Error::InvalidTarget { .. }
        | Error::InvalidTolerance(_) => ExitStatus::InputError,
        Error::NotHermitian { .. }
        | Error::NotUnitary { .. }
        | Error::ConvergenceFailure(_)
        | Error::NotSelfAdjoint { .. }
        | Error::RankDeficient { .. }
        | Error::GenerationFailed { .. } => ExitStatus::NumericalError,
    }
}

fn error_report(command: &str, err: &Error) -> (Report, ExitStatus) {
    let mut report = Report::new(command);
    report.verdict = format!("error: {err}");
    (report, error_status(err))
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Check { .. } => "check",
        Command::Canon { .. } => "canon",
        Command::Classify { .. } => "classify",
        Command::Generate { .. } => "generate",
        Command::Selftest { .. } => "selftest",
    }
}

/// Parses `argv` (program name first) and runs it with tolerance overrides
/// from `BC_CANON_TOL`.
pub fn run_command<I, T>(argv: I) -> (Report, ExitStatus)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env = std::env::var(TOL_ENV).ok();
    run_command_with_env(argv, env.as_deref())
}

pub fn run_command_with_env<I, T>(argv: I, env_tol: Option<&str>) -> (Report, ExitStatus)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(argv) {
        Ok(cli) => run_cli(&cli, env_tol),
        Err(e) => {
            let mut report = Report::new("usage");
            report.verdict = format!("error: {}", e.kind());
            (report, ExitStatus::InputError)
        }
    }
}

pub fn run_cli(cli: &Cli, env_tol: Option<&str>) -> (Report, ExitStatus) {
    let name = command_name(&cli.command);
    let tol = match resolve_tolerances(cli.tol, env_tol) {
        Ok(t) => t,
        Err(e) => return error_report(name, &e),
    };
    let result = match &cli.command {
        Command::Check { a, b } => check(a, b, &tol),
        Command::Canon { a, b, out } => canon(a, b, out.as_deref(), &tol),
        Command::Classify { a, b } => classify(a, b, &tol),
        Command::Generate {
            order,
            seed,
            unit_cosines,
            out,
        } => generate(*order, *seed, *unit_cosines, out, &tol),
        Command::Selftest {
            orders,
            trials,
            seed,
        } => run_selftest(orders, *trials, *seed, &tol),
    };
    result.unwrap_or_else(|e| error_report(name, &e))
}

type Outcome = bc_canon::Result<(Report, ExitStatus)>;

fn load_pair(report: &mut Report, a: &Path, b: &Path) -> bc_canon::Result<BoundaryPair> {
    report.inputs = vec![a.display().to_string(), b.display().to_string()];
    BoundaryPair::new(parse_matrix_file(a)?, parse_matrix_file(b)?)
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Parse(format!("cannot write {}: {e}", path.display()))
}

fn check(a: &Path, b: &Path, tol: &Tolerances) -> Outcome {
    let mut report = Report::new("check");
    let pair = load_pair(&mut report, a, b)?;
    let rep = check_self_adjoint(&pair, tol)?;
    report.metric("m", pair.spec.m);
    report.metric("rank_AB", rep.rank_ab);
    report.metric("rank_A", rep.rank_a);
    report.metric("rank_B", rep.rank_b);
    report.metric("gram_residual", rep.gram_residual);
    Ok(if rep.is_self_adjoint() {
        report.verdict = "self-adjoint".into();
        (report, ExitStatus::Success)
    } else {
        report.verdict = "not self-adjoint".into();
        (report, ExitStatus::Failure)
    })
}

fn diag_column(values: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(values.len(), 1, |i, _| bc_canon::Complex64::new(values[i], 0.0))
}

fn write_factors(report: &mut Report, out: &Path) -> bc_canon::Result<()> {
    std::fs::create_dir_all(out).map_err(|e| io_error(out, e))?;
    let factors = report.factors.clone().unwrap_or_default();
    for (name, file) in &factors {
        let path = out.join(format!("{name}.json"));
        write_matrix_file(&path, &file.to_matrix()?).map_err(|e| io_error(&path, e))?;
        report.outputs.push(path.display().to_string());
    }
    let manifest = out.join("manifest.json");
    let mut shallow = report.clone();
    shallow.factors = None;
    shallow.outputs.push(manifest.display().to_string());
    std::fs::write(&manifest, format_report(&shallow, Format::Json)).map_err(|e| io_error(&manifest, e))?;
    report.outputs.push(manifest.display().to_string());
    Ok(())
}

fn canon(a: &Path, b: &Path, out: Option<&Path>, tol: &Tolerances) -> Outcome {
    let mut report = Report::new("canon");
    let pair = load_pair(&mut report, a, b)?;
    let spec = pair.spec;
    report.metric("m", spec.m);
    report.metric("n", spec.n);
    let residual = if spec.is_odd_order() {
        let form = canonical_decompose(&pair, tol)?;
        let rebuilt = form.reconstruct();
        let normal = construct_from_w(&form.w, &spec, tol)?.stacked();
        let residual = (&rebuilt - normal).norm();
        report.metric("rank_A", numerical_rank(&pair.a, tol)?);
        report.metric("rank_B", numerical_rank(&pair.b, tol)?);
        report.metric("predicted_rank_A", form.predicted_rank_a);
        report.metric("predicted_rank_B", form.predicted_rank_b);
        report.metric("null_count", form.null_count);
        report.metric("r", form.r);
        report.metric("reconstruction_residual", residual);
        report.metric("row_space_angle", row_space_angle(&rebuilt, &pair.stacked(), tol)?);
        report.metric("w_unitarity_residual", unitarity_residual(&form.w));
        for (name, m) in [
            ("Q1", &form.q1),
            ("Q2", &form.q2),
            ("Q3", &form.q3),
            ("Q4", &form.q4),
            ("core", &form.core),
            ("K", &form.k),
            ("W", &form.w),
        ] {
            report.factor(name, m);
        }
        report.factor("C_diag", &diag_column(&form.cs.cos));
        report.factor("S_diag", &diag_column(&form.cs.sin));
        report.verdict = form.classification.to_string();
        residual
    } else {
        let form = even_canonical_decompose(&pair, tol)?;
        let residual = (form.reconstruct() - pair.stacked()).norm();
        report.metric("rank_S", form.rank_s);
        report.metric("reconstruction_residual", residual);
        for (name, m) in [
            ("U", &form.u),
            ("V1", &form.v1),
            ("U1", &form.u1),
            ("U2", &form.u2),
            ("V2", &form.v2),
            ("Z", &form.z),
            ("W", &form.w),
            ("core", &form.core()),
        ] {
            report.factor(name, m);
        }
        report.factor("C_diag", &diag_column(&form.cos));
        report.factor("S_diag", &diag_column(&form.sin));
        report.verdict = form.classification.to_string();
        residual
    };
    if let Some(out) = out {
        write_factors(&mut report, out)?;
    }
    if residual > tol.residual_abs {
        report.verdict = format!("reconstruction residual {residual:e} exceeds tolerance");
        return Ok((report, ExitStatus::Failure));
    }
    Ok((report, ExitStatus::Success))
}

fn classify(a: &Path, b: &Path, tol: &Tolerances) -> Outcome {
    let mut report = Report::new("classify");
    let pair = load_pair(&mut report, a, b)?;
    let spec = pair.spec;
    report.metric("m", spec.m);
    report.metric("n", spec.n);
    report.metric("rank_A", numerical_rank(&pair.a, tol)?);
    report.metric("rank_B", numerical_rank(&pair.b, tol)?);
    if spec.is_odd_order() {
        let form = canonical_decompose(&pair, tol)?;
        report.metric("r", form.r);
        report.metric("null_count", form.null_count);
        report.verdict = form.classification.to_string();
    } else {
        let form = even_canonical_decompose(&pair, tol)?;
        report.metric("r", form.rank_s);
        report.metric("rank_S", form.rank_s);
        report.verdict = form.classification.to_string();
    }
    Ok((report, ExitStatus::Success))
}

fn generate(order: usize, seed: u64, unit_cosines: Option<usize>, out: &Path, tol: &Tolerances) -> Outcome {
    let mut report = Report::new("generate");
    let spec = OrderSpec::from_size(order)?;
    let pair = generate_random_pair(&spec, seed, unit_cosines)?;
    std::fs::create_dir_all(out).map_err(|e| io_error(out, e))?;
    for (name, m) in [("A.json", &pair.a), ("B.json", &pair.b)] {
        let path = out.join(name);
        write_matrix_file(&path, m).map_err(|e| io_error(&path, e))?;
        report.outputs.push(path.display().to_string());
    }
    let rep = check_self_adjoint(&pair, tol)?;
    report.metric("m", spec.m);
    report.metric("seed", Metric::Count(seed));
    report.metric("rank_A", rep.rank_a);
    report.metric("rank_B", rep.rank_b);
    report.metric("gram_residual", rep.gram_residual);
    if let Some(k) = unit_cosines {
        report.metric("unit_cosines", k);
    }
    report.verdict = "generated".into();
    Ok((report, ExitStatus::Success))
}
