//! Command-line surface for discrimination-problem analysis.
//!
//! Exit codes: 0 success; 2 schema or validation failure (malformed
//! documents, invalid problems, bad sweep specs, bad flags); 3 numerical
//! failure (non-PD or non-unit-trace densities, non-convergence); 4
//! capability (exact search requested beyond its size cap).

mod report;
mod schema;
mod sweep;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qsd_core::discriminability::{discriminability, PermStrategy};
use qsd_core::matrix::HermitianMatrix;
use qsd_core::perm::is_permutation;
use qsd_core::problem::{random_problem, validate_problem};
use qsd_core::tolerances::{ASYM_TOL, MAX_EXACT_N, TOL_RANK};
use qsd_core::transform::inverse_parametrization;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn schema(message: String) -> Self {
        CliError { code: 2, message }
    }

    pub fn numerical(message: String) -> Self {
        CliError { code: 3, message }
    }

    /// Errors raised while reading or constructing inputs: exit 2.
    pub fn from_schema_err(e: qsd_core::Error) -> Self {
        CliError::schema(e.to_string())
    }

    /// Errors raised during computation: exit 3, except the exact-search
    /// size cap, which is a capability refusal (exit 4).
    pub fn from_compute_err(e: qsd_core::Error) -> Self {
        match e {
            qsd_core::Error::Capability { .. } => CliError { code: 4, message: e.to_string() },
            other => CliError::numerical(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "qsd",
    version,
    about = "Analyze pure-state discrimination problems through their density-matrix parametrization"
)]
struct Cli {
    /// Smallest admissible factorization pivot / Gram eigenvalue.
    #[arg(long, global = true, default_value_t = TOL_RANK)]
    tol_rank: f64,

    /// Permutation strategy: exact, sorted, or fixed:<comma-list>.
    #[arg(long, global = true, default_value = "exact")]
    perm: String,

    /// Largest N searched exhaustively under the exact strategy.
    #[arg(long, global = true, default_value_t = MAX_EXACT_N)]
    max_exact_n: usize,

    /// Output format. Defaults to json (sweep: csv).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Random generator seed (random subcommand).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a problem document against every invariant and report diagnostics.
    Validate {
        /// Problem JSON: exactly one of "states" or "gram", plus "priors".
        input: PathBuf,
    },
    /// Compute the discriminability report for a problem document.
    Analyze {
        /// Problem JSON: exactly one of "states" or "gram", plus "priors".
        input: PathBuf,
    },
    /// Evaluate a one-parameter family over a grid and emit a table.
    Sweep {
        #[arg(value_enum)]
        family: sweep::Family,
        /// First grid value (family default otherwise).
        #[arg(long)]
        start: Option<f64>,
        /// Last grid value (family default otherwise).
        #[arg(long)]
        stop: Option<f64>,
        /// Number of grid points, at least 2 (family default otherwise).
        #[arg(long)]
        steps: Option<usize>,
        /// Fixed first prior for two_state_gamma (default 0.5).
        #[arg(long)]
        eta1: Option<f64>,
        /// Overlap values for two_state_eta (default 0.5,0.75,0.9).
        #[arg(long, value_delimiter = ',')]
        gammas: Option<Vec<f64>>,
        /// First family angle for three_state_theta (default pi/3).
        #[arg(long)]
        alpha: Option<f64>,
        /// Second family angle for three_state_theta (default pi/4).
        #[arg(long)]
        phi: Option<f64>,
        /// Write the table to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover the discrimination problem encoded by a density matrix.
    Invert {
        /// Density JSON: {"rho": N x N array of [re, im] pairs}.
        input: PathBuf,
    },
    /// Generate a seeded random problem and analyze it.
    Random {
        /// Number of states (at least 2).
        #[arg(long)]
        n: usize,
        /// Ambient dimension (at least n).
        #[arg(long)]
        d: usize,
    },
}

fn parse_perm(spec: &str, max_n: usize) -> Result<PermStrategy, CliError> {
    match spec {
        "exact" => Ok(PermStrategy::Exact { max_n }),
        "sorted" => Ok(PermStrategy::SortedHeuristic),
        other => match other.strip_prefix("fixed:") {
            Some(list) => {
                let p = list
                    .split(',')
                    .map(|t| t.trim().parse::<usize>())
                    .collect::<Result<Vec<usize>, _>>()
                    .map_err(|_| CliError::schema(format!("cannot parse a permutation from \"{list}\"")))?;
                if !is_permutation(&p) {
                    return Err(CliError::schema(format!(
                        "{p:?} is not a permutation of 0..{}",
                        p.len()
                    )));
                }
                Ok(PermStrategy::Fixed(p))
            }
            None => Err(CliError::schema(format!(
                "unknown permutation strategy \"{other}\"; use exact, sorted, or fixed:<comma-list>"
            ))),
        },
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::schema(format!("cannot read {}: {e}", path.display())))
}

fn require_json_format(format: Option<Format>, cmd: &str) -> Result<(), CliError> {
    match format {
        Some(Format::Csv) => Err(CliError::schema(format!("csv output is not supported for {cmd}"))),
        _ => Ok(()),
    }
}

/// Write to stdout without panicking when the reader has gone away; a closed
/// pipe (e.g. piping into `head`) ends the program quietly with success.
fn emit(text: &str) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(CliError::numerical(format!("cannot write to stdout: {e}"))),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report serialization cannot fail");
    text.push('\n');
    emit(&text)
}

fn validated_problem(text: &str, tol_rank: f64) -> Result<qsd_core::problem::DiscriminationProblem, CliError> {
    let problem = schema::parse_problem_document(text)?;
    let v = validate_problem(&problem, tol_rank);
    if !v.is_valid() {
        return Err(CliError::schema(format!(
            "problem failed validation: {}",
            v.violations.join("; ")
        )));
    }
    Ok(problem)
}

fn cmd_validate(input: &Path, cli: &Cli) -> Result<(), CliError> {
    require_json_format(cli.format, "validate")?;
    let text = read_input(input)?;
    let problem = schema::parse_problem_document(&text)?;
    let v = validate_problem(&problem, cli.tol_rank);
    print_json(&report::validation_to_json(&v))?;
    if !v.is_valid() {
        return Err(CliError::schema(format!(
            "problem failed validation: {}",
            v.violations.join("; ")
        )));
    }
    Ok(())
}

fn cmd_analyze(input: &Path, cli: &Cli) -> Result<(), CliError> {
    require_json_format(cli.format, "analyze")?;
    let text = read_input(input)?;
    let problem = validated_problem(&text, cli.tol_rank)?;
    let strategy = parse_perm(&cli.perm, cli.max_exact_n)?;
    let result = discriminability(&problem, &strategy, cli.tol_rank).map_err(CliError::from_compute_err)?;
    print_json(&report::build_report(&problem, &result, &strategy, cli.tol_rank)?)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    family: sweep::Family,
    args: &sweep::SweepArgs,
    out: Option<&Path>,
    cli: &Cli,
) -> Result<(), CliError> {
    let table = sweep::run_sweep(family, args, cli.tol_rank)?;
    let rendered = match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&table.to_json())
                .expect("table serialization cannot fail");
            s.push('\n');
            s
        }
    };
    match out {
        Some(path) => fs::write(path, rendered)
            .map_err(|e| CliError::numerical(format!("cannot write {}: {e}", path.display()))),
        None => emit(&rendered),
    }
}

fn cmd_invert(input: &Path, cli: &Cli) -> Result<(), CliError> {
    require_json_format(cli.format, "invert")?;
    let text = read_input(input)?;
    let m = schema::parse_rho_document(&text)?;
    let h = HermitianMatrix::new_checked(m, ASYM_TOL).map_err(CliError::from_compute_err)?;
    let problem = inverse_parametrization(&h, cli.tol_rank).map_err(CliError::from_compute_err)?;
    print_json(&schema::problem_to_json(&problem))?;
    Ok(())
}

#[derive(Serialize)]
struct RandomOutput {
    problem: schema::ProblemJson,
    report: report::ReportJson,
}

fn cmd_random(n: usize, d: usize, cli: &Cli) -> Result<(), CliError> {
    require_json_format(cli.format, "random")?;
    let problem = random_problem(n, d, cli.seed).map_err(|e| match e {
        qsd_core::Error::InvalidDomain { .. } => CliError::from_schema_err(e),
        other => CliError::from_compute_err(other),
    })?;
    let strategy = parse_perm(&cli.perm, cli.max_exact_n)?;
    let result = discriminability(&problem, &strategy, cli.tol_rank).map_err(CliError::from_compute_err)?;
    let report = report::build_report(&problem, &result, &strategy, cli.tol_rank)?;
    print_json(&RandomOutput { problem: schema::problem_to_json(&problem), report })?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Validate { input } => cmd_validate(input, cli),
        Command::Analyze { input } => cmd_analyze(input, cli),
        Command::Sweep { family, start, stop, steps, eta1, gammas, alpha, phi, out } => {
            let args = sweep::SweepArgs {
                start: *start,
                stop: *stop,
                steps: *steps,
                eta1: *eta1,
                gammas: gammas.clone(),
                alpha: *alpha,
                phi: *phi,
            };
            cmd_sweep(*family, &args, out.as_deref(), cli)
        }
        Command::Invert { input } => cmd_invert(input, cli),
        Command::Random { n, d } => cmd_random(*n, *d, cli),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
