use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nsbf::commands::{self, CommandError};
use nsbf::config::{default_validation_source, ConfigError, PotentialSource, ProblemConfig, RawConfig};
use nsbf::problem::{parse_initial_vector, parse_lambda_list, Problem};

/// Solutions and spectra of the one-dimensional Dirac system via Neumann
/// series of Bessel functions.
#[derive(Parser)]
#[command(name = "nsbf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Problem configuration file (`key = value` lines).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override a configuration key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Print a machine-readable report instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Oracle {
    Mapping,
    None,
}

#[derive(Subcommand)]
enum Command {
    /// Build the coefficients K_n and report Goursat residuals.
    Kernel {
        #[command(flatten)]
        common: Common,
        /// Also build K_n from formal powers and report the difference.
        #[arg(long, value_enum, default_value = "none")]
        oracle: Oracle,
    },
    /// Solve initial-value problems Y(0) = c for a list of spectral parameters.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Comma-separated spectral parameters; complex values as `3+1i`.
        #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
        lambda: String,
        /// Initial vector `c1,c2`.
        #[arg(long, value_name = "C1,C2", default_value = "1,0", allow_hyphen_values = true)]
        c: String,
    },
    /// Eigenvalues of the boundary-value problem in [lambda_min, lambda_max].
    Spectrum {
        #[command(flatten)]
        common: Common,
    },
    /// Run the built-in property checks; exits with 1 when one fails.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

fn load_problem(common: &Common, fallback: Option<PotentialSource>) -> Result<Problem, ConfigError> {
    let mut raw = match &common.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    for assignment in &common.overrides {
        raw.set(assignment)?;
    }
    Problem::build(ProblemConfig::from_raw(&raw, fallback)?)
}

fn emit<T: Serialize + std::fmt::Display>(report: &T, json: bool) {
    let text = if json {
        serde_json::to_string_pretty(report).expect("reports serialise")
    } else {
        report.to_string()
    };
    // a closed pipe is not an error worth reporting
    let _ = writeln!(std::io::stdout().lock(), "{}", text.trim_end());
}

fn run(cli: Cli) -> Result<ExitCode, CommandError> {
    match cli.command {
        Command::Kernel { common, oracle } => {
            let problem = load_problem(&common, None)?;
            let report = commands::run_kernel(&problem, oracle == Oracle::Mapping)?;
            emit(&report, common.json);
        }
        Command::Solve { common, lambda, c } => {
            let problem = load_problem(&common, None)?;
            let lambdas = parse_lambda_list(&lambda)?;
            let c = parse_initial_vector(&c)?;
            let (report, coeffs) = commands::run_solve(&problem, &lambdas, c)?;
            eprintln!("{}", coeffs.timing_line());
            eprintln!(
                "solve: {} values of lambda in {:.3} s",
                lambdas.len(),
                report.solve_seconds
            );
            emit(&report, common.json);
        }
        Command::Spectrum { common } => {
            let problem = load_problem(&common, None)?;
            let (report, coeffs) = commands::run_spectrum(&problem)?;
            eprintln!("{}", coeffs.timing_line());
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            emit(&report, common.json);
        }
        Command::Validate { common } => {
            let problem = load_problem(&common, Some(default_validation_source()))?;
            let report = commands::run_validate(&problem)?;
            emit(&report, common.json);
            if !report.passed {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
