//! `carleman`: analyze zero sets and matrices, run the check table over
//! seeded ensembles and tabulate empirical constants.

mod commands;
mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{CliError, Outcome};

#[derive(Parser, Debug)]
#[command(
    name = "carleman",
    version,
    about = "Carleman determinants and genus-one canonical products"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed of the instance generator.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Instances per check.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Comma-separated exponents; an empty string gives an empty list.
    #[arg(long, global = true, value_parser = parse_p_list)]
    pub p: Option<PList>,
    /// Tolerance overrides, `CHECK_ID=value,...`.
    #[arg(long, global = true, value_parser = parse_tolerances)]
    pub tol: Option<Tolerances>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Omit the timestamp so reports are byte-identical across runs.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PList(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(pub BTreeMap<String, f64>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Identities,
    Inequalities,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Growth functionals of the canonical product over a zero set.
    AnalyzeZeros {
        path: PathBuf,
        /// Also emit (r, log M(r)) and (t, log|Π(t)|) tables with this many rows.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Spectra, norms, determinant functionals and applicable checks of a matrix.
    AnalyzeMatrix { path: PathBuf },
    /// Run the check table over the default generators.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Force the named check to fail (exercises the failure path).
        #[arg(long, hide = true)]
        inject_failure: Option<String>,
    },
    /// Run one check over a generated ensemble.
    Ensemble {
        #[arg(long)]
        check: String,
        /// Generator spec such as `traceless:6` or `cartwright:1-40`.
        #[arg(long)]
        generator: Option<String>,
        /// Drop the per-instance records from the report.
        #[arg(long)]
        summary_only: bool,
    },
    /// Empirical constants of ratio checks as CSV.
    Constants {
        /// Comma-separated ratio checks.
        #[arg(long, default_value = "MATSAEV_RATIO,MATSAEV_G_RATIO")]
        checks: String,
        #[arg(long)]
        generator: Option<String>,
    },
}

fn parse_p_list(s: &str) -> Result<PList, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(PList(Vec::new()));
    }
    s.split(',')
        .map(|t| {
            let v: f64 = t.trim().parse().map_err(|e| format!("`{t}`: {e}"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("`{t}` is not finite"))
            }
        })
        .collect::<Result<_, _>>()
        .map(PList)
}

fn parse_tolerances(s: &str) -> Result<Tolerances, String> {
    let mut map = BTreeMap::new();
    for item in s.split(',').filter(|t| !t.trim().is_empty()) {
        let (id, v) = item
            .split_once('=')
            .ok_or_else(|| format!("`{item}` is not CHECK_ID=value"))?;
        let v: f64 = v.trim().parse().map_err(|e| format!("`{item}`: {e}"))?;
        map.insert(id.trim().to_string(), v);
    }
    Ok(Tolerances(map))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::AnalyzeZeros { path, samples } => commands::analyze_zeros(&cli.common, &path, samples),
        Command::AnalyzeMatrix { path } => commands::analyze_matrix(&cli.common, &path),
        Command::Verify { suite, inject_failure } => commands::verify(&cli.common, suite, inject_failure.as_deref()),
        Command::Ensemble {
            check,
            generator,
            summary_only,
        } => commands::ensemble(&cli.common, &check, generator.as_deref(), summary_only),
        Command::Constants { checks, generator } => commands::constants(&cli.common, &checks, generator.as_deref()),
    };
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailure(ids)) => {
            eprintln!("failing checks: {}", ids.join(", "));
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
