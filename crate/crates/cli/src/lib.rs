//! The `krorder` command line: argument parsing, input files, JSON outputs
//! and run manifests. [`dispatch`] does all the work and returns the exit
//! code with the text for stdout, so it can be driven in-process.

pub mod input;
pub mod output;

mod commands;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use krorder::tolerance::{set_tolerances, tolerances, Tolerances};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::input::Loader;
use crate::output::{ErrorOut, InputDigest, RunManifest};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    UnknownCommand(String),
    #[error("{0}")]
    MalformedInput(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] krorder::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::UnknownCommand(_) => "UnknownCommand",
            CliError::MalformedInput(_) => "MalformedInput",
            CliError::Io(_) => "Io",
            CliError::Core(e) => e.kind(),
        }
    }

    /// 2 for a numerical breakdown, 1 for anything wrong with the input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(krorder::Error::NumericalBreakdown(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "krorder", version, about = "Lipschitz multi-utility preorders on finite metric spaces")]
pub struct Cli {
    /// Seed for every randomized command.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// JSON file overriding fields of the tolerance record.
    #[arg(long, global = true)]
    pub tol_file: Option<PathBuf>,
    /// Write a run manifest to this path.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a space file (and its order, if it has one).
    Validate { space: PathBuf },
    /// Wasserstein-1 distance with the optimal plan and potential.
    W1 { space: PathBuf, p: PathBuf, q: PathBuf },
    /// KR norm of a zero-mass signed measure, by transport and by LP.
    Krnorm { space: PathBuf, mu: PathBuf },
    /// Compare two lotteries under a utility family.
    Compare { space: PathBuf, family: PathBuf, p: PathBuf, q: PathBuf },
    /// Lipschitz margin of a failed comparison `q ≿ p`.
    Margin { space: PathBuf, family: PathBuf, p: PathBuf, q: PathBuf },
    /// Randomized check of the mixture-persistence axiom.
    Certify {
        space: PathBuf,
        family: PathBuf,
        p: PathBuf,
        q: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Separating 1-Lipschitz witness for `p - q` against a cone.
    Witness { space: PathBuf, cone: PathBuf, p: PathBuf, q: PathBuf },
    /// Whether `p - q` lies in a cone.
    Membership { space: PathBuf, cone: PathBuf, p: PathBuf, q: PathBuf },
    /// Utility family representing a cone on a panel of pairs.
    Represent { space: PathBuf, cone: PathBuf, panel: PathBuf },
    /// Stochastic dominance, univariate or over a poset.
    Dominance {
        space: PathBuf,
        p: PathBuf,
        q: PathBuf,
        #[arg(long)]
        poset: Option<PathBuf>,
    },
    /// Maximal elements of a menu and their scalarization bounds.
    Maxset { space: PathBuf, family: PathBuf, menu: PathBuf },
    /// Mixture test of an oracle preference against probe lotteries.
    Affinecore {
        space: PathBuf,
        oracle: PathBuf,
        p: PathBuf,
        q: PathBuf,
        #[arg(long)]
        menu: Option<PathBuf>,
    },
    /// Prior and base utilities of a rank-one state family.
    Prior {
        space: PathBuf,
        family: PathBuf,
        #[arg(long)]
        act: Option<PathBuf>,
    },
    /// Expected-utility portfolio under a budget.
    Portfolio {
        scenario: PathBuf,
        utility: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        prices: Vec<f64>,
        #[arg(long)]
        wealth: f64,
        /// Per-asset bounds, `lo,hi` repeated once per asset.
        #[arg(long = "box", value_delimiter = ',', allow_hyphen_values = true)]
        bounds: Option<Vec<f64>>,
        #[arg(long, default_value_t = 10_000)]
        iterations: usize,
    },
    /// Run the acceptance criteria.
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::W1 { .. } => "w1",
            Command::Krnorm { .. } => "krnorm",
            Command::Compare { .. } => "compare",
            Command::Margin { .. } => "margin",
            Command::Certify { .. } => "certify",
            Command::Witness { .. } => "witness",
            Command::Membership { .. } => "membership",
            Command::Represent { .. } => "represent",
            Command::Dominance { .. } => "dominance",
            Command::Maxset { .. } => "maxset",
            Command::Affinecore { .. } => "affinecore",
            Command::Prior { .. } => "prior",
            Command::Portfolio { .. } => "portfolio",
            Command::Selftest => "selftest",
        }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

fn error_outcome(e: &CliError) -> Outcome {
    Outcome {
        code: e.exit_code(),
        stdout: to_json(&ErrorOut {
            error: e.kind().to_string(),
            message: e.to_string(),
        }),
    }
}

/// Parse `argv` (program name first), run the command, and render stdout.
pub fn dispatch<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: e.to_string(),
                },
                ErrorKind::InvalidSubcommand | ErrorKind::MissingSubcommand => {
                    error_outcome(&CliError::UnknownCommand(e.to_string().trim().to_string()))
                }
                _ => error_outcome(&CliError::MalformedInput(e.to_string().trim().to_string())),
            };
        }
    };
    match run(&cli, &argv) {
        Ok(o) => o,
        Err(e) => error_outcome(&e),
    }
}

fn run(cli: &Cli, argv: &[String]) -> Result<Outcome, CliError> {
    let loader = Loader::default();
    if let Some(path) = &cli.tol_file {
        let t: Tolerances = loader.json(path)?;
        set_tolerances(t);
    }
    let stdout = commands::execute(&cli.command, cli.seed, &loader)?;
    if let Some(path) = &cli.manifest {
        let manifest = RunManifest {
            command: cli.command.name().to_string(),
            arguments: argv.iter().skip(1).cloned().collect(),
            inputs: loader
                .inputs()
                .into_iter()
                .map(|(path, sha256)| InputDigest { path, sha256 })
                .collect(),
            tolerances: serde_json::to_value(tolerances()).expect("tolerances serialize"),
            seed: cli.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            output_sha256: hex::encode(Sha256::digest(stdout.as_bytes())),
        };
        std::fs::write(path, to_json(&manifest))
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(Outcome { code: 0, stdout })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_class() {
        let breakdown = CliError::Core(krorder::Error::NumericalBreakdown("x".into()));
        assert_eq!(breakdown.exit_code(), 2);
        assert_eq!(breakdown.kind(), "NumericalBreakdown");
        assert_eq!(CliError::MalformedInput("x".into()).exit_code(), 1);
        assert_eq!(CliError::Core(krorder::Error::TriangleViolation { i: 0, j: 1, k: 2 }).exit_code(), 1);
    }

    #[test]
    fn help_exits_zero() {
        let o = dispatch(["krorder", "--help"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.contains("selftest"));
    }
}
