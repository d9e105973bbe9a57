use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rlab_cli::commands::{cmd_expmap, cmd_oracle, cmd_symbol};
use rlab_cli::config::load_config;
use rlab_cli::report::{Failure, Report};
use rlab_cli::selftest::cmd_selftest;

/// Hilbert symbols, norm tests and exponential maps over p-adic towers.
#[derive(Parser)]
#[command(name = "rlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hilbert symbol (alpha, beta) via Sen's formula.
    Symbol {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        /// Pair into mu_{p^k} instead of mu_{p^n}.
        #[arg(long = "n")]
        level: Option<u32>,
    },
    /// Decide whether alpha is a norm from K(beta^(1/p)).
    Oracle {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
    },
    /// Run seeded property suites.
    Selftest {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Symbol of exp_eta applied to sum a db/b.
    Expmap {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, default_value = "p", allow_hyphen_values = true)]
        eta: String,
        /// A form term "a, b"; repeat for sums.
        #[arg(long = "term", allow_hyphen_values = true)]
        terms: Vec<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Symbol { .. } => "symbol",
            Command::Oracle { .. } => "oracle",
            Command::Selftest { .. } => "selftest",
            Command::Expmap { .. } => "expmap",
        }
    }

    fn field(&self) -> &PathBuf {
        match self {
            Command::Symbol { field, .. }
            | Command::Oracle { field, .. }
            | Command::Selftest { field, .. }
            | Command::Expmap { field, .. } => field,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = cli.command;
    let desc = match load_config(cmd.field()) {
        Ok(d) => d,
        Err(e) => {
            let f = Failure::from(e);
            eprintln!("rlab {}: {}", cmd.name(), f.message());
            println!("{}", Report::failure(cmd.name(), serde_json::Value::Null, None, &f).to_json());
            return ExitCode::from(f.exit_code() as u8);
        }
    };
    let outcome = match &cmd {
        Command::Symbol { alpha, beta, level, .. } => cmd_symbol(&desc, alpha, beta, *level),
        Command::Oracle { alpha, beta, .. } => cmd_oracle(&desc, alpha, beta),
        Command::Selftest { suite, seed, samples, .. } => cmd_selftest(&desc, suite, *seed, *samples),
        Command::Expmap { eta, terms, .. } => cmd_expmap(&desc, eta, terms),
    };
    if let Some(err) = &outcome.report.error {
        eprintln!("rlab {}: {} error: {}", cmd.name(), err.kind, err.message);
    } else if outcome.exit != 0 {
        eprintln!("rlab {}: {}", cmd.name(), outcome.report.status);
    }
    println!("{}", outcome.report.to_json());
    ExitCode::from(outcome.exit as u8)
}
