//! `brier`: score prediction files, evaluate closed forms, run simulation
//! studies and render their figures.

mod error;
mod expect;
mod plot;
mod report;
mod score;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(
    name = "brier",
    version,
    about = "Brier score toolkit and simulation study runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    G,
    F,
    Shift,
    Perturb,
    Jensen,
    Clt,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    #[default]
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Paper,
    Misconceptions,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score a `p,y` pair file.
    Score {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Band around ȳ-ȳ² that triggers NEAR_REFERENCE.
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate closed-form expectations, differences and bounds.
    Expect {
        #[arg(long)]
        p1: Option<f64>,
        #[arg(long)]
        q1: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, value_enum, default_value = "plus")]
        direction: DirectionArg,
        /// Comma-separated prediction vector.
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
        /// Comma-separated true probability vector.
        #[arg(long, value_delimiter = ',')]
        q: Option<Vec<f64>>,
        /// Repeat scalar `--p1/--q1` to a vector of this length for `clt`.
        #[arg(long)]
        n: Option<usize>,
        /// Quantity to print; all computable ones when omitted.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Run a simulation study and persist per-scenario and summary CSVs.
    Simulate {
        /// TOML study config; defaults to the built-in preset.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "paper", conflicts_with = "config")]
        preset: Preset,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (1 = sequential); all cores when omitted.
        #[arg(long)]
        workers: Option<usize>,
        /// Override the replication count N.
        #[arg(long)]
        reps: Option<usize>,
        /// Only run these sample sizes (repeatable).
        #[arg(long = "n")]
        sample_sizes: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        quiet: bool,
    },
    /// Render a figure (SVG + CSV) from persisted results.
    Report {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        figure: u8,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Score {
            input,
            format,
            delta,
            out,
        } => score::run(&input, format, delta, out.as_deref()),
        Command::Expect {
            p1,
            q1,
            eps,
            direction,
            p,
            q,
            n,
            mode,
        } => expect::run(&expect::ExpectArgs {
            p1,
            q1,
            eps,
            direction,
            p,
            q,
            n,
            mode,
        }),
        Command::Simulate {
            config,
            preset,
            seed,
            workers,
            reps,
            sample_sizes,
            out,
            quiet,
        } => simulate::run(&simulate::SimulateArgs {
            config,
            preset,
            seed,
            workers,
            reps,
            sample_sizes,
            out,
            quiet,
        }),
        Command::Report {
            results,
            figure,
            out,
        } => report::run(&results, figure, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
