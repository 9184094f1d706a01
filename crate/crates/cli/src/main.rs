//! `kmrep`: Karlin–McGregor representations from the command line.
//!
//! Exit status: 0 on success, 1 on usage or input errors, 2 when `verify`
//! finds an error above its tolerance.

mod commands;
mod output;
mod select;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::output::Format;
use crate::select::ChainArgs;

#[derive(Parser, Debug)]
#[command(
    name = "kmrep",
    version,
    about = "Spectral representation of birth-death and block-tridiagonal chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Chain size, bandwidth, stochasticity and (finite scalar chains) spectrum.
    Info {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Entry (i, j) of the n-th power, or block (i, j) for block chains.
    Power {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Spectral value of an entry, with the power oracle and their difference.
    Km {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Largest spectral-vs-power error for steps 0..=n and indices 0..=index.
    Verify {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        index: usize,
        #[arg(long, default_value_t = commands::VERIFY_TOL)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Recurrence, return probability, expected return time and limits.
    Analyze {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long)]
        state: usize,
        /// Target state for the limit of the (state, j) entry; defaults to `state`.
        #[arg(long)]
        j: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo histogram at step n, against the exact power.
    Simulate {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        trajectories: u64,
        #[arg(long, default_value_t = 64)]
        horizon: usize,
        #[arg(long, default_value_t = 0)]
        state: usize,
        /// Histogram step; defaults to the horizon.
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Gram residuals of the polynomial sequence up to `index`.
    Orthogonality {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, default_value_t = 10)]
        index: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Info { chain, out } => commands::info(&chain, &out),
        Command::Power { chain, n, i, j, out } => commands::power(&chain, n, i, j, &out),
        Command::Km { chain, n, i, j, out } => commands::km(&chain, n, i, j, &out),
        Command::Verify {
            chain,
            n,
            index,
            tol,
            out,
        } => commands::verify(&chain, n, index, tol, &out),
        Command::Analyze { chain, state, j, out } => commands::analyze(&chain, state, j, &out),
        Command::Simulate {
            chain,
            seed,
            trajectories,
            horizon,
            state,
            n,
            out,
        } => commands::simulate(&chain, seed, trajectories, horizon, state, n, &out),
        Command::Orthogonality { chain, index, out } => commands::orthogonality(&chain, index, &out),
    };
    match result {
        Ok(commands::Outcome::Success) => ExitCode::SUCCESS,
        Ok(commands::Outcome::VerificationFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
