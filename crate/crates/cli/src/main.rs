//! Batch front-end for phase portraits, measurement simulation,
//! tomographic reconstruction, and entanglement classification.
//!
//! Exit codes: 0 success, 2 parse or validation error (bad arguments,
//! malformed files, shape mismatches), 3 numerical-precondition error
//! (a matrix failing its invariants, zero-probability conditioning).

mod commands;
mod statefile;

use clap::{Parser, Subcommand};
use qportrait::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qportrait", version, about = "Qudit phase portraits and counter statistics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outcome probabilities against a counter bank, or a qubit theta sweep
    Portrait {
        /// State file (JSON)
        #[arg(long)]
        state: PathBuf,
        /// Measure along these axes, one of x/y/z per qubit
        #[arg(long)]
        axes: Option<String>,
        /// Sweep a dim-2 state over theta in [0, pi] with this many points
        #[arg(long)]
        sweep: Option<usize>,
        /// Copy the table to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a measurement series and tally outcome frequencies
    Measure {
        #[arg(long)]
        state: PathBuf,
        /// Counter axes; omitted means the state's own eigenbasis
        #[arg(long)]
        axes: Option<String>,
        #[arg(long)]
        shots: usize,
        #[arg(long)]
        seed: u64,
        /// Write the shot-by-shot record here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate a state from counter statistics over all axis settings
    Reconstruct {
        /// True state to simulate and then reconstruct
        #[arg(long)]
        state: Option<PathBuf>,
        /// Directory of measurement records, one file per axis setting
        #[arg(long)]
        records: Option<PathBuf>,
        #[arg(long)]
        shots: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Use analytic outcome distributions instead of sampling
        #[arg(long)]
        exact: bool,
        /// Clip negative eigenvalues and renormalize the estimate
        #[arg(long)]
        psd_repair: bool,
        /// Qubit layout `p=K` when the state file does not carry one
        #[arg(long)]
        layout: Option<String>,
        /// Write the estimated state (JSON) here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entanglement verdict of a qubit pair, or transform class of a unitary
    Classify {
        #[arg(long)]
        state: Option<PathBuf>,
        /// Unitary matrix file (same JSON shape as states)
        #[arg(long)]
        unitary: Option<PathBuf>,
        /// Bipartite layout `NLxNS` or qubit layout `p=K` for --unitary
        #[arg(long)]
        layout: Option<String>,
    },
    /// Reduction measure between two counter banks, with the entropy
    /// of the state measured against the second
    Reduction {
        #[arg(long)]
        state: PathBuf,
        /// Axes defining the source bank
        #[arg(long)]
        axes_a: String,
        /// Axes defining the target bank
        #[arg(long)]
        axes_b: String,
    },
}

/// Parse and shape problems exit with 2; violated numerical invariants
/// (the state not being a state, impossible conditioning) exit with 3.
fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::Parse { .. }
        | Error::LengthMismatch { .. }
        | Error::DimensionMismatch { .. }
        | Error::IndexOutOfRange { .. }
        | Error::EmptySubset
        | Error::ShotCountZero
        | Error::MissingSetting { .. }
        | Error::DuplicateSetting { .. } => 2,
        _ => 3,
    }
}

fn run(cli: Cli) -> qportrait::Result<String> {
    match cli.command {
        Command::Portrait { state, axes, sweep, out } => {
            commands::portrait(&state, axes.as_deref(), sweep, out.as_deref())
        }
        Command::Measure { state, axes, shots, seed, out } => {
            commands::measure(&state, axes.as_deref(), shots, seed, out.as_deref())
        }
        Command::Reconstruct { state, records, shots, seed, exact, psd_repair, layout, out } => {
            commands::reconstruct(
                state.as_deref(),
                records.as_deref(),
                shots,
                seed,
                exact,
                psd_repair,
                layout.as_deref(),
                out.as_deref(),
            )
        }
        Command::Classify { state, unitary, layout } => {
            commands::classify(state.as_deref(), unitary.as_deref(), layout.as_deref())
        }
        Command::Reduction { state, axes_a, axes_b } => {
            commands::reduction(&state, &axes_a, &axes_b)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(body) => {
            print!("{body}");
            ExitCode::SUCCESS
        }
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(exit_code_for(&error))
        }
    }
}
