use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sympbr::cli::{cmd_compute, cmd_oracle, cmd_search, cmd_verify, Outcome, SearchArgs};

#[derive(Parser, Debug)]
#[command(name = "sympbr", version, about = "Symplectic Berry-Robbins determinant and conjecture search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate D (and optionally the flag map) for a configuration file.
    Compute {
        input: PathBuf,
        /// Wall tolerance relative to the RMS point norm.
        #[arg(long)]
        tol: Option<f64>,
        /// Also report unitarity and pairing residuals of the flag map.
        #[arg(long)]
        flag_map: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized invariance checks on a configuration file.
    Verify {
        input: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo survey of D over random configurations.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// gaussian | sphere | shell:RMIN:RMAX
        #[arg(long, default_value = "gaussian")]
        distribution: String,
        /// Run the minimizer from the lowest samples.
        #[arg(long)]
        minimize: bool,
        /// Report path; the per-sample CSV goes next to it with a .csv extension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form D for two points with ratio r and angle theta.
    Oracle {
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome: Outcome = match cli.command {
        Command::Compute { input, tol, flag_map, out } => cmd_compute(&input, tol, flag_map, out.as_deref()),
        Command::Verify { input, tol, trials, seed, out } => cmd_verify(&input, tol, trials, seed, out.as_deref()),
        Command::Search { n, count, seed, distribution, minimize, out } => {
            cmd_search(&SearchArgs { n, count, seed, distribution, minimize, out })
        }
        Command::Oracle { r, theta } => cmd_oracle(r, theta),
    };
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    ExitCode::from(outcome.code as u8)
}
