//! `qphase` — command-line front end for the phase-estimation toolkit.
//!
//! Three subcommands: `simulate` (protocol Monte Carlo), `oracle`
//! (closed-form reference tables), `discriminate` (two-state
//! discrimination). All output is CSV with a `#` comment line first;
//! `--out` writes the CSV plus a JSON sidecar with the full configuration,
//! otherwise the CSV goes to stdout. Every random number derives from
//! `--seed`; reruns are byte-identical.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 I/O failure,
//! 4 all-divergent results (rows are still written).

mod args;
mod output;

use clap::Parser;
use std::process::ExitCode;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Ok(threads) = std::env::var("QPHASE_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            // A failure here means a pool already exists, which is fine.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }

    let outcome = match cli.command {
        Command::Simulate(a) => args::merge_simulate(a).and_then(output::run_simulate),
        Command::Oracle(a) => args::merge_oracle(a).and_then(output::run_oracle),
        Command::Discriminate(a) => args::merge_discriminate(a).and_then(output::run_discriminate),
    };

    match outcome {
        Ok(output::Status::Ok) => ExitCode::SUCCESS,
        Ok(output::Status::AllDivergent) => ExitCode::from(4),
        Err(e) => {
            eprintln!("qphase: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
