// SPDX-License-Identifier: Apache-2.0

//! The `fairfilt` command line. Flags are resolved into a [`RunConfig`]
//! (JSON file first, flags on top), the subcommand runs, and errors map to
//! exit codes: 1 usage, 2 data, 3 solver.

mod args;
mod commands;
mod config;
mod experiment;

pub use args::{Cli, Command, Flags};
pub use config::{Domain, RunConfig};
pub use experiment::{
    evaluate, report_on, run_paired, seed_labels, sweep, EvalSummary, Experiment, Learner,
    LearnerOptions, MetricSummary, PairedRun, Summary, SweepParameter, SweepRow,
};

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

use crate::error::{Error, Result};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

pub fn exit_code(err: &Error) -> i32 {
    if err.is_solver_error() {
        EXIT_SOLVER
    } else if matches!(err, Error::InvalidArgument(_)) {
        EXIT_USAGE
    } else {
        EXIT_DATA
    }
}

/// Runs one subcommand; returns the files written.
pub fn execute(command: &Command) -> Result<Vec<PathBuf>> {
    let cfg = command.to_config()?;
    match command {
        Command::Spectrum(_) => commands::spectrum(&cfg),
        Command::Design(_) => commands::design_cmd(&cfg),
        Command::Apply(_) => commands::apply(&cfg),
        Command::LabelProp(_) => commands::label_prop(&cfg),
        Command::TrainGcn(_) => commands::train_gcn_cmd(&cfg),
        Command::Eval(_) => commands::eval(&cfg),
        Command::Sweep(_) => commands::sweep_cmd(&cfg),
        Command::Effective(_) => commands::effective(&cfg),
        Command::SbmGen(_) => commands::sbm_gen(&cfg),
    }
}

/// Parses `args` (program name first), runs, prints written paths or the
/// error, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("fairfilt {}: {e}", cli.command.name());
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::InvalidArgument("x".into())), EXIT_USAGE);
        assert_eq!(exit_code(&Error::IsolatedNode(0)), EXIT_DATA);
        assert_eq!(
            exit_code(&Error::NonFiniteLoss {
                epoch: 0,
                loss: f64::NAN
            }),
            EXIT_SOLVER
        );
        assert_eq!(run(["fairfilt", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["fairfilt", "--help"]), 0);
        assert_eq!(run(["fairfilt", "spectrum"]), EXIT_USAGE);
    }
}
