mod args;
mod commands;
mod failure;
mod output;
mod svg;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use failure::{exit, Failure};
use output::Run;

fn parameters(cmd: &Command) -> serde_json::Value {
    let v = match cmd {
        Command::Reduce(a) => serde_json::to_value(a),
        Command::BoSweep(a) => serde_json::to_value(a),
        Command::Compare(a) => serde_json::to_value(a),
        Command::Spectrum(a) => serde_json::to_value(a),
        Command::Dynamics(a) => serde_json::to_value(a),
        Command::Foster(a) => serde_json::to_value(a),
    };
    v.expect("arguments serialize")
}

fn dispatch(cmd: &Command, run: &mut Run) -> Result<(), Failure> {
    match cmd {
        Command::Reduce(a) => commands::reduce::run(a, run),
        Command::BoSweep(a) => commands::bo_sweep::run(a, run),
        Command::Compare(a) => commands::compare::run(a, run),
        Command::Spectrum(a) => commands::spectrum::run(a, run),
        Command::Dynamics(a) => commands::dynamics::run(a, run),
        Command::Foster(a) => commands::foster::run(a, run),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap would exit with 2, which is reserved for regime refusals.
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { exit::OK as u8 });
        }
    };
    if cli.common.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.common.jobs)
            .build_global()
        {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    let mut run = Run::new(cli.command.name(), parameters(&cli.command), &cli.common.out);
    let outcome = dispatch(&cli.command, &mut run);
    // Outputs written before a refusal still get their manifest.
    let finished = run.finish();
    let code = match (outcome, finished) {
        (Ok(()), Ok(_)) => exit::OK,
        (Err(f), _) | (Ok(()), Err(f)) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
