//! Command-line driver for the engagement engine: batch labelling, model
//! training, evaluation, synthetic data, spec checking and a session server.

pub mod args;
pub mod commands;
pub mod error;
pub mod serve;

use std::io::Write;
use std::net::TcpListener;

pub use args::{Cli, Command};
pub use error::CliError;

/// Runs one parsed command, writing its report to `out`.
pub fn execute(cli: &Cli, out: &mut impl Write) -> Result<(), CliError> {
    let text = match &cli.command {
        Command::Run(a) => commands::run(a)?,
        Command::Train(a) => commands::train_cmd(a)?,
        Command::Eval(a) => commands::eval_cmd(a)?,
        Command::Synth(a) => commands::synth_cmd(a)?,
        Command::FstCheck(a) => commands::fst_check(a)?,
        Command::Serve(a) => {
            let engine = commands::load_engine(&a.engine)?;
            if !(a.jitter.is_finite() && a.jitter >= 0.0) {
                return Err(CliError::Validation(format!("--jitter {} must be non-negative", a.jitter)));
            }
            let listener = TcpListener::bind((a.host.as_str(), a.port))?;
            writeln!(out, "listening on {}", listener.local_addr()?)?;
            out.flush()?;
            let config = serve::SessionConfig {
                fps: a.fps,
                seed: a.seed,
                jitter_sigma_mm: a.jitter,
            };
            serve::serve(listener, engine, config)?;
            return Ok(());
        }
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}
