use std::process::ExitCode;

use clap::Parser;
use daia_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli, &mut std::io::stdout()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("daia: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
