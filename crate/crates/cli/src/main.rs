use std::process::ExitCode;

use clap::Parser;
use wavecast::Exec;
use wavecast_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match wavecast_cli::run(&cli, Exec::default()) {
        Ok(outcome) if outcome.clean => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("wavecast: stream had lost packets or uncorrectable words");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("wavecast: {e:#}");
            ExitCode::FAILURE
        }
    }
}
