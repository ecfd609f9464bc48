//! Command-line front end for the `wavecast` codec.

pub mod args;
pub mod commands;
pub mod report;

use anyhow::Result;
use wavecast::Exec;

use args::{Cli, Command};
use commands::Outcome;

/// Runs one parsed invocation.
pub fn run(cli: &Cli, exec: Exec) -> Result<Outcome> {
    match &cli.command {
        Command::Transform(a) => commands::cmd_transform(a, exec),
        Command::Roundtrip(a) => commands::cmd_roundtrip(a, exec),
        Command::Send(a) => commands::cmd_send(a, exec),
        Command::Corrupt(a) => commands::cmd_corrupt(a),
        Command::Receive(a) => commands::cmd_receive(a, exec),
    }
}
