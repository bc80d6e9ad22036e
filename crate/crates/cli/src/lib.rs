//! Command-line layer over `aluthge-core`: matrix and experiment file
//! formats, one function per verb, and the acceptance suite.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
pub mod spec;
pub mod suite;

use args::{Cli, Command};
use error::{CliResult, Status};

pub fn run(cli: &Cli) -> CliResult<Status> {
    match &cli.command {
        Command::Gen(a) => commands::cmd_gen(a),
        Command::Iterate(a) => commands::cmd_iterate(a),
        Command::Spectrum(a) => commands::cmd_spectrum(a),
        Command::Radius(a) => commands::cmd_radius(a),
        Command::Split(a) => commands::cmd_split(a),
        Command::Continuity(a) => commands::cmd_continuity(a),
        Command::Sections(a) => commands::cmd_sections(a),
        Command::Suite(a) => commands::cmd_suite(a),
    }
}
