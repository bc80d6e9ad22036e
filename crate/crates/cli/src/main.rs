use std::process::ExitCode;

use aluthge_cli::args::Cli;
use aluthge_cli::error::INPUT_ERROR_CODE;
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { INPUT_ERROR_CODE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match aluthge_cli::run(&cli) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(INPUT_ERROR_CODE)
        }
    }
}
