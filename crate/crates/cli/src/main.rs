use std::io;
use std::process::ExitCode;

use clap::Parser;

use reqmine_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli, &mut io::stderr()) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("reqmine: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
