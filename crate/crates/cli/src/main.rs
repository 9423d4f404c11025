use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use picalc_cli::{dispatch, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let mut out = io::stdout().lock();
    let status = match dispatch(cli, &mut input, &mut out) {
        Ok(status) => status,
        Err(f) => {
            let _ = out.flush();
            eprintln!("error: {}", f.message);
            f.status
        }
    };
    let _ = out.flush();
    ExitCode::from(status as u8)
}
