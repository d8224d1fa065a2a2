use std::io::{ErrorKind, Write};
use std::process::ExitCode;

use anyhow::Context;

fn main() -> anyhow::Result<ExitCode> {
    let outcome = frontal::cli::run_command(std::env::args_os());
    match std::io::stdout().write_all(outcome.stdout.as_bytes()) {
        Err(e) if e.kind() == ErrorKind::BrokenPipe => {}
        r => r.context("writing to stdout")?,
    }
    eprint!("{}", outcome.stderr);
    Ok(ExitCode::from(outcome.code as u8))
}
