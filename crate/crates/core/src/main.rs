use std::io::Write;
use std::panic;
use std::process::ExitCode;

use dvest::cli::{self, Invocation, EXIT_INTERNAL};

fn main() -> ExitCode {
    let inv = panic::catch_unwind(|| cli::run(std::env::args_os())).unwrap_or_else(|_| Invocation {
        code: EXIT_INTERNAL,
        stdout: String::new(),
        stderr: "internal error\n".into(),
    });
    // Ignore write failures (e.g. a closed pipe); the exit code still tells.
    let _ = std::io::stdout().write_all(inv.stdout.as_bytes());
    let _ = std::io::stderr().write_all(inv.stderr.as_bytes());
    ExitCode::from(inv.code as u8)
}
