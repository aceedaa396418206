use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = onelevel_core::cli::run(std::env::args_os(), &mut out);
    let _ = out.flush();
    ExitCode::from(code as u8)
}
