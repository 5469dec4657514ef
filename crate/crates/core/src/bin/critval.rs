use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, out) = critval::cli::run(std::env::args_os());
    let _ = writeln!(std::io::stdout().lock(), "{out}");
    ExitCode::from(code as u8)
}
