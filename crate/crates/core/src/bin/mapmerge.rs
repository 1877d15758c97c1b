use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = mapmerge::cli::main_with(std::env::args(), &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code)
}
