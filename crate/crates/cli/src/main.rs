use std::process::ExitCode;

fn main() -> ExitCode {
    snirkit_cli::run(std::env::args_os())
}
