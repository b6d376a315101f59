use std::process::ExitCode;

fn main() -> ExitCode {
    lemon_cli::main_with(std::env::args_os())
}
