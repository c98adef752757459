use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(infreg_cli::app::main_with(std::env::args_os()))
}
