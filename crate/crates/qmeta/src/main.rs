use std::process::ExitCode;

fn main() -> ExitCode {
    qmeta::cli::main_with(std::env::args_os())
}
