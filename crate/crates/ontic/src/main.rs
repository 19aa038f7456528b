use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ontic::run(std::env::args_os()))
}
