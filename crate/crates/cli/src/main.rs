use std::process::ExitCode;

fn main() -> ExitCode {
    rotor_scatter::main_with(std::env::args_os())
}
