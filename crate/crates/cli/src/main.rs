use std::process::ExitCode;

fn main() -> ExitCode {
    ginisplit_cli::app::main_entry()
}
