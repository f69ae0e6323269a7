use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::init();
    rfclt_cli::main_entry()
}
