use std::process::ExitCode;

fn main() -> ExitCode {
    partsearch::cli::run()
}
