use std::process::ExitCode;

fn main() -> ExitCode {
    bugloc::cli::main()
}
