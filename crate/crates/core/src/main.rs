use std::process::ExitCode;

fn main() -> ExitCode {
    vdatalog::cli::main()
}
