use std::process::ExitCode;

use clap::Parser;
use qslice_cli::args::Cli;
use qslice_cli::{run, EXIT_FAIL, EXIT_INTERNAL, EXIT_INPUT, EXIT_PASS};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INPUT as u8),
            };
        }
    };
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("qslice: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = report.to_json();
    match &cli.global.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("qslice: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_INTERNAL as u8);
            }
        }
        None => print!("{text}"),
    }
    let code = if report.all_pass() { EXIT_PASS } else { EXIT_FAIL };
    ExitCode::from(code as u8)
}
