use std::process::ExitCode;

use clap::Parser;

use garnet_cli::{exit, render_report, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);
    print!("{}", outcome.summary);
    if let Some(path) = &cli.command.job().output {
        if let Err(e) = std::fs::write(path, render_report(&outcome.report)) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(exit::VALIDATION as u8);
        }
    }
    ExitCode::from(outcome.code as u8)
}
