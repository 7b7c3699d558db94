use std::process::ExitCode;

use clap::Parser;
use qsc_cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.execute() {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            for path in &report.written {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qsc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
