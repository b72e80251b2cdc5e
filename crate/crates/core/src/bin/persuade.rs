use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use persuasion_poa::cli::{exit_code_for, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            if cli.out.is_none() {
                let _ = std::io::stdout().write_all(out.json.as_bytes());
            }
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
