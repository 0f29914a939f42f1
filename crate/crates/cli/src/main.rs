use std::process::ExitCode;

use clap::Parser;
use sedac_cli::{emit, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli).and_then(|out| emit(&cli, &out).map(|_| out)) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("sedac: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.check && !out.violations.is_empty() {
        for v in &out.violations {
            eprintln!("violation: {v}");
        }
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
