use std::process::ExitCode;

use clap::Parser;
use geoprobe::report::cli::{run, Cli, Outcome};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Single(out)) => {
            for f in &out.files {
                println!("{f}");
            }
            ExitCode::SUCCESS
        }
        Ok(Outcome::Report(manifest)) => {
            for out in &manifest.outputs {
                println!("{}: {}", out.command, out.files.join(", "));
            }
            for s in &manifest.skipped {
                println!("skipped {}: {}", s.command, s.reason);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("geoprobe: {e}");
            ExitCode::FAILURE
        }
    }
}
