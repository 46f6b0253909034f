use std::process::ExitCode;

use clap::Parser;
use rdmgeom_cli::{run, RunConfig, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&config) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            for failure in &outcome.failures {
                eprintln!("failed: {failure}");
            }
            ExitCode::from(if outcome.failures.is_empty() { EXIT_OK } else { EXIT_FAILURE })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
