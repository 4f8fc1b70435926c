use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use riskmeas_cli::{run, CliError, ErrorEntry, RunConfig, EXIT_INPUT_ERROR, EXIT_OK};

fn emit(config: &RunConfig, text: &str) -> Result<(), CliError> {
    match &config.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io { path: path.clone(), message: e.to_string() }),
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let outcome = run(&config).and_then(|report| emit(&config, &report.to_json()));
    match outcome {
        Ok(()) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            let entry = ErrorEntry::from(&e);
            eprintln!("error: {e}");
            eprintln!("{}", serde_json::json!({ "error": entry }));
            ExitCode::from(EXIT_INPUT_ERROR as u8)
        }
    }
}
