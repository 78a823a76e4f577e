use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use tsl_cli::{run, Cli, EXIT_BAD_INPUT};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);
    let text = serde_json::to_string_pretty(&outcome.json).expect("JSON values serialize");
    if let Some(msg) = outcome.json.get("error").and_then(|e| e.get("message")).and_then(|m| m.as_str()) {
        eprintln!("tsl {}: {msg}", cli.mode.name());
    }
    match cli.mode.out() {
        Some(path) => {
            if let Err(e) = fs::write(path, text + "\n") {
                eprintln!("tsl: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_BAD_INPUT as u8);
            }
        }
        None => {
            // a closed pipe (`tsl ... | head`) is not an error of the run
            if let Err(e) = writeln!(io::stdout().lock(), "{text}") {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("tsl: cannot write to stdout: {e}");
                    return ExitCode::from(EXIT_BAD_INPUT as u8);
                }
            }
        }
    }
    ExitCode::from(outcome.code as u8)
}
