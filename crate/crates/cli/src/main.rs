use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use nscs_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    for d in &report.diagnostics {
        eprintln!("{d}");
    }
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, &report.body).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().lock().write_all(report.body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if report.failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
