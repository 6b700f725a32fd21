use std::process::ExitCode;

use clap::Parser;
use toroidal_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("TOROIDAL_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("toroidal: cannot configure thread pool: {e}");
                }
            }
            _ => {
                eprintln!("toroidal: TOROIDAL_THREADS must be a positive integer, got `{v}`");
                return ExitCode::from(1);
            }
        }
    }
    let exec = execute(&cli);
    for line in &exec.messages {
        eprintln!("{line}");
    }
    if !exec.report.is_empty() {
        match &cli.out {
            Some(path) => {
                if let Err(e) = std::fs::write(path, &exec.report) {
                    eprintln!("toroidal: {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            None => print!("{}", exec.report),
        }
    }
    ExitCode::from(exec.exit_code as u8)
}
