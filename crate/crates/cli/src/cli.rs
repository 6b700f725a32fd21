//! Command-line arguments and process-level execution.

use std::fs;
use std::path::PathBuf;

use clap::Parser;

use crate::golden;
use crate::run::{run_text, Command, Options};

/// Exact computations on toroidal groups given by period matrices.
///
/// Reports are JSON on stdout (or `--out`). Exit status: 0 when a verdict was
/// computed, 1 for input errors or golden mismatches, 2 when an internal
/// consistency check failed. The thread count is read from TOROIDAL_THREADS.
#[derive(Clone, Debug, PartialEq, Eq, Parser)]
#[command(name = "toroidal", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Input `.tor` file; `-` reads stdin. Not used by `golden`.
    pub file: Option<PathBuf>,
    /// Height bound for searches and sweeps.
    #[arg(long)]
    pub height: Option<u32>,
    /// Complex dimension for `subtori`.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Witness declaration used for sign checks.
    #[arg(long)]
    pub witness: Option<String>,
    /// Period matrix to use (default: the first one).
    #[arg(long)]
    pub matrix: Option<String>,
    /// Hermitian form to use (default: the first one).
    #[arg(long)]
    pub form: Option<String>,
    /// Subspace declaration (default: the maximal complex subspace, or the
    /// first declared subspace for `isogeny-order`).
    #[arg(long)]
    pub subspace: Option<String>,
    /// Vector declaration giving a line direction for `line-intersect`.
    #[arg(long)]
    pub vector: Option<String>,
    /// Matrix giving the analytic representation for `endo`.
    #[arg(long)]
    pub map: Option<String>,
    /// Matrix to compare with the subgroup's period matrix.
    #[arg(long)]
    pub compare: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Scenario directory for `golden`.
    #[arg(long)]
    pub dir: Option<PathBuf>,
    /// Rewrite the blessed reports instead of comparing.
    #[arg(long)]
    pub bless: bool,
}

impl Cli {
    pub fn options(&self) -> Options {
        Options {
            height: self.height,
            dim: self.dim,
            witness: self.witness.clone(),
            matrix: self.matrix.clone(),
            form: self.form.clone(),
            subspace: self.subspace.clone(),
            vector: self.vector.clone(),
            map: self.map.clone(),
            compare: self.compare.clone(),
        }
    }
}

/// Rendered report, human-readable lines for stderr, and exit code.
pub struct Execution {
    pub report: String,
    pub messages: Vec<String>,
    pub exit_code: i32,
}

fn read_input(file: &Option<PathBuf>) -> Result<String, String> {
    match file {
        None => Err("missing input file".into()),
        Some(p) if p.as_os_str() == "-" => std::io::read_to_string(std::io::stdin()).map_err(|e| format!("stdin: {e}")),
        Some(p) => fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display())),
    }
}

pub fn execute(cli: &Cli) -> Execution {
    if cli.command == Command::Golden {
        let dir = cli.dir.clone().unwrap_or_else(golden::default_dir);
        if cli.bless {
            return match golden::bless(&dir) {
                Ok(n) => Execution {
                    report: String::new(),
                    messages: vec![format!("blessed {n} scenarios in {}", dir.display())],
                    exit_code: 0,
                },
                Err(e) => Execution { report: String::new(), messages: vec![e], exit_code: 1 },
            };
        }
        return match golden::run_all(&dir) {
            Ok((results, summary)) => Execution {
                report: golden::render_summary(&summary),
                messages: results.iter().map(|r| r.line()).collect(),
                exit_code: if results.iter().all(|r| r.passed()) { 0 } else { 1 },
            },
            Err(e) => Execution { report: String::new(), messages: vec![e], exit_code: 1 },
        };
    }
    match read_input(&cli.file) {
        Ok(text) => {
            let outcome = run_text(cli.command, &text, &cli.options());
            Execution { report: outcome.render(), messages: Vec::new(), exit_code: outcome.exit_code }
        }
        Err(e) => Execution { report: String::new(), messages: vec![e], exit_code: 1 },
    }
}
