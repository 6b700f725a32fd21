//! Front end for `toroidal-core`: the `.tor` input language, command
//! dispatch with JSON reports, and the golden-scenario runner.

pub mod cli;
pub mod dsl;
pub mod golden;
pub mod run;

pub use cli::{execute, Cli};
pub use dsl::{parse, print, Document, DslError, DslErrorKind};
pub use run::{run, run_text, Command, Options, Outcome};
