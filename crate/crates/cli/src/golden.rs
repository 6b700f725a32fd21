//! Golden scenarios: shipped `.tor` inputs with blessed JSON reports.
//!
//! The manifest `scenarios.txt` holds one scenario per line:
//!
//! ```text
//! name  file.tor  command  [flags...]  [xfail]
//! ```
//!
//! The blessed report for `name` is `expected/name.json`. A scenario passes
//! when its report is byte-identical to the blessed one. `xfail` marks inputs
//! that break a hypothesis on purpose; their blessed report records the failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser as _;
use serde_json::{json, Value};

use crate::cli::Cli;
use crate::run::{render, run_text, Command};

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub file: String,
    pub cli: Cli,
    pub xfail: bool,
}

/// The scenario directory shipped with the crate.
pub fn default_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("golden")
}

pub fn load_manifest(dir: &Path) -> Result<Vec<Scenario>, String> {
    let path = dir.join("scenarios.txt");
    let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words: Vec<&str> = line.split_whitespace().collect();
        let xfail = words.last() == Some(&"xfail");
        if xfail {
            words.pop();
        }
        if words.len() < 3 {
            return Err(format!("{}:{}: expected `name file command [flags]`", path.display(), k + 1));
        }
        let (name, file) = (words[0].to_string(), words[1].to_string());
        let args = std::iter::once("toroidal").chain([words[2], words[1]]).chain(words[3..].iter().copied());
        let cli = Cli::try_parse_from(args).map_err(|e| format!("{}:{}: {e}", path.display(), k + 1))?;
        if cli.command == Command::Golden {
            return Err(format!("{}:{}: scenarios cannot run `golden`", path.display(), k + 1));
        }
        out.push(Scenario { name, file, cli, xfail });
    }
    Ok(out)
}

/// The report a scenario produces now, rendered.
pub fn produce(dir: &Path, s: &Scenario) -> Result<String, String> {
    let path = dir.join(&s.file);
    let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(run_text(s.cli.command, &text, &s.cli.options()).render())
}

fn snippet(v: Option<&Value>) -> String {
    let s = v.map_or_else(|| "<absent>".to_string(), Value::to_string);
    if s.chars().count() > 80 {
        format!("{}...", s.chars().take(77).collect::<String>())
    } else {
        s
    }
}

/// JSON pointer of the first difference between two values, in key order.
pub fn first_divergence(expected: &Value, got: &Value) -> Option<String> {
    fn walk(e: &Value, g: &Value, path: &mut String) -> bool {
        match (e, g) {
            (Value::Object(a), Value::Object(b)) => {
                let mut keys: Vec<&String> = a.keys().chain(b.keys()).collect();
                keys.sort();
                keys.dedup();
                for k in keys {
                    let len = path.len();
                    path.push('/');
                    path.push_str(&k.replace('~', "~0").replace('/', "~1"));
                    match (a.get(k), b.get(k)) {
                        (Some(x), Some(y)) => {
                            if walk(x, y, path) {
                                return true;
                            }
                        }
                        _ => return true,
                    }
                    path.truncate(len);
                }
                false
            }
            (Value::Array(a), Value::Array(b)) => {
                for k in 0..a.len().max(b.len()) {
                    let len = path.len();
                    path.push_str(&format!("/{k}"));
                    match (a.get(k), b.get(k)) {
                        (Some(x), Some(y)) => {
                            if walk(x, y, path) {
                                return true;
                            }
                        }
                        _ => return true,
                    }
                    path.truncate(len);
                }
                false
            }
            _ => e != g,
        }
    }
    let mut path = String::new();
    walk(expected, got, &mut path).then_some(path)
}

fn pointer<'a>(v: &'a Value, p: &str) -> Option<&'a Value> {
    if p.is_empty() {
        Some(v)
    } else {
        v.pointer(p)
    }
}

/// Result of comparing one scenario with its blessed report.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioResult {
    pub name: String,
    pub status: &'static str,
    pub detail: Option<String>,
}

impl ScenarioResult {
    pub fn passed(&self) -> bool {
        matches!(self.status, "pass" | "expected-fail")
    }

    pub fn line(&self) -> String {
        match &self.detail {
            Some(d) => format!("{:<14} {}: {d}", self.status, self.name),
            None => format!("{:<14} {}", self.status, self.name),
        }
    }
}

pub fn check(dir: &Path, s: &Scenario) -> ScenarioResult {
    let fail = |status, detail: String| ScenarioResult { name: s.name.clone(), status, detail: Some(detail) };
    let got = match produce(dir, s) {
        Ok(g) => g,
        Err(e) => return fail("fail", e),
    };
    let blessed_path = dir.join("expected").join(format!("{}.json", s.name));
    let Ok(blessed) = fs::read_to_string(&blessed_path) else {
        return fail("missing", format!("no blessed report at {}", blessed_path.display()));
    };
    if got == blessed {
        let status = if s.xfail { "expected-fail" } else { "pass" };
        return ScenarioResult { name: s.name.clone(), status, detail: None };
    }
    let (Ok(e), Ok(g)) = (serde_json::from_str::<Value>(&blessed), serde_json::from_str::<Value>(&got)) else {
        return fail("fail", "blessed report is not valid JSON".into());
    };
    match first_divergence(&e, &g) {
        Some(p) => fail(
            "fail",
            format!("first divergent field {p}: expected {}, got {}", snippet(pointer(&e, &p)), snippet(pointer(&g, &p))),
        ),
        None => fail("fail", "reports differ only in formatting".into()),
    }
}

/// Rewrite every blessed report from the current implementation.
pub fn bless(dir: &Path) -> Result<usize, String> {
    let scenarios = load_manifest(dir)?;
    fs::create_dir_all(dir.join("expected")).map_err(|e| e.to_string())?;
    for s in &scenarios {
        let out = produce(dir, s)?;
        let path = dir.join("expected").join(format!("{}.json", s.name));
        fs::write(&path, out).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(scenarios.len())
}

/// Run every scenario; the summary report and whether all passed.
pub fn run_all(dir: &Path) -> Result<(Vec<ScenarioResult>, Value), String> {
    let scenarios = load_manifest(dir)?;
    let results: Vec<ScenarioResult> = scenarios.iter().map(|s| check(dir, s)).collect();
    let passed = results.iter().filter(|r| r.passed()).count();
    let summary = json!({
        "command": "golden",
        "status": if passed == results.len() { "ok" } else { "failed" },
        "passed": passed,
        "failed": results.len() - passed,
        "scenarios": results.iter().map(|r| json!({
            "name": r.name,
            "status": r.status,
            "detail": r.detail,
        })).collect::<Vec<_>>(),
    });
    Ok((results, summary))
}

/// Render a summary the same way command reports are rendered.
pub fn render_summary(v: &Value) -> String {
    render(v)
}
