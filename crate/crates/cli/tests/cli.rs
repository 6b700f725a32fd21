use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command as Process, Output, Stdio};

use num_rational::BigRational;
use proptest::prelude::*;
use serde_json::Value;
use toroidal_cli::dsl::{Coords, NamedMatrix, VectorsDecl, WitnessDecl};
use toroidal_cli::golden::{default_dir, first_divergence, load_manifest};
use toroidal_cli::run::RunError;
use toroidal_cli::{parse, print, run_text, Command, Document, Options};
use toroidal_core::scalar::expr::parse_scalar;
use toroidal_core::{Scalar, SymbolTable};

const RANK_FIVE: &str = "symbols r1 r2
matrix P 3 x 5
[ 0, 1, 0, i*r1^3, r1 ]
[ 0, 0, 1, r1, i ]
[ 1, 0, 0, 0, r2 ]
";

fn toroidal(args: &[&str]) -> Output {
    Process::new(env!("CARGO_BIN_EXE_toroidal")).args(args).output().unwrap()
}

fn json(out: &[u8]) -> Value {
    serde_json::from_slice(out).unwrap()
}

fn write_file(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn toroidal_verdict_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "x.tor", RANK_FIVE);
    let out = toroidal(&["toroidal", &file]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out.stdout);
    assert_eq!(report["verdict"], Value::Bool(true));
    assert_eq!(report["status"], "ok");
    assert_eq!(report["assumptions"]["symbols"], serde_json::json!(["r1", "r2"]));
}

#[test]
fn malformed_file_reports_syntax_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "bad.tor", "matrix P 1 x 1\n[ 1 + ]\n");
    let out = toroidal(&["toroidal", &file]);
    assert_eq!(out.status.code(), Some(1));
    let err = &json(&out.stdout)["error"];
    assert_eq!(err["kind"], "SyntaxError");
    assert_eq!((err["line"].as_u64(), err["column"].as_u64()), (Some(2), Some(7)));
    assert!(!err["expected"].as_array().unwrap().is_empty());
}

#[test]
fn negative_verdicts_still_exit_zero() {
    let text = RANK_FIVE.replace("r2 ]", "0 ]");
    let out = run_text(Command::Toroidal, &text, &Options::default());
    assert_eq!(out.exit_code, 0);
    assert_eq!(out.report["verdict"], Value::Bool(false));
}

#[test]
fn input_errors_exit_one() {
    let opts = |f: fn(&mut Options)| {
        let mut o = Options::default();
        f(&mut o);
        o
    };
    let cases = [
        (Command::Toroidal, "symbols r\n", Options::default(), "InputError"),
        (Command::Toroidal, RANK_FIVE, opts(|o| o.matrix = Some("Q".into())), "InputError"),
        (Command::Subtori, RANK_FIVE, opts(|o| o.dim = Some(1)), "InputError"),
        (Command::Toroidal, "matrix P 1 x 2 [ 1, 2 ]", Options::default(), "RankDeficient"),
        (Command::Decompose, RANK_FIVE, opts(|o| o.height = Some(1)), "InputError"),
        (Command::Golden, RANK_FIVE, Options::default(), "InputError"),
    ];
    for (cmd, text, o, kind) in cases {
        let out = run_text(cmd, text, &o);
        assert_eq!(out.exit_code, 1, "{cmd} on {text:?}");
        assert_eq!(out.report["status"], "input_error");
        assert_eq!(out.report["error"]["kind"], kind, "{cmd} on {text:?}");
        assert!(out.report["assumptions"].is_object());
    }
}

#[test]
fn internal_errors_map_to_exit_two() {
    let internal = RunError::Core(toroidal_core::Error::InternalInconsistency("x".into()));
    assert_eq!(internal.exit_code(), 2);
    assert_eq!(RunError::Core(toroidal_core::Error::NotToroidal("s".into())).exit_code(), 1);
    assert_eq!(RunError::Input("x".into()).exit_code(), 1);
}

#[test]
fn out_flag_and_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let file = write_file(dir.path(), "x.tor", RANK_FIVE);
    let out = toroidal(&["max-cx", &file, "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = fs::read(&out_path).unwrap();
    assert_eq!(json(&written)["verdict"], 2);

    let mut child = Process::new(env!("CARGO_BIN_EXE_toroidal"))
        .args(["max-cx", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(RANK_FIVE.as_bytes()).unwrap();
    let piped = child.wait_with_output().unwrap();
    assert_eq!(piped.stdout, written);
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = Process::new(env!("CARGO_BIN_EXE_toroidal"))
        .args(["golden"])
        .env("TOROIDAL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let mut o = Options::default();
    o.height = Some(2);
    o.dim = Some(1);
    let text = "matrix P 2 x 4\n[ 1, i, 0, 0 ]\n[ 0, 0, 1, i ]\n";
    let a = run_text(Command::Subtori, text, &o).render();
    let b = run_text(Command::Subtori, text, &o).render();
    assert_eq!(a, b);
    assert!(a.contains("\"verdict\": \"counterexample\""));
}

#[test]
fn line_intersection_through_a_named_vector() {
    let text = "symbols r\nmatrix P 2 x 4\n[ 1, 0, i*r^3, r ]\n[ 0, 1, r, i ]\nvector a gamma [ 1, 0, 0, 2 ]\nvector z ambient [ 1, 0 ]\n";
    let mut o = Options::default();
    o.vector = Some("a".into());
    let out = run_text(Command::LineIntersect, text, &o);
    assert_eq!(out.report["verdict"], 1);
    assert_eq!(out.report["lattice"]["basis"], serde_json::json!([["1", "0", "0", "2"]]));
    o.vector = Some("z".into());
    let out = run_text(Command::LineIntersect, text, &o);
    assert_eq!(out.report["lattice"]["basis"], serde_json::json!([["1", "0", "0", "0"]]));
}

/// A copy of the shipped scenarios with one blessed value altered.
#[test]
fn golden_mismatch_names_the_first_divergent_field() {
    let src = default_dir();
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("expected")).unwrap();
    fs::copy(src.join("rank_five.tor"), dir.path().join("rank_five.tor")).unwrap();
    fs::write(dir.path().join("scenarios.txt"), "toroidal rank_five.tor toroidal\nmaxcx rank_five.tor max-cx\n").unwrap();
    let blessed = fs::read_to_string(src.join("expected/rank-five-toroidal.json")).unwrap();
    fs::write(dir.path().join("expected/toroidal.json"), blessed.replace("\"verdict\": true", "\"verdict\": false"))
        .unwrap();
    let out = toroidal(&["golden", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let summary = json(&out.stdout);
    assert_eq!(summary["failed"], 2);
    let s = &summary["scenarios"];
    assert_eq!(s[0]["status"], "fail");
    assert!(s[0]["detail"].as_str().unwrap().contains("/verdict"));
    assert_eq!(s[1]["status"], "missing");

    let blessed = toroidal(&["golden", "--dir", dir.path().to_str().unwrap(), "--bless"]);
    assert_eq!(blessed.status.code(), Some(0));
    let again = toroidal(&["golden", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(0));
}

#[test]
fn divergence_paths() {
    let a: Value = serde_json::json!({ "a": [1, 2, { "b": "x" }], "c": 1 });
    let b: Value = serde_json::json!({ "a": [1, 2, { "b": "y" }], "c": 2 });
    assert_eq!(first_divergence(&a, &b).as_deref(), Some("/a/2/b"));
    assert_eq!(first_divergence(&a, &a), None);
    let c: Value = serde_json::json!({ "a": [1, 2] });
    assert_eq!(first_divergence(&a, &c).as_deref(), Some("/a/2"));
}

#[test]
fn shipped_manifest_covers_every_example() {
    let scenarios = load_manifest(&default_dir()).unwrap();
    for name in ["quartic-line-sweep", "rank-five-r2-zero-toroidal", "rank-five-subgroup", "lambda-prime-isogeny-order"] {
        assert!(scenarios.iter().any(|s| s.name == name), "{name}");
    }
    assert_eq!(scenarios.iter().filter(|s| s.xfail).count(), 1);
    for s in &scenarios {
        assert!(default_dir().join("expected").join(format!("{}.json", s.name)).exists(), "{}", s.name);
    }
}

fn arb_expr() -> impl Strategy<Value = String> {
    let atom = prop_oneof![
        (-9i64..=9).prop_map(|n| n.to_string()),
        (1i64..=9, 2i64..=9).prop_map(|(a, b)| format!("{a}/{b}")),
        Just("i".to_string()),
        Just("r".to_string()),
        Just("s".to_string()),
    ];
    atom.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) * ({b})")),
            (inner.clone(), 0u32..3).prop_map(|(a, e)| format!("({a})^{e}")),
            (inner.clone(), 1i64..=5).prop_map(|(a, d)| format!("({a}) / ({d} + r^2)")),
        ]
    })
}

fn arb_document() -> impl Strategy<Value = Document> {
    let t = SymbolTable::new(["r", "s"]).unwrap();
    let scalar = {
        let t = t.clone();
        arb_expr().prop_map(move |e| parse_scalar(&e, &t).unwrap()).boxed()
    };
    let matrix = (1usize..3, 1usize..4)
        .prop_flat_map(move |(n, k)| prop::collection::vec(prop::collection::vec(scalar.clone(), k), n));
    let q = (-20i64..=20, 1i64..=9).prop_map(|(a, b)| BigRational::new(a.into(), b.into()));
    let ints = prop::collection::vec(prop::collection::vec(-5i64..=5, 3), 1..3);
    (prop::collection::vec(matrix, 1..3), q.clone(), q.clone(), q, ints).prop_map(move |(ms, a, b, c, iv)| {
        let matrices = ms
            .into_iter()
            .enumerate()
            .map(|(k, rows)| NamedMatrix { name: format!("M{k}"), cols: rows[0].len(), rows })
            .collect();
        let (lo, hi) = if b <= c { (b, c) } else { (c, b) };
        let witnesses = vec![WitnessDecl {
            name: "W".into(),
            values: vec![("r".into(), a), ("s".into(), BigRational::from_integer(2.into()))],
            interval: Some(("r".into(), lo, hi)),
        }];
        let vectors: Vec<Vec<Scalar>> = iv.iter().map(|v| v.iter().map(|&x| Scalar::from_int(x)).collect()).collect();
        Document {
            symbols: t.clone(),
            matrices,
            forms: vec![NamedMatrix { name: "H".into(), rows: vec![vec![Scalar::one()]], cols: 1 }],
            witnesses,
            subspaces: vec![VectorsDecl { name: "Y".into(), coords: Coords::Gamma, vectors: vectors.clone() }],
            vectors: vec![VectorsDecl { name: "a".into(), coords: Coords::Ambient, vectors: vec![vectors[0].clone()] }],
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn print_then_parse_round_trips(doc in arb_document()) {
        let text = print(&doc);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(print(&back), text);
    }

    #[test]
    fn parser_never_panics(text in "[a-z0-9 \\[\\],*+/^#=\\n-]{0,60}") {
        let _ = parse(&text);
    }
}
