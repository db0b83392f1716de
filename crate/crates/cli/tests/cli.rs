use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use grope::generate::all_dyadic_stages;
use grope::json;
use grope::{CappedGrope, Grope};
use tempfile::TempDir;

fn grope() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grope"))
}

fn run(args: &[&str]) -> Output {
    grope().args(args).env_remove("GROPE_MAX_GENUS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn dyadic(dir: &Path, k: u32) -> PathBuf {
    let g = Grope::new(all_dyadic_stages(k).remove(0));
    write(dir, &format!("dyadic{k}.json"), &json::to_canonical(&g))
}

fn kernel(dir: &Path, extra: &[&str]) -> PathBuf {
    let p = dir.join("kernel.json");
    let mut args = vec!["generate", "--seed", "3", "-o", p.to_str().unwrap()];
    args.extend_from_slice(extra);
    assert_eq!(code(&run(&args)), 0);
    p
}

#[test]
fn lcs_of_a_triple_commutator() {
    let o = run(&["lcs", "[[x1,x2],x1]"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "3");
}

#[test]
fn class_tips_and_boundary_of_a_dyadic_grope() {
    let dir = TempDir::new().unwrap();
    let p = dyadic(dir.path(), 5);
    let p = p.to_str().unwrap();
    assert_eq!(stdout(&run(&["class", p])).trim(), "5");
    assert_eq!(stdout(&run(&["tips", "--count", p])).trim(), "5");
    assert_eq!(stdout(&run(&["tips", p])).lines().count(), 5);
    assert_eq!(stdout(&run(&["validate", p])).trim(), "ok");
    let o = run(&["boundary", p]);
    assert_eq!(code(&o), 0);
    let w = stdout(&o);
    let depth = stdout(&run(&["lcs", w.trim()]));
    assert_eq!(depth.trim(), "5");
}

#[test]
fn stdin_is_read_for_dash() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(dyadic(dir.path(), 4)).unwrap();
    let mut child = grope()
        .args(["class", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "4");
}

#[test]
fn render_emits_a_digraph() {
    let dir = TempDir::new().unwrap();
    let p = dyadic(dir.path(), 3);
    let o = run(&["render", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph"), "{dot}");
    assert!(dot.trim_end().ends_with('}'));
}

#[test]
fn generate_is_deterministic() {
    let a = stdout(&run(&["generate", "--seed", "11", "--m", "2", "--class", "3"]));
    let b = stdout(&run(&["generate", "--seed", "11", "--m", "2", "--class", "3"]));
    assert_eq!(a, b);
    let c = stdout(&run(&["generate", "--seed", "12", "--m", "2", "--class", "3"]));
    assert_ne!(a, c);
}

#[test]
fn pipeline_succeeds_and_writes_trace() {
    let dir = TempDir::new().unwrap();
    let k = kernel(dir.path(), &[]);
    let trace = dir.path().join("trace.json");
    let out = dir.path().join("out.json");
    let o = run(&[
        "pipeline",
        k.to_str().unwrap(),
        "--stats",
        "--trace",
        trace.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stats: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(stats["m"], 2);
    let result: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert!(!result["spherePairs"].as_array().unwrap().is_empty());
    let steps: serde_json::Value = serde_json::from_str(&fs::read_to_string(trace).unwrap()).unwrap();
    assert_eq!(steps, result["trace"]);
}

#[test]
fn pipeline_exit_codes() {
    let dir = TempDir::new().unwrap();
    let k = kernel(dir.path(), &["--adversarial", "--m", "3"]);
    let k = k.to_str().unwrap();
    assert_eq!(code(&run(&["pipeline", k])), 1);
    assert_eq!(code(&run(&["pipeline", k, "--force"])), 2);

    let k = kernel(dir.path(), &["--m", "3", "--class", "4"]);
    let k = k.to_str().unwrap();
    assert_eq!(code(&run(&["pipeline", k, "--max-genus", "2"])), 3);
    let o = grope()
        .args(["pipeline", k])
        .env("GROPE_MAX_GENUS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn split_writes_one_log_line_per_rewrite() {
    let dir = TempDir::new().unwrap();
    let k = kernel(dir.path(), &[]);
    let text = fs::read_to_string(k).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let cg: CappedGrope = serde_json::from_value(doc["gropes"][0].clone()).unwrap();
    let p = write(dir.path(), "capped.json", &json::to_canonical(&cg));
    let log = dir.path().join("split.log");
    let o = run(&["split", p.to_str().unwrap(), "--trace", log.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let log = fs::read_to_string(log).unwrap();
    assert!(log
        .lines()
        .filter(|l| !l.starts_with(' '))
        .all(|l| l.starts_with("split_")));
    let out: CappedGrope = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(grope::splitting::is_fully_split(&out));
}

#[test]
fn contract_reports_differing_labels() {
    let dir = TempDir::new().unwrap();
    let p = write(
        dir.path(),
        "two.json",
        r#"{
  "root": {"pairs": [[{"tip": "a"}, {"tip": "b"}]]},
  "caps": {"a": "ca", "b": "cb"},
  "intersections": [
    {"id": "p", "endA": {"cap": "ca"}, "endB": {"body": []}, "label": "x1"},
    {"id": "q", "endA": {"cap": "cb"}, "endB": {"body": []}, "label": "x2"}
  ]
}"#,
    );
    let o = run(&["contract", p.to_str().unwrap(), "--piece", "0", "--caps", "ca,cb"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pigeonhole precondition failed"));
}

#[test]
fn input_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(&["bogus"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(
        code(&run(&["class", dir.path().join("missing.json").to_str().unwrap()])),
        66
    );
    let bad = write(dir.path(), "bad.json", "{\n  \"root\": [1,\n}");
    let o = run(&["class", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 65);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json:3:"));
    assert_eq!(code(&run(&["lcs", "[x1,"])), 65);
    let out = dir.path().join("no/such/dir/out.json");
    assert_eq!(code(&run(&["generate", "-o", out.to_str().unwrap()])), 74);
}

#[test]
fn documented_examples_are_valid_and_canonical() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples");
    for name in ["grope.json", "capped.json", "kernel.json"] {
        let p = dir.join(name);
        let o = run(&["validate", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(json::Document::parse(&text).unwrap().to_canonical(), text, "{name}");
    }
    let o = run(&["pipeline", dir.join("kernel.json").to_str().unwrap(), "--stats"]);
    assert_eq!(code(&o), 0);
}
