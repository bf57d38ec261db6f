use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn flatcg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatcg"))
        .env_remove("NOCFG_LOG")
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn bananas() -> String {
    fixture("bananas.py").display().to_string()
}

#[test]
fn analyze_formats() {
    let table = flatcg(&["analyze", &bananas(), "--format", "table"]);
    assert_eq!(table.status.code(), Some(0));
    assert_eq!(stdout(&table).lines().count(), 8);
    let dot = flatcg(&["analyze", &bananas(), "--format", "dot"]);
    assert!(stdout(&dot).starts_with("digraph"));
    assert!(stdout(&dot).contains("\"Person:eat_bananas\" -> \"Banana:eat\""));
}

#[test]
fn analyze_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let o = flatcg(&["analyze", &bananas(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let g = flatcg::CallGraph::from_json(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(g.edge_count(), 8);
}

#[test]
fn lower_round_trips_through_json_ast() {
    let dir = tempfile::tempdir().unwrap();
    let ast = dir.path().join("prog.json");
    assert_eq!(
        flatcg(&["lower", &bananas(), "--out", ast.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    let from_source = stdout(&flatcg(&["analyze", &bananas()]));
    let from_json = stdout(&flatcg(&["analyze", ast.to_str().unwrap()]));
    assert_eq!(from_source, from_json);
}

#[test]
fn interpret_then_compare() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    let d = dir.path().join("d.json");
    flatcg(&["analyze", &bananas(), "--out", s.to_str().unwrap()]);
    let run = flatcg(&["interpret", &bananas(), "--out", d.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&run.stderr).contains("main: completed"));
    let o = flatcg(&["compare", s.to_str().unwrap(), d.to_str().unwrap()]);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["matched"], 8);
    assert_eq!(report["over_approx"], 0);
    assert_eq!(report["missed"], 0);
}

#[test]
fn types_table_lists_receivers() {
    let o = flatcg(&["types", &bananas(), "--format", "table"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Person:eat_bananas"));
    assert_eq!(
        flatcg(&["types", &bananas(), "--format", "dot"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn scfg_is_dot() {
    let o = flatcg(&["scfg", &bananas(), "--method", "main"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("digraph"));
    assert_eq!(
        flatcg(&["scfg", &bananas(), "--method", "nope"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.py");
    std::fs::write(&broken, "def main(:\n    pass\n").unwrap();
    assert_eq!(
        flatcg(&["analyze", broken.to_str().unwrap()]).status.code(),
        Some(2)
    );
    let bad_json = dir.path().join("bad.json");
    std::fs::write(&bad_json, "{\"types\": 3}").unwrap();
    assert_eq!(
        flatcg(&["analyze", bad_json.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        flatcg(&["analyze", "/nonexistent/x.py"]).status.code(),
        Some(2)
    );
    assert_eq!(
        flatcg(&["analyze", &bananas(), "--entry", "nope"])
            .status
            .code(),
        Some(3)
    );
    let empty = dir.path().join("empty.py");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(
        flatcg(&["analyze", empty.to_str().unwrap()]).status.code(),
        Some(3)
    );
}

#[test]
fn unresolved_calls_are_logged() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("u.py");
    std::fs::write(&f, "def main():\n    x = 1\n    x.frob()\n").unwrap();
    let o = flatcg(&["analyze", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains(":3: unresolved_call"), "{err}");
}
