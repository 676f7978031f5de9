use std::path::PathBuf;
use std::process::{Command, Output};

fn dqms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqms"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dqms-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gen_then_analyze_round_trip() {
    let gen = dqms(&["gen", "m3"]);
    assert!(gen.status.success());
    let path = scratch("m3.json", &stdout(&gen));
    let p = path.to_str().unwrap();

    let json = dqms(&["analyze", p, "--json"]);
    assert!(json.status.success(), "{}", String::from_utf8_lossy(&json.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v["chain"]["dims"], serde_json::json!([3, 5, 9]));
    assert_eq!(v["indices"]["c"]["value"], 3);
    assert_eq!(v["indices"]["q"]["value"], 1);

    let md = dqms(&["analyze", p]);
    assert!(md.status.success());
    let md = stdout(&md);
    for (name, key) in [("c", "c"), ("q", "q"), ("cE", "c_e"), ("w", "w")] {
        let value = &v["indices"][key]["value"];
        let row = format!("| {name} | {value} |");
        assert!(md.contains(&row), "missing {row}");
    }
    assert!(md.contains(&format!("| C0 | {} |", v["capacities"]["c0"]["lo"])));
}

#[test]
fn generated_classical_example_keeps_its_indices() {
    let gen = dqms(&["gen", "ad", "4"]);
    let path = scratch("a4.json", &stdout(&gen));
    let out = dqms(&["analyze", path.to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["indices"]["c"]["value"], 5);
    assert_eq!(v["indices"]["w"]["value"], 10);
}

#[test]
fn random_generator_is_seeded() {
    let a = dqms(&["gen", "random", "--dim", "3", "--kraus", "2", "--seed", "9"]);
    let b = dqms(&["gen", "random", "--dim", "3", "--kraus", "2", "--seed", "9"]);
    let c = dqms(&["gen", "random", "--dim", "3", "--kraus", "2", "--seed", "10"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn malformed_json_exits_with_validation_code() {
    let path = scratch("bad.json", "{\"dim\": 2, \"kind\": \"kraus\"");
    let out = dqms(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn non_trace_preserving_input_is_rejected() {
    let spec = r#"{"dim": 2, "kind": "kraus", "kraus": [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]]]}"#;
    let path = scratch("ntp.json", spec);
    let out = dqms(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_filter_runs_selected_criteria() {
    let out = dqms(&["verify", "--filter", "2"]);
    assert!(out.status.success());
    let table = stdout(&out);
    assert!(table.contains("| 2 | qutrit algebra-chain example | PASS"));
    assert!(table.contains("1 passed, 0 failed"));
}

#[test]
fn loose_peripheral_tolerance_breaks_the_suite() {
    let out = dqms(&["verify", "--filter", "9", "--peripheral-eps", "1e-1"]);
    assert!(!out.status.success());
    assert!(stdout(&out).contains("FAIL"));
}
