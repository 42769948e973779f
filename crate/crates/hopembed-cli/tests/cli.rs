use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hopembed(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hopembed"));
    cmd.args(args).env_remove("HOPEMBED_SEED");
    if let Some(s) = seed_env {
        cmd.env("HOPEMBED_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

const SPEC: &str = r#"{"family":"random-weighted","n":16,"p":0.15,"max_weight":20}"#;

fn write_graph(dir: &Path) -> String {
    let g = hopembed(&["gen", SPEC, "--seed", "4"], None);
    assert!(g.status.success());
    let path = dir.join("g.json");
    std::fs::write(&path, &g.stdout).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn gen_emits_the_graph_format() {
    let v = json(&hopembed(&["gen", r#"{"family":"cycle","n":4}"#], None));
    assert_eq!(v["n"], 4);
    assert_eq!(v["edges"].as_array().unwrap().len(), 4);
    assert_eq!(v["edges"][0], serde_json::json!([0, 1, 1.0]));
}

#[test]
fn seed_flag_overrides_environment() {
    let from_env = stdout(&hopembed(&["gen", SPEC], Some("9")));
    let from_flag = stdout(&hopembed(&["gen", SPEC, "--seed", "9"], None));
    let overridden = stdout(&hopembed(&["gen", SPEC, "--seed", "9"], Some("3")));
    let other = stdout(&hopembed(&["gen", SPEC], Some("3")));
    assert_eq!(from_env, from_flag);
    assert_eq!(from_flag, overridden);
    assert_ne!(from_env, other);
}

#[test]
fn every_command_passes_on_a_small_graph() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(dir.path());
    let sub = dir.path().join("sub.json");
    let graph: Value = serde_json::from_str(&std::fs::read_to_string(&g).unwrap()).unwrap();
    let half: Vec<Value> = graph["edges"]
        .as_array()
        .unwrap()
        .iter()
        .step_by(2)
        .map(|e| e.as_array().unwrap()[..2].into())
        .collect();
    std::fs::write(&sub, serde_json::to_string(&half).unwrap()).unwrap();
    let sub = sub.to_str().unwrap().to_owned();
    let runs: Vec<Vec<&str>> = vec![
        vec!["ramsey", "--h", "2", "--k", "2"],
        vec!["ramsey", "--alt", "--rounds", "3"],
        vec!["ramsey", "--rounds", "3", "--inclusion", "0.25"],
        vec!["clan", "--paths", "10"],
        vec!["cover", "--delta", "5"],
        vec!["preserve", "--root", "2"],
        vec!["preserve", "--subgraph", &sub],
        vec!["oracle", "--k", "1"],
        vec!["labels", "--eps", "0.25"],
        vec!["route", "--pairs", "40"],
        vec!["check", "--h", "2"],
    ];
    for mut args in runs {
        args.extend(["--graph", &g, "--compact"]);
        let o = hopembed(&args, Some("1"));
        assert!(
            o.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let v = json(&o);
        assert_eq!(v["passed"], true, "{args:?}");
        assert!(!v["reports"].as_array().unwrap().is_empty());
    }
}

#[test]
fn generator_input_matches_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(dir.path());
    let a = stdout(&hopembed(&["oracle", "--graph", &g, "--seed", "2"], None));
    let b = stdout(&hopembed(&["oracle", "--gen", SPEC, "--seed", "4"], None));
    let (a, b): (Value, Value) = (
        serde_json::from_str(&a).unwrap(),
        serde_json::from_str(&b).unwrap(),
    );
    assert_eq!(a["params"], b["params"]);
}

#[test]
fn runs_are_reproducible() {
    let args = ["route", "--gen", SPEC, "--pairs", "30"];
    let a = stdout(&hopembed(&args, Some("7")));
    let b = stdout(&hopembed(&args, Some("7")));
    assert_eq!(a, b);
}

#[test]
fn bad_input_exits_with_status_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n":2,"edges":[[0,5,1]]}"#).unwrap();
    for args in [
        vec!["ramsey"],
        vec!["ramsey", "--graph", bad.to_str().unwrap()],
        vec!["cover", "--gen", r#"{"family":"nope"}"#],
        vec!["oracle", "--gen", SPEC, "--eps", "2"],
    ] {
        let o = hopembed(&args, None);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
}
