use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgraph"))
        .args(args)
        .output()
        .expect("spawn qgraph")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

const IRREGULAR: &str = r#"{
  "system": {"trig": {"s0": 1.0, "gamma0": 0.5, "terms": [
    {"amplitude": 0.6, "action": 0.3, "phase": 0.5},
    {"amplitude": 0.5, "action": 0.6, "phase": 0.5}
  ]}},
  "task": "regularity"
}"#;

#[test]
fn irregular_system_is_reported_then_refused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "irregular.json", IRREGULAR);

    let out = qgraph(&["regularity", "--config", &cfg, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["regular"], false);

    let out = qgraph(&["solve", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn invalid_configs_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("out.csv");
    let out_str = out_path.to_str().unwrap();

    let unknown = write(
        dir.path(),
        "unknown.json",
        r#"{"system": {"step": {"b": 0.3, "lambda": 0.5}}, "task": "roots", "bogus": 1}"#,
    );
    assert_eq!(
        qgraph(&["roots", "--config", &unknown, "--out", out_str])
            .status
            .code(),
        Some(2)
    );

    assert_eq!(
        qgraph(&["solve", "--step", "0.3,1.5", "--out", out_str])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(qgraph(&["solve", "--out", out_str]).status.code(), Some(2));
    assert!(!out_path.exists());
}

#[test]
fn unit_chain_roots_are_multiples_of_pi() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "chain.json",
        r#"{"system": {"regions": [{"length": 0.4, "lambda": 0.0}, {"length": 0.6, "lambda": 0.0}]}, "task": "roots", "params": {"n_max": 20}}"#,
    );
    let out = qgraph(&["roots", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,sep_lower,sep_upper,k_n,zone_margin"));
    let mut count = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let n: f64 = cols[0].parse().unwrap();
        let k: f64 = cols[3].parse().unwrap();
        assert!((k - n * std::f64::consts::PI).abs() <= 1e-12 * k, "{line}");
        count += 1;
    }
    assert_eq!(count, 20);
}

#[test]
fn converge_output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let path = dir.path().join(format!("fig4_{threads}.csv"));
        let out = qgraph(&[
            "converge",
            "--step",
            "0.3,0.5",
            "--n",
            "1,10,100",
            "--q-max",
            "18",
            "--threads",
            threads,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        outputs.push(fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    assert!(text.starts_with("n,q,k_explicit,k_oracle,eps\n"));
    assert_eq!(text.lines().count(), 1 + 3 * 18);
}

#[test]
fn orbit_listing() {
    let out = qgraph(&[
        "orbits", "--step", "0.3,0.5", "--q-max", "4", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let orbits: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let words: Vec<&str> = orbits
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["word"].as_str().unwrap())
        .collect();
    assert_eq!(
        words,
        ["1", "2", "12", "112", "122", "1112", "1122", "1222"]
    );
}
