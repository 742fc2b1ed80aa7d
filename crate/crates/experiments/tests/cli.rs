use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const CONFIGS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");

fn lwf(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lwf"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn simulate_sde_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"model": {"x0": [0.2, 0.8], "horizon": 0.1, "dt": 0.01, "record_every": 5},
            "drift": {"kind": "neutral"}, "experiment": {"replicates": 3}}"#,
    );
    let out = dir.path().join("run");
    let o = lwf(&["simulate-sde", "--config", &cfg, "--seed", "9"], &out);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = fs::read_to_string(out.join("trajectories.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x_1,x_2,replicate"));
    // 3 records per replicate: t = 0, 0.05, 0.1
    assert_eq!(lines.count(), 9);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["seed"]["seed"], 9);
    assert_eq!(report["experiment"], "simulate-sde");
    let timing: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("timing.json")).unwrap()).unwrap();
    assert!(timing["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
    assert!(!fs::read_to_string(out.join("report.json"))
        .unwrap()
        .contains("wall_clock"));
}

#[test]
fn simulate_discrete_and_ancestral_csv_headers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"model": {"x0": [0.2, 0.3, 0.5], "n": 100, "horizon": 0.2, "record_every": 10, "n0": 3},
            "rule": {"kind": "transitive"},
            "experiment": {"replicates": 2}}"#,
    );
    let out = dir.path().join("d");
    let o = lwf(&["simulate-discrete", "--config", &cfg], &out);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = fs::read_to_string(out.join("trajectories.csv")).unwrap();
    assert!(csv.starts_with("t,x_1,x_2,x_3,replicate\n"));

    let out = dir.path().join("a");
    let o = lwf(&["ancestral", "--config", &cfg], &out);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = fs::read_to_string(out.join("trajectories.csv")).unwrap();
    assert!(csv.starts_with("t,n,replicate\n0,3,0\n"), "{csv}");
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let unknown = write_config(dir.path(), r#"{"lambda": {"kind": "zero", "mass": 1}}"#);
    assert_eq!(
        lwf(&["simulate-sde", "--config", &unknown], &out)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        lwf(&["fixation", "--config", "/nonexistent.json"], &out)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(lwf(&["no-such-command"], &out).status.code(), Some(2));
    // logistic rules have no size-3 colouring
    let bad = write_config(
        dir.path(),
        r#"{"model": {"tail": [[3, 1.0]]}, "rule": {"kind": "logistic", "p": [[0.5, 0.5], [0.5, 0.5]]}}"#,
    );
    assert_eq!(
        lwf(&["simulate-discrete", "--config", &bad], &out)
            .status
            .code(),
        Some(2)
    );
    let cfg = format!("{CONFIGS}/fixation_neutral.json");
    assert_eq!(
        lwf(&["fixation", "--config", &cfg, "--replicates", "0"], &out)
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn failed_assertion_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    // far too little time for any replicate to fix
    let cfg = write_config(
        dir.path(),
        r#"{"model": {"x0": [0.5, 0.5], "max_time": 0.001}, "drift": {"kind": "neutral"},
            "experiment": {"replicates": 20}}"#,
    );
    let out = dir.path().join("o");
    let o = lwf(&["fixation", "--config", &cfg], &out);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL every replicate fixes"));
    assert!(out.join("report.json").exists());
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{CONFIGS}/duality.json");
    let mut reports = Vec::new();
    for (i, threads) in ["1", "2"].iter().enumerate() {
        let out = dir.path().join(i.to_string());
        let o = lwf(
            &[
                "duality",
                "--config",
                &cfg,
                "--replicates",
                "300",
                "--threads",
                threads,
            ],
            &out,
        );
        assert!(o.status.code() == Some(0) || o.status.code() == Some(1));
        reports.push(fs::read(out.join("report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}
