use std::path::Path;
use std::process::{Command, Output};

fn dqhc(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqhc"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("DQHC_SEED")
        .output()
        .expect("spawn dqhc")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("scenario.json");
    std::fs::write(&path, body).unwrap();
    path
}

const HYBRID_CONFIG: &str = r#"{
  "label": "short",
  "controller": "hybrid",
  "k": 1.0,
  "delta": DELTA,
  "noise_sigma": 0.05,
  "seed": 3,
  "q_initial": [-0.5, 0.5, 0.5, 0.5, 0.0, 0.1, 0.0, 0.0],
  "dt": 0.01,
  "t_final": 2.0
}"#;

#[test]
fn validate_rejects_delta_outside_unit_interval() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &HYBRID_CONFIG.replace("DELTA", "1.5"));
    let out = Command::new(env!("CARGO_BIN_EXE_dqhc"))
        .args(["validate", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("delta must lie in (0,1), got 1.5"));
}

#[test]
fn validate_accepts_good_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &HYBRID_CONFIG.replace("DELTA", "0.3"));
    let out = Command::new(env!("CARGO_BIN_EXE_dqhc")).args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unknown_preset_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dqhc(&["simulate", "--preset", "nope"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn zero_initial_pose_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let body = HYBRID_CONFIG
        .replace("DELTA", "0.3")
        .replace("[-0.5, 0.5, 0.5, 0.5, 0.0, 0.1, 0.0, 0.0]", "[0, 0, 0, 0, 1, 0, 0, 0]");
    let cfg = write_config(dir.path(), &body);
    let out = dqhc(&["simulate", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero primary part"));
}

#[test]
fn simulate_from_config_writes_trajectory_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &HYBRID_CONFIG.replace("DELTA", "0.3"));
    let out = dqhc(&["simulate", "--config", cfg.to_str().unwrap(), "--plots"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("short.csv")).unwrap();
    assert!(csv.starts_with("t,j,h,eta,mu1,mu2,mu3,etap,mup1,mup2,mup3,V,twist_norm,jump_flag\n"));
    assert_eq!(csv.lines().count(), 1 + 201);
    let summary = json(&dir.path().join("short_summary.json"));
    assert_eq!(summary["seed"], 3);
    assert_eq!(summary["controller"], "hybrid");
    for suffix in ["eta", "translation", "lyapunov", "switch"] {
        assert!(dir.path().join(format!("short_{suffix}.svg")).exists());
    }
}

#[test]
fn seed_flag_beats_env_which_beats_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &HYBRID_CONFIG.replace("DELTA", "0.3"));
    let run = |extra: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_dqhc"));
        cmd.args(["simulate", "--config", cfg.to_str().unwrap(), "--out"]).arg(dir.path()).args(extra);
        match env {
            Some(v) => cmd.env("DQHC_SEED", v),
            None => cmd.env_remove("DQHC_SEED"),
        };
        assert!(cmd.output().unwrap().status.success());
        json(&dir.path().join("short_summary.json"))["seed"].as_u64().unwrap()
    };
    assert_eq!(run(&[], None), 3);
    assert_eq!(run(&[], Some("17")), 17);
    assert_eq!(run(&["--seed", "5"], Some("17")), 5);
}

#[test]
fn malformed_env_seed_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_dqhc"))
        .args(["simulate", "--preset", "fig5_unwinding", "--out"])
        .arg(dir.path())
        .env("DQHC_SEED", "abc")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_delta_writes_one_row_per_delta() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &HYBRID_CONFIG.replace("DELTA", "0.3"));
    let out = dqhc(
        &["sweep-delta", "--config", cfg.to_str().unwrap(), "--deltas", "0.6,0.05,0.3", "--runs", "4"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep_delta.csv")).unwrap();
    let deltas: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(deltas, ["0.05", "0.3", "0.6"]);
    let doc = json(&dir.path().join("sweep_delta.json"));
    assert_eq!(doc["rows"].as_array().unwrap().len(), 3);
    assert!(doc["rows"].as_array().unwrap().iter().all(|r| r["runs"] == 4));
}

#[test]
fn compare_runs_each_controller() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &HYBRID_CONFIG.replace("DELTA", "0.3"));
    let out = dqhc(
        &["compare", "--config", cfg.to_str().unwrap(), "--controllers", "hybrid,discontinuous,continuous", "--runs", "3"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&dir.path().join("compare.json"));
    let names: Vec<&str> = doc["controllers"].as_array().unwrap().iter().map(|c| c["controller"].as_str().unwrap()).collect();
    assert_eq!(names, ["hybrid", "discontinuous", "continuous"]);
    for name in &names {
        assert!(dir.path().join(format!("short_{name}.csv")).exists());
    }
    assert!(doc["controllers"][0]["batch"]["runs"] == 3);
}

#[test]
fn compare_rejects_unknown_controller() {
    let dir = tempfile::tempdir().unwrap();
    let out = dqhc(&["compare", "--controllers", "hybrid,pid"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert!(dqhc(&["simulate", "--preset", "fig5_unwinding", "--seed", "9"], d.path()).status.success());
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("fig5_unwinding.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}
