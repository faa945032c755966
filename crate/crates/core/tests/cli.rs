use std::path::Path;
use std::process::Command;

fn aotsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aotsim"))
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("tiny.json");
    let text = r#"{
        "grid": {"n": 32},
        "physics": {"nu": 0.01, "grashof": 2000, "dt": 0.01, "tSpin": 0.5, "tRun": 0.3, "forcingBand": [3, 5]},
        "nudging": {"mu": 10, "errorSampleEvery": 5},
        "strategy": {"kind": "bleeps", "count": 40, "seed": 3},
        "io": {"logTrajectories": true}
    }"#;
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn spinup_run_compare() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let ckpt = dir.path().join("ref.ckpt");

    let out = aotsim().args(["spinup", "--config"]).arg(&cfg).arg("--checkpoint").arg(&ckpt).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(ckpt.exists());

    let run_dir = dir.path().join("run");
    let out = aotsim()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--checkpoint")
        .arg(&ckpt)
        .arg("--out")
        .arg(&run_dir)
        .args(["--seed", "9"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let errors = std::fs::read_to_string(run_dir.join("errors.csv")).unwrap();
    let mut lines = errors.lines();
    assert_eq!(lines.next(), Some("t,cpu_seconds,err_psi_l2,err_omega_l2,err_omega_linf"));
    assert_eq!(lines.count(), 7);
    let traj = std::fs::read_to_string(run_dir.join("trajectories.csv")).unwrap();
    assert!(traj.starts_with("t,observer_id,x,y\n"));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run_dir.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["strategy"]["seed"], 9);
    assert!(meta["conventions"]["grashof"].is_string());

    let cmp_dir = dir.path().join("cmp");
    let out = aotsim()
        .args(["compare", "--preset", "equal-count", "--scale", "desk", "--config"])
        .arg(&cfg)
        .arg("--checkpoint")
        .arg(&ckpt)
        .arg("--out")
        .arg(&cmp_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let index = std::fs::read_to_string(cmp_dir.join("index.csv")).unwrap();
    assert!(index.starts_with("name,kind,observers,status,t_final,err_psi_l2,cpu_seconds,dir\n"));
    assert_eq!(index.lines().count(), 8, "{index}");
}

#[test]
fn bad_inputs_fail_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"grid": {"n": 32}, "strategy": {}}"#).unwrap();
    let out = aotsim().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let out = aotsim().args(["compare", "--preset", "nope"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown comparison"));
    let out = aotsim().args(["spinup"]).output().unwrap();
    assert!(!out.status.success());
}
