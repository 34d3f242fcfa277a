use std::path::Path;
use std::process::{Command, Output};

fn bsq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bsq")).args(args).env("BOUSSINESQ_THREADS", "1").output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const LINEAR: &str = r#"
kind = "linear-decay"
output = "out"

[grid]
n = 32
l = 40.0

[data.theta]
kind = "gaussian"
mass = 1.0
sigma = 0.2

[time]
t_max = 10.0
every = 0.5

[fit]
window = [1.0, 10.0]
"#;

#[test]
fn lists_every_experiment_kind() {
    let out = bsq(&["list-experiments"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for k in ["linear-decay", "nonlinear-decay", "weighted-decay", "formula-equivalence", "scaling-invariance", "profile", "kernel-validation", "interpolation-check"] {
        assert!(text.contains(k), "missing {k}");
    }
}

#[test]
fn non_power_of_two_grid_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &LINEAR.replace("n = 32", "n = 100"));
    let out = bsq(&["validate", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1, "{text}");
    let out = bsq(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn horizon_beyond_box_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &LINEAR.replace("t_max = 10.0", "t_max = 30.0"));
    let out = bsq(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("box-horizon"));
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &LINEAR.replace("[time]", "[time]\nsteps = 4"));
    assert_eq!(bsq(&["validate", &cfg]).status.code(), Some(2));
    assert_eq!(bsq(&["run", &cfg]).status.code(), Some(2));
}

#[test]
fn linear_decay_run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", LINEAR);
    let out = bsq(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("out");
    let csv = std::fs::read_to_string(run.join("measurements.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,quantity,a,b,p,value,flag");
    assert!(csv.lines().count() > 20);
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(run.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["exit_code"], 0);
    assert_eq!(manifest["threads"], 1);
    assert_eq!(manifest["config_sha256"].as_str().unwrap(), bsq_cli::config_hash(LINEAR));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(run.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    let slope = report["fits"][0]["slope"].as_f64().unwrap();
    assert!((slope + 0.75).abs() < 0.03, "{slope}");
    assert!(run.join("plot.py").exists());
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.toml", &LINEAR.replace("\"out\"", "\"a\""));
    let b = write(dir.path(), "b.toml", &LINEAR.replace("\"out\"", "\"b\""));
    assert!(bsq(&["run", &a]).status.success());
    assert!(bsq(&["run", &b]).status.success());
    let read = |d: &str| std::fs::read(dir.path().join(d).join("measurements.csv")).unwrap();
    assert_eq!(read("a"), read("b"));
}

#[test]
fn kernel_validation_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "k.toml",
        "kind = \"kernel-validation\"\noutput = \"k\"\n\n[kernel]\nt = 1.0\nradii = [2.0, 4.0, 6.0]\n",
    );
    let out = bsq(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("PASS"));
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_bsq"))
        .arg("list-experiments")
        .env("BOUSSINESQ_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "toml") {
            let out = bsq(&["validate", p.to_str().unwrap()]);
            assert!(out.status.success(), "{}: {}", p.display(), String::from_utf8_lossy(&out.stdout));
            n += 1;
        }
    }
    assert!(n >= 8);
}
