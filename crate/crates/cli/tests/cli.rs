use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermal-sampling"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn example(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn validate_accepts_examples() {
    for name in ["ising_system.toml", "heisenberg_haar.toml"] {
        let out = bin(&["validate", "--config", &example(name)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn validate_names_bad_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(
        &path,
        "init_class = \"trotter_rpps\"\nbeta_grid = [1.0]\nsamples = 4\nl_list = [4]\noutput_path = \"x\"\n[system]\nkind = \"heisenberg\"\n",
    )
    .unwrap();
    let out = bin(&["validate", "--config", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("trotter"));
}

#[test]
fn preset_run_writes_each_series() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = bin(&["run", "--preset", "fig2", "--L", "4,6", "--samples", "8", "--seed", "3", "--out", out_dir, "--threads", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for label in ["haar", "trotter_transverse_ising", "trotter_mixed_ising"] {
        let summary = fs::read_to_string(dir.path().join(label).join("summary.csv")).unwrap();
        assert_eq!(summary.lines().count(), 3);
        assert!(summary.lines().nth(1).unwrap().ends_with(",8,3"));
    }
}

#[test]
fn config_run_overrides_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = bin(&[
        "run",
        "--config",
        &example("heisenberg_haar.toml"),
        "--L",
        "4",
        "--samples",
        "4",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run_json = fs::read_to_string(out_dir.join("run.json")).unwrap();
    assert!(run_json.contains("\"samples\": 4"));
}

#[test]
fn large_sizes_need_full_scale() {
    let out = bin(&["run", "--preset", "fig4", "--L", "16", "--samples", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--full-scale"));
}

#[test]
fn unknown_preset_is_rejected() {
    assert!(!bin(&["preset", "fig7"]).status.success());
    let out = bin(&["preset", "fig1"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("delta = 5.0"));
}
