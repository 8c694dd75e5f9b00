use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, task: &str, config: &str, extra: &[&str]) -> Output {
    let path = dir.join("run.toml");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_photonwave"))
        .arg(task)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

#[test]
fn negative_length_is_a_config_error_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "evolve", "[grid]\nlengths = [-1.0, 1.0, 1.0]\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "modes", "[grid]\nspacing = 0.1\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn oversized_inputs_exceed_the_budget() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "evolve", "[grid]\npoints = [64, 8, 8]\n", &[]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(dir.path(), "quantize", "[quantize]\nn_max = 255\n", &[]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(dir.path(), "propagator", "[propagator]\npoints = 40\n", &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn single_mode_evolution_conserves_energy() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[grid]\npoints = [8, 8, 8]\n[evolve]\nmodes = [{ n = [1, 2, 0], helicity = -1, amplitude = [0.5, 0.25] }]\n";
    let out = run(dir.path(), "evolve", cfg, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let o = dir.path().join("out");
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(o.join("summary.json")).unwrap()).unwrap();
    let drift = summary["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "evolve.energy_drift")
        .unwrap();
    assert!(drift["value"].as_f64().unwrap() <= 1e-12);
    for f in ["conserved.csv", "amplitudes.csv", "snapshot.bin", "run.log"] {
        assert!(o.join(f).exists(), "{f}");
    }
    let conserved = std::fs::read_to_string(o.join("conserved.csv")).unwrap();
    assert!(conserved.starts_with("t,energy,"));
    assert_eq!(conserved.lines().count(), 17);
}

#[test]
fn tolerance_failure_still_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "modes", "", &["--tol-scale", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "tolerance_failure");
    assert!(summary["failed"].as_u64().unwrap() > 0);
}

#[test]
fn quantize_reports_commutator_sign() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "quantize", "", &["--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seed"], 3);
    assert!(summary["notes"][0].as_str().unwrap().contains("+(i/2)"));
    let sweep = std::fs::read_to_string(dir.path().join("out/commutator_sweep.csv")).unwrap();
    assert_eq!(sweep.lines().next(), Some("cutoff,deviation"));
}
