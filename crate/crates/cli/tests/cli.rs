use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = "realizations = 4\nblocks = 3\nalpha_step = 0.25\nebn0_grid = [0, 10]\n";

fn trofdm(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trofdm"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("small.toml");
    std::fs::write(&path, SMALL).unwrap();
    path.display().to_string()
}

#[test]
fn validate_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = trofdm(&["validate", "--out", "o"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("o/validate.csv")).unwrap();
    assert!(csv.starts_with("check,value,lower,upper,pass\n"));
    assert!(!csv.contains(",false"));
}

#[test]
fn sr_vs_alpha_schema_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = trofdm(
        &["sr-vs-alpha", "--config", &cfg, "--out", "o", "--seed", "5"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("o/sr-vs-alpha.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "bor,alpha,sr_emp,sr_emp_clamped,sr_bound,sinr_bob_emp,sinr_bob_bound,sinr_eve_emp,sinr_eve_bound,ci_halfwidth"
    );
    assert_eq!(lines.count(), 3 * 5);
    assert!(!csv.contains('\r'));

    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("o/sr-vs-alpha.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["master_seed"], 5);
    assert_eq!(manifest["config"]["realizations"], 4);
    assert_eq!(manifest["rows"], 15);
    assert!(
        manifest["exclusions"]["eve_coin_flip_symbols"]
            .as_u64()
            .unwrap()
            > 0
    );
}

#[test]
fn every_subcommand_runs_on_small_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    for cmd in ["ber-vs-snr", "ber-vs-alpha", "alpha-opt"] {
        let out = trofdm(&[cmd, "--config", &cfg, "--out", "o"], dir.path());
        assert!(
            out.status.success(),
            "{cmd}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(dir.path().join(format!("o/{cmd}.csv")).exists());
    }
    let rows = std::fs::read_to_string(dir.path().join("o/ber-vs-snr.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 2 * 6);
}

#[test]
fn config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    for (text, key) in [
        ("alpha = 1.5\n", "alpha"),
        ("q = 256\nbor = 3\n", "bor"),
        ("speed = 2\n", "speed"),
    ] {
        std::fs::write(dir.path().join("bad.toml"), text).unwrap();
        let out = trofdm(&["validate", "--config", "bad.toml"], dir.path());
        assert_eq!(out.status.code(), Some(2));
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(&format!("`{key}`")), "{err}");
    }
    let out = trofdm(&["plot"], dir.path());
    assert!(!out.status.success());
}
