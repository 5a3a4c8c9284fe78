use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use vfm_cli::config::FieldConfig;
use vfm_cli::RunManifest;

fn vfm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vfm")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn catalog_lists_five_kinds() {
    let out = vfm(&["catalog"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for kind in ["constant", "rotation", "shear", "flat", "grid_sampled"] {
        assert!(text.lines().any(|l| l.starts_with(kind)), "{kind} missing from\n{text}");
    }
}

#[test]
fn catalog_json_examples_parse_as_configs() {
    let out = vfm(&["catalog", "--json"]);
    assert_eq!(code(&out), 0);
    let entries: Value = serde_json::from_slice(&out.stdout).unwrap();
    let entries = entries.as_array().unwrap();
    assert_eq!(entries.len(), 5);
    for e in entries {
        let cfg: FieldConfig = serde_json::from_value(e["example"].clone()).unwrap();
        cfg.build().unwrap();
    }
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(code(&vfm(&["catalog", "--bogus"])), 2);
    assert_eq!(code(&vfm(&["no-such-command"])), 2);
}

#[test]
fn config_errors_name_the_key_and_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"scenario": {"name": "lp", "grid": 64}}"#);
    let out = vfm(&["lp", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid"));
    let cfg = write_config(dir.path(), r#"{"scenario": {"name": "lp", "grid_n": 64}}"#);
    let out = vfm(&["balance", "--config", &cfg]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("`lp`"));
}

#[test]
fn audit_decay_on_rotation_fits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = vfm(&["audit-decay", "--out", dir.path().to_str().unwrap(), "--workers", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(dir.path().join("decay_report.json"));
    assert_eq!(report["schema"], "vfm.decay-report/1");
    let c = report["report"]["c_min"].as_f64().unwrap();
    assert!((c - 2.0).abs() < 1e-2, "C_min = {c}");
    let manifest = RunManifest::read(dir.path()).unwrap();
    assert!(manifest.passed);
    assert!(manifest.verify(dir.path()).unwrap().is_empty());
    assert_eq!(manifest.files.iter().map(|f| f.path.as_str()).collect::<Vec<_>>(), ["config.json", "decay_report.json", "sweep.csv"]);
}

#[test]
fn covering_with_seed_seven_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|tag| {
            let out_dir = dir.path().join(tag);
            let out = vfm(&["covering", "--seed", "7", "--out", out_dir.to_str().unwrap()]);
            assert_eq!(code(&out), 0);
            std::fs::read(out_dir.join("certificate_000.json")).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    let cert: Value = serde_json::from_slice(&runs[0]).unwrap();
    assert_eq!(cert["schema"], "vfm.certificate/1");
    assert_eq!(cert["config_hash"].as_str().unwrap().len(), 64);
    for key in ["K", "sumRp", "sumR100", "sumV_over_delta", "sumF_over_delta_lambda", "bound"] {
        assert!(cert["chain"][key].is_f64(), "{key}");
    }
}

#[test]
fn weak_type_one_cell_stays_below_two_hundred() {
    let dir = tempfile::tempdir().unwrap();
    let out = vfm(&["weak-type", "--out", dir.path().to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0);
    let manifest: RunManifest = serde_json::from_slice(&out.stdout).unwrap();
    assert!(manifest.passed);
    let result = read_json(dir.path().join("weak_type.json"));
    let sup = result["sup_ratio"].as_f64().unwrap();
    assert!(sup > 0.0 && sup <= 200.0, "{sup}");
}

#[test]
fn failed_assertion_exits_one_and_echoes_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"scenario": {"name": "lp", "grid_n": 32, "tolerance": 0.0}}"#);
    let out = vfm(&["lp", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("reconstruction error"));
    let manifest = RunManifest::read(dir.path().join("o")).unwrap();
    assert!(!manifest.passed);
    assert_eq!(manifest.failures.len(), 2);
}

#[test]
fn plotdata_flattens_results_and_checks_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&vfm(&["audit-decay", "--out", d.join("decay").to_str().unwrap()])), 0);
    assert_eq!(code(&vfm(&["maximal", "--out", d.join("max").to_str().unwrap()])), 0);
    assert_eq!(code(&vfm(&["covering", "--out", d.join("cov").to_str().unwrap()])), 0);
    let plots = d.join("plots");
    let cases = [
        ("decay/decay_report.json", "decay_plot.csv", "tau,ratio,envelope"),
        ("max/omega.json", "omega_plot.csv", "row,col,s"),
        ("cov/certificate_000.json", "certificate_plot.csv", "member,contained_in,slack"),
    ];
    for (input, file, header) in cases {
        let out = vfm(&["plotdata", "--input", d.join(input).to_str().unwrap(), "--out", plots.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let text = std::fs::read_to_string(plots.join(file)).unwrap();
        assert_eq!(text.lines().next(), Some(header));
        assert!(text.lines().count() > 1);
    }
    let out = vfm(&["plotdata", "--input", d.join("max/omega.json").to_str().unwrap(), "--kind", "certificate"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema mismatch"));
}
