use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pdolab(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pdolab"));
    cmd.args(args).env_remove("PDOLAB_SEED");
    if let Some(s) = env_seed {
        cmd.env("PDOLAB_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn write_spec(dir: &Path, body: &str) -> String {
    let p = dir.join("spec.json");
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn report(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), r#"{"seed": 4, "shots_per_setting": 2000}"#);
    let out_dir = dir.path().join("out");
    let out = pdolab(&["run", &spec, "--out", out_dir.to_str().unwrap()], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["report.json", "coefficients.csv", "counts.csv"] {
        assert!(out_dir.join(f).is_file(), "{f} missing");
    }
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(r["provenance"]["seed"], 4);
    assert!(r["chsh"]["13"]["value"].as_f64().unwrap() > 2.0);
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let with_seed = write_spec(dir.path(), r#"{"seed": 5, "mode": "exact"}"#);
    let seed_of = |out: &Output| report(out)["provenance"]["seed"].as_u64().unwrap();
    assert_eq!(seed_of(&pdolab(&["tomo", &with_seed], Some("9"))), 5);
    assert_eq!(seed_of(&pdolab(&["tomo", &with_seed, "--seed", "8"], Some("9"))), 8);
    let no_seed = write_spec(dir.path(), r#"{"mode": "exact"}"#);
    assert_eq!(seed_of(&pdolab(&["tomo", &no_seed], Some("9"))), 9);
    assert_eq!(seed_of(&pdolab(&["tomo", &no_seed], None)), 0);
}

#[test]
fn flags_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), r#"{"seed": 1, "source": {"visibility": 0.5}}"#);
    let r = report(&pdolab(&["chsh", &spec, "--exact", "--visibility", "1.0", "--shots", "10"], None));
    assert_eq!(r["spec"]["mode"], "exact");
    assert_eq!(r["spec"]["shots_per_setting"], 10);
    let c12 = r["chsh"]["12"]["value"].as_f64().unwrap();
    assert!((c12 - 8f64.sqrt()).abs() < 1e-9);
    assert!(r.get("reconstruction").is_none());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_spec(dir.path(), r#"{"source": {"visibility": 1.7}}"#);
    let out = pdolab(&["run", &bad], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("source.visibility"));

    let syntax = write_spec(dir.path(), "{\"seed\": }");
    let out = pdolab(&["run", &syntax], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let ok = write_spec(dir.path(), r#"{"seed": 1}"#);
    assert_eq!(pdolab(&["run", &ok, "--visibility", "-0.1"], None).status.code(), Some(2));
    assert_eq!(pdolab(&["run", "/nonexistent/spec.json"], None).status.code(), Some(2));
    assert_eq!(pdolab(&["run", &ok], Some("abc")).status.code(), Some(2));
}

#[test]
fn demo_disturbance() {
    let r = report(&pdolab(&["demo-disturbance"], None));
    assert!((r["undisturbed"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert!(r["disturbed"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn stdout_report_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), r#"{"seed": 12, "shots_per_setting": 1000}"#);
    let a = pdolab(&["run", &spec], None);
    let b = pdolab(&["run", &spec], None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
