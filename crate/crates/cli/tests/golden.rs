//! Each subcommand at tiny sizes, compared byte for byte against stored
//! CSV files. Set `PLANEWAVE_BLESS=1` to rewrite the stored files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn run(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planewave"))
        .arg(sub)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .env_remove("PLANEWAVE_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn csv_files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    v.sort();
    v
}

fn golden(sub: &str, expected: &[&str]) {
    let tmp = tempfile::tempdir().unwrap();
    let config = fixtures().join("fixtures").join(format!("{sub}.json"));
    let out = run(sub, &config, tmp.path(), &["--threads", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(csv_files(tmp.path()), expected);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], sub);
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);

    let dir = fixtures().join("golden").join(sub);
    let bless = std::env::var_os("PLANEWAVE_BLESS").is_some();
    if bless {
        std::fs::create_dir_all(&dir).unwrap();
    }
    for name in expected {
        let got = std::fs::read_to_string(tmp.path().join(name)).unwrap();
        let path = dir.join(name);
        if bless {
            std::fs::write(&path, &got).unwrap();
        } else {
            let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(got, want, "{sub}/{name}");
        }
    }
}

#[test]
fn linsolve() {
    golden("linsolve", &["linsolve_convergence.csv"]);
}

#[test]
fn eig_convergence_free_is_zero() {
    golden("eig-convergence", &["eig_convergence.csv"]);
    let text = std::fs::read_to_string(fixtures().join("golden/eig-convergence/eig_convergence.csv")).unwrap();
    assert_eq!(text, "N,lambda_err,h1_dist\n2,0,0\n4,0,0\n");
}

#[test]
fn gp_solve() {
    golden("gp-solve", &["gp_decay.csv", "gp_newton.csv", "gp_scan.csv"]);
}

#[test]
fn strip_estimate() {
    golden("strip-estimate", &["decay.csv"]);
}

#[test]
fn blowup() {
    golden("blowup", &["trajectory.csv", "x_mu_boundary.csv"]);
    let tmp = tempfile::tempdir().unwrap();
    let out = run("blowup", &fixtures().join("fixtures/blowup.json"), tmp.path(), &[]);
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("blowup_report.json")).unwrap()).unwrap();
    assert_eq!(report["lower_bound_verified"], true);
}

#[test]
fn bands() {
    golden("bands", &["bands.csv"]);
}

#[test]
fn bz_convergence() {
    golden("bz-convergence", &["bz_convergence.csv"]);
}

#[test]
fn parallel_output_matches_sequential() {
    for sub in ["bz-convergence", "gp-solve"] {
        let config = fixtures().join("fixtures").join(format!("{sub}.json"));
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert!(run(sub, &config, a.path(), &["--threads", "1"]).status.success());
        assert!(run(sub, &config, b.path(), &["--threads", "3"]).status.success());
        for name in csv_files(a.path()) {
            assert_eq!(
                std::fs::read(a.path().join(&name)).unwrap(),
                std::fs::read(b.path().join(&name)).unwrap(),
                "{sub}/{name}"
            );
        }
    }
}

#[test]
fn malformed_config_exits_2_with_location() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bad.json");
    std::fs::write(&config, "{\n  \"epsilon\": 0.1,\n  \"mu\": ,\n}").unwrap();
    let out = run("gp-solve", &config, tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "config");
    assert_eq!(err["line"], 3);
}

#[test]
fn unknown_key_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bad.json");
    std::fs::write(&config, r#"{"epsilon": 0.1, "mu": 0.5, "N": 16, "colour": 1}"#).unwrap();
    let out = run("gp-solve", &config, tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn numeric_failure_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("below_one.json");
    std::fs::write(
        &config,
        r#"{"potential": {"kind": "cosine", "offset": 1.0, "amplitude": 1.0}, "source": {"kind": "sine", "mu": 1.0}, "N": 8}"#,
    )
    .unwrap();
    let out = run("linsolve", &config, tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["kind"], "precondition_violated");
}

#[test]
fn env_overrides_config_out_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("c.json");
    let target = tmp.path().join("from_env");
    std::fs::write(
        &config,
        r#"{"potential": {"kind": "constant", "value": 0}, "N_list": [2], "N_ref": 4, "A_claim": 1, "out_dir": "ignored"}"#,
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_planewave"))
        .args(["eig-convergence", "--config"])
        .arg(&config)
        .env("PLANEWAVE_OUT_DIR", &target)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(target.join("eig_convergence.csv").exists());
}

#[test]
fn mismatched_experiment_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run("bands", &fixtures().join("fixtures/blowup.json"), tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
}
