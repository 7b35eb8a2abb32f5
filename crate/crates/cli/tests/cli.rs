use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_kuramoto-eq"));
    c.env_remove("KURAMOTO_EQ_OUT");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap()
}

fn files(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            let bytes = fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    out.sort();
    out
}

#[test]
fn reproduce_fig1() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["reproduce", "fig1", "-o", "fig1"]);
    let s = json(dir.path().join("fig1/summary.json"));
    for j in ["j1", "j3"] {
        assert!(s[j]["residual"].as_f64().unwrap() < 1e-10);
        assert!(s[j]["nonlinear_drift"].as_f64().unwrap() < 1e-5);
    }
    let long = fs::read_to_string(dir.path().join("fig1/spacetime_j1_original.csv")).unwrap();
    assert!(long.starts_with("t,node,phase\n"));
    assert_eq!(long.lines().count(), 1 + 101 * 50);
}

#[test]
fn reproduce_fig2_is_a_rotating_wave() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["reproduce", "fig2", "-o", "fig2"]);
    let s = json(dir.path().join("fig2/summary.json"));
    for tag in ["phi1", "phi_half_pi"] {
        let r = &s["runs"][tag];
        let want = r["expected_rotation_rate"].as_f64().unwrap();
        for key in ["rotation_rate_original", "rotation_rate_analytical"] {
            assert!((r[key].as_f64().unwrap() - want).abs() < 1e-6, "{tag} {key}");
        }
        assert!(r["locking_error"].as_f64().unwrap() < 1e-5);
    }
}

#[test]
fn reproduce_fig3() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["reproduce", "fig3", "-o", "fig3"]);
    let s = json(dir.path().join("fig3/summary.json"));
    for k in 0..3 {
        let r = &s[format!("offset{k}")];
        assert!(r["residual"].as_f64().unwrap() <= 1e-9);
        assert!(r["nonlinear_drift"].as_f64().unwrap() < 1e-5);
    }
    let side = json(dir.path().join("fig3/matrix.json"));
    assert_eq!(side["n"], 50);
    assert_eq!(side["flags"]["symmetric"], false);
}

#[test]
fn reproduce_fig4() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["reproduce", "fig4", "--seed", "2", "-o", "fig4"]);
    let s = json(dir.path().join("fig4/summary.json"));
    assert_eq!(s["seed"], 2);
    assert!(s["eigen_residual"].as_f64().unwrap() <= 1e-6);
    assert!(s["max_R_designed"].as_f64().unwrap() < 0.05);
    let r = fs::read_to_string(dir.path().join("fig4/order_parameter.csv")).unwrap();
    assert!(r.starts_with("t,R_original,R_designed\n"));
    let last: Vec<f64> = r.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last[0], 5.0);
    let m = json(dir.path().join("fig4/manifest.json"));
    assert_eq!(m["seeds"]["graph"], 2);
}

#[test]
fn reproduce_example1() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["reproduce", "example1", "-o", "ex"]);
    let s = json(dir.path().join("ex/summary.json"));
    assert!(s["residual"].as_f64().unwrap() <= 1e-12);
    assert_eq!(s["recovered_from_eigenvectors"], true);
    assert_eq!(s["lambda"][0], -1.0);
    assert_eq!(s["lambda"][1], -1.0);
    let cert = json(dir.path().join("ex/certificate.json"));
    assert_eq!(cert["accepted"], true);
    assert_eq!(cert["source"], "user");
}

#[test]
fn manifest_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["build", "--kind", "er", "-n", "30", "-p", "0.3", "--seed", "9", "-o", "g/er.csv"]);
    ok(
        d,
        &["simulate", "g/er.csv", "--theta0", "random:4", "--model", "both", "-T", "0.5", "-o", "s/traj.csv"],
    );
    ok(d, &["reproduce", "example1", "-o", "ex"]);
    for (manifest, folder) in [("g/er.manifest.json", "g"), ("s/traj.manifest.json", "s"), ("ex/manifest.json", "ex")] {
        let before = files(&d.join(folder));
        ok(d, &["reproduce", "--from-manifest", manifest]);
        assert_eq!(before, files(&d.join(folder)), "{manifest}");
    }
    let m = json(d.join("s/traj.manifest.json"));
    assert_eq!(m["seeds"]["theta0"], 4);
    assert_eq!(m["inputs"][0]["path"], "g/er.csv");
    assert!(!fs::read_to_string(d.join("s/traj.manifest.json")).unwrap().contains("time\""));
}

#[test]
fn manifest_rerun_rejects_changed_input() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["build", "--kind", "complete", "-n", "4", "-o", "k4.csv"]);
    ok(d, &["spectrum", "k4.csv", "-o", "spec.json"]);
    fs::write(d.join("k4.csv"), "0,1,1,1\n1,0,1,1\n1,1,0,1\n1,1,1,0.5\n").unwrap();
    let out = run(d, &["reproduce", "--from-manifest", "spec.manifest.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("changed"));
}

#[test]
fn verify_rejects_non_equilibrium() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["build", "--kind", "complete", "-n", "3", "-o", "k3.csv"]);
    fs::write(d.join("theta.csv"), "0,0.1,0.2\n").unwrap();
    let out = run(d, &["verify", "k3.csv", "theta.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("residual"));
    let cert = json(d.join("certificate.json"));
    assert_eq!(cert["accepted"], false);

    fs::write(d.join("roots.csv"), format!("0\n{}\n{}\n", 2.0 * std::f64::consts::PI / 3.0, -2.0 * std::f64::consts::PI / 3.0)).unwrap();
    ok(d, &["verify", "k3.csv", "roots.csv", "-o", "roots.json"]);
    assert_eq!(json(d.join("roots.json"))["accepted"], true);
}

#[test]
fn verify_with_lag_and_per_node_lags() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["build", "--kind", "circulant", "--row", "0,0,1,1", "-o", "ex.csv"]);
    fs::write(d.join("theta.json"), "[0, 1.5707963267948966, 3.141592653589793, -1.5707963267948966]").unwrap();
    ok(d, &["verify", "ex.csv", "theta.json", "--phi", "0.7853981633974483"]);
    let cert = json(d.join("certificate.json"));
    assert_eq!(cert["lambda"]["re"], -1.0);
    assert_eq!(cert["lambda"]["im"], -1.0);
    fs::write(d.join("lags.csv"), "0.7853981633974483\n0.7853981633974483\n0.7853981633974483\n0.7853981633974483\n").unwrap();
    ok(d, &["verify", "ex.csv", "theta.json", "--phi-file", "lags.csv"]);
    let out = run(d, &["verify", "ex.csv", "theta.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_and_input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run(d, &["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(d, &["build", "--kind", "ring", "-n", "10"]).status.code(), Some(2));
    assert_eq!(run(d, &["reproduce"]).status.code(), Some(2));
    fs::write(d.join("bad.csv"), "0,1\n1,zz\n").unwrap();
    let out = run(d, &["spectrum", "bad.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.csv:2:2"));
    fs::write(d.join("m.json"), "{\n  \"tool\": \"kuramoto-eq\",\n  oops\n}").unwrap();
    let out = run(d, &["reproduce", "--from-manifest", "m.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m.json:3:"));
}

#[test]
fn build_matrix_round_trips_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let row: [f64; 6] = [0.0, 0.1, 1.0 / 3.0, 2.5e-300, -7.25e12, 0.1 + 0.2];
    let text: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
    ok(d, &["build", "--kind", "circulant", "--row", &text.join(","), "-o", "c.csv"]);
    let csv = fs::read_to_string(d.join("c.csv")).unwrap();
    let first: Vec<f64> = csv.lines().next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    for (got, want) in first.iter().zip(row) {
        assert_eq!(got.to_bits(), want.to_bits());
    }
    // Rebuilding a join from the written files reproduces the same bytes.
    ok(d, &["build", "--kind", "ring", "-n", "6", "-k", "2", "-o", "r.csv"]);
    ok(d, &["build", "--kind", "join", "--c", "r.csv", "--d", "r.csv", "--alpha", "0.25", "--beta", "0.75", "-o", "j1.csv"]);
    ok(d, &["build", "--kind", "join", "--c", "r.csv", "--d", "r.csv", "--alpha", "0.25", "--beta", "0.75", "-o", "j2.csv"]);
    assert_eq!(fs::read(d.join("j1.csv")).unwrap(), fs::read(d.join("j2.csv")).unwrap());
    let side = json(d.join("c.json"));
    assert_eq!(side["generator"], "circulant");
    assert_eq!(side["n"], 6);
}

#[test]
fn gcirc_build_from_map() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("coeffs.json"), r#"{"0,0": 0, "0,1": 1, "1,0": 1, "1,1": 1}"#).unwrap();
    ok(d, &["build", "--kind", "gcirc", "--group", "2,2", "--coeff-map", "coeffs.json", "-o", "k4.csv"]);
    assert_eq!(fs::read_to_string(d.join("k4.csv")).unwrap(), "0.0,1.0,1.0,1.0\n1.0,0.0,1.0,1.0\n1.0,1.0,0.0,1.0\n1.0,1.0,1.0,0.0\n");
    fs::write(d.join("partial.json"), r#"{"0,1": 1}"#).unwrap();
    let out = run(d, &["build", "--kind", "gcirc", "--group", "2,2", "--coeff-map", "partial.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn equilibria_and_spectrum_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["build", "--kind", "ring", "-n", "12", "-k", "3", "-o", "r.csv"]);
    ok(d, &["spectrum", "r.csv", "-o", "s.json", "--vectors", "v.csv"]);
    let s = json(d.join("s.json"));
    assert_eq!(s["method"], "circulant");
    assert_eq!(s["values"].as_array().unwrap().len(), 12);
    assert_eq!(s["values"][0]["re"], 6.0);
    let v = fs::read_to_string(d.join("v.csv")).unwrap();
    assert_eq!(v.lines().count(), 13);

    ok(d, &["equilibria", "r.csv", "-o", "e.json"]);
    let e = json(d.join("e.json"));
    let certs = e["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 12);
    assert!(certs.iter().all(|c| c["source"] == "twisted" && c["accepted"] == true));

    ok(d, &["equilibria", "r.csv", "--phase-lag", "0.5", "-o", "lagged.json"]);
    let l = json(d.join("lagged.json"));
    // Only states with a vanishing eigenvalue survive a lag that is not a multiple of pi.
    for c in l["certificates"].as_array().unwrap() {
        assert!(c["lambda"]["re"].as_f64().unwrap().abs() < 1e-9);
    }
}

#[test]
fn design_writes_artifacts_and_rejects_literal_reconstruction() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["design", "--er-n", "40", "--er-p", "0.3", "--seed", "5", "-j", "1", "--scale", "10", "-o", "des"]);
    let report = json(d.join("des/design.json"));
    assert!(report["eigen_residual"].as_f64().unwrap() <= 1e-6);
    assert_eq!(json(d.join("des/certificate.json"))["source"], "designed");
    ok(d, &["verify", "des/designed.csv", "des/theta0.csv", "-o", "check.json"]);

    let out = run(d, &["design", "--er-n", "40", "--er-p", "0.3", "--seed", "5", "--repair", "none", "-o", "lit"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("overlap"));
    let bad = run(d, &["design", "-j", "0", "-o", "zero"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn simulate_sweep_matches_individual_runs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["build", "--kind", "ring", "-n", "10", "-k", "2", "-o", "r.csv"]);
    ok(d, &["simulate", "r.csv", "--theta0", "random:1", "-T", "0.3", "--sweep", "phi=0,0.5,1.5", "-o", "sw.csv"]);
    for (k, phi) in ["0", "0.5", "1.5"].iter().enumerate() {
        let name = format!("one{k}.csv");
        ok(d, &["simulate", "r.csv", "--theta0", "random:1", "-T", "0.3", "--phi", phi, "-o", &name]);
        assert_eq!(
            fs::read(d.join(format!("sw_sweep{k}.csv"))).unwrap(),
            fs::read(d.join(&name)).unwrap()
        );
    }
}

#[test]
fn simulate_columns_and_display_frequency() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["build", "--kind", "ring", "-n", "8", "-k", "1", "-o", "r.csv"]);
    ok(
        d,
        &[
            "simulate", "r.csv", "--theta0", "twisted:1", "--model", "analytical", "-T", "0.1",
            "--emit-order-parameter", "--omega", "10", "-o", "a.csv",
        ],
    );
    let text = fs::read_to_string(d.join("a.csv")).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 1 + 8 + 8 + 1);
    assert_eq!(header[9], "abs_1");
    assert_eq!(*header.last().unwrap(), "R");
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    // Node 1 starts at 0; the display adds omega * t = 1.
    assert!((last[1] - 1.0).abs() < 1e-9);
    assert!(last[17] < 1e-12);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("outputs");
    let status = bin()
        .current_dir(dir.path())
        .env("KURAMOTO_EQ_OUT", &out_dir)
        .args(["build", "--kind", "complete", "-n", "5"])
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    assert!(out_dir.join("matrix.csv").exists());
    assert!(out_dir.join("matrix.json").exists());
    assert!(out_dir.join("matrix.manifest.json").exists());
}
