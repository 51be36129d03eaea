use std::path::Path;
use std::process::{Command, Output};

use progchan::cxmat::{equal_up_to_global_phase, ComplexMatrix};
use progchan::minimax::{optimal_interaction, CanonicalForm, Sign};
use progchan::random::haar_unitary;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn progchan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_progchan"))
        .args(args)
        .env_remove("PROGCHAN_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_matrix(dir: &Path, name: &str, m: &ComplexMatrix) -> String {
    let p = dir.join(name);
    std::fs::write(&p, m.to_json()).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn worst_case_on_optimal_v_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("optimal-v.json");
    let o = progchan(&["optimal-v", "--sx", "+1", "--sz", "-1", "--out", path_str(&file)]);
    assert_eq!(o.status.code(), Some(0));
    let v = ComplexMatrix::from_json(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert!(v.distance(&optimal_interaction(Sign::Plus, Sign::Minus)) < 1e-15);

    let o = progchan(&["worst-case", "--v", path_str(&file)]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((report["fidelity"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((report["epsilon"].as_f64().unwrap() - 0.866_025_403_784_438_6).abs() < 1e-12);
    assert!(report["argmin_j"].as_u64().unwrap() <= 3);
    for key in ["worst_unitary", "optimal_sigma", "t", "alpha"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    // embedded matrices use the matrix file format
    let w = ComplexMatrix::from_json(&report["worst_unitary"].to_string()).unwrap();
    assert!(w.is_unitary(1e-12));
}

#[test]
fn decompose_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let v = haar_unitary(4, &mut ChaCha8Rng::seed_from_u64(1));
    let vf = write_matrix(dir.path(), "v.json", &v);
    let o = progchan(&["decompose", "--v", &vf]);
    assert_eq!(o.status.code(), Some(0));
    let cf: CanonicalForm = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(cf.reconstruct().distance(&v) < 1e-9);
    assert!(cf.in_chamber(1e-12));
}

#[test]
fn circuit_text_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let v = haar_unitary(4, &mut ChaCha8Rng::seed_from_u64(2));
    let vf = write_matrix(dir.path(), "v.json", &v);
    let circuit = dir.path().join("v.circuit");
    let o = progchan(&[
        "circuit",
        "--v",
        &vf,
        "--local-dir",
        path_str(dir.path()),
        "--out",
        path_str(&circuit),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&circuit).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("LOCAL")).count(), 4);
    assert_eq!(text.lines().filter(|l| l.starts_with("CNOT 0 1")).count(), 4);

    let o = progchan(&["circuit", "--input", path_str(&circuit)]);
    assert_eq!(o.status.code(), Some(0));
    let m = ComplexMatrix::from_json(&stdout(&o)).unwrap();
    assert!(equal_up_to_global_phase(&m, &v, 1e-9));
}

#[test]
fn circuit_from_alpha_has_no_locals() {
    let o = progchan(&["circuit", "--alpha", "pi/4,0,pi/4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains("LOCAL"));
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn fidelity_and_program_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let x = ComplexMatrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]]);
    let uf = write_matrix(dir.path(), "u.json", &x);
    let mixed = ComplexMatrix::identity(2).scale_real(0.5);
    let sf = write_matrix(dir.path(), "sigma.json", &mixed);
    let rf = write_matrix(dir.path(), "rho.json", &ComplexMatrix::from_real_rows([[1.0, 0.0], [0.0, 0.0]]));

    let o = progchan(&["fidelity", "--u", &uf, "--alpha", "pi/4,0,pi/4"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((r["fidelity"].as_f64().unwrap() - 0.25).abs() < 1e-12);

    let o = progchan(&["fidelity", "--u", &uf, "--alpha", "0,0,0", "--sigma", &sf]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r["overlap"].as_f64().unwrap().abs() < 1e-12);

    let o = progchan(&["program", "--alpha", "0,0,0", "--sigma", &sf, "--rho", &rf]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let out = ComplexMatrix::from_json(&r["output"].to_string()).unwrap();
    assert!(out.distance(&ComplexMatrix::from_real_rows([[1.0, 0.0], [0.0, 0.0]])) < 1e-12);
    assert_eq!(r["kraus"].as_array().unwrap().len(), 1);
}

#[test]
fn oracle_is_reproducible_and_seeded_by_env() {
    let args = ["oracle", "--alpha", "0.5,0.3,-0.1", "--resolution", "2000", "--refine", "20"];
    let a = progchan(&args);
    let b = progchan(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r: Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert!(r["gap_to_closed_form"].as_f64().unwrap() >= -1e-9);
    assert!(r["evaluations"].as_u64().unwrap() > 2000);

    let explicit = progchan(&[&args[..], &["--seed", "99"]].concat());
    assert_eq!(explicit.status.code(), Some(0));
    let from_env = Command::new(env!("CARGO_BIN_EXE_progchan"))
        .args(args)
        .env("PROGCHAN_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(from_env.stdout, explicit.stdout);
}

#[test]
fn oracle_trace_and_scan_csv() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let o = progchan(&["oracle", "--alpha", "0,0,0", "--resolution", "100", "--refine", "0", "--trace", path_str(&trace)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&trace).unwrap().lines().count(), 101);

    let csv = dir.path().join("scan.csv");
    let o = progchan(&["scan", "--alpha-grid", "4", "--out", path_str(&csv)]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 64);
    for line in text.lines().skip(1) {
        let f: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((0.0..=0.25 + 1e-12).contains(&f));
    }
}

#[test]
fn verify_suites() {
    let o = progchan(&["verify", "--suite", "all"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("identities") && text.contains("covariance") && text.contains("hadamard"));
    assert!(text.lines().all(|l| !l.contains(" fail ")));
    let o = progchan(&["verify", "--suite", "identities"]);
    assert_eq!(stdout(&o).lines().count(), 4);
    assert_eq!(progchan(&["verify", "--suite", "bogus"]).status.code(), Some(2));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dim": 2, "rows": [[[1,0],[0,0]]]}"#).unwrap();
    assert_eq!(progchan(&["worst-case", "--v", path_str(&bad)]).status.code(), Some(2));
    let nonunitary = write_matrix(dir.path(), "n.json", &ComplexMatrix::identity(4).scale_real(2.0));
    assert_eq!(progchan(&["worst-case", "--v", &nonunitary]).status.code(), Some(2));
    let small = write_matrix(dir.path(), "s.json", &ComplexMatrix::identity(2));
    assert_eq!(progchan(&["decompose", "--v", &small]).status.code(), Some(2));
    assert_eq!(progchan(&["worst-case", "--v", "a", "--alpha", "0,0,0"]).status.code(), Some(2));
    assert_eq!(progchan(&["oracle", "--alpha", "0,0,0", "--resolution", "50"]).status.code(), Some(2));
    assert_eq!(progchan(&[]).status.code(), Some(2));
}
