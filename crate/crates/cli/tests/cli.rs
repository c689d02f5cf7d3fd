use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use gaussmap::bianalytic::{solve_ef, EfResult, RationalFn};
use gaussmap::conjsim::{conj_canonical, ConjClass};
use gaussmap::weierstrass::catalog;
use gaussmap::MobiusMat;
use num_complex::Complex64;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaussmap")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn classify_matrix_examples() {
    let v = stdout_json(&run(&["classify-matrix", "1", "1", "0", "1"]));
    assert_eq!(v["class"]["tag"]["type"], "UNIPOTENT");
    assert_eq!(v["e_set"]["points"], serde_json::json!(["infinity"]));

    let v = stdout_json(&run(&["classify-matrix", "e 0 0 1/e"]));
    assert_eq!(v["class"]["tag"]["type"], "DIAG");
    assert!((v["class"]["tag"]["u"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["e_set"]["points"].as_array().unwrap().len(), 2);

    let v = stdout_json(&run(&["classify-matrix", "1 0 0 1"]));
    assert_eq!(v["class"]["tag"]["u"], 0.0);
    assert_eq!(v["e_set"]["kind"], "circline");
    assert_eq!(v["e_set"]["circline"]["kind"], "line");
}

#[test]
fn classify_matrix_renormalizes_with_notice() {
    let o = run(&["classify-matrix", "2 0 0 2"]);
    let v = stdout_json(&o);
    assert!(v["notice"].is_string());
    assert!(String::from_utf8_lossy(&o.stderr).contains("notice"));
    assert_eq!(code(&run(&["classify-matrix", "1 2 2 4"])), 3);
    assert_eq!(code(&run(&["classify-matrix", "1 2 3"])), 3);
}

#[test]
fn classify_hyperplane_examples() {
    let v = stdout_json(&run(&["classify-hyperplane", "1", "0", "i", "i"]));
    assert_eq!(v["class"]["tag"]["type"], "PARABOLIC");
    assert!((v["class"]["invariant_i"]["finite"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let v = stdout_json(&run(&["classify-hyperplane", "0 0 0 1"]));
    assert_eq!(v["class"]["tag"]["type"], "TOTALLY_REAL_TIME");

    let v = stdout_json(&run(&["classify-hyperplane", "0.76159 i 0 0"]));
    assert_eq!(v["class"]["tag"]["type"], "HYPERBOLIC");
    assert!((v["class"]["tag"]["u"].as_f64().unwrap() - 1.0).abs() < 1e-4);
    assert!(v["mobius"].is_object());

    assert_eq!(code(&run(&["classify-hyperplane", "0 0 0 0"])), 3);
}

#[test]
fn solve_ef_examples() {
    let v = stdout_json(&run(&["solve-ef", "--p", "1", "--q", "w^3"]));
    assert_eq!(v["kind"], "discrete");
    let roots = v["result"]["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 2);
    let mut re: Vec<f64> = roots.iter().map(|r| r["root"][0].as_f64().unwrap()).collect();
    re.sort_by(f64::total_cmp);
    assert!((re[0] + 1.0).abs() < 1e-9 && (re[1] - 1.0).abs() < 1e-9);
    assert_eq!(v["result"]["index_sum"], 2);

    let v = stdout_json(&run(&["solve-ef", "--p", "1", "--q", "w^6"]));
    let flags: Vec<&str> = v["bounds"]["flags"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    assert!(flags.contains(&"FLAT_FORCED_DEGREE"), "{flags:?}");

    let v = stdout_json(&run(&["solve-ef", "--p", "w", "--q", "1"]));
    assert_eq!(v["kind"], "circline");

    assert_eq!(code(&run(&["solve-ef", "--p", "w^2-1", "--q", "w-1"])), 3);
    assert_eq!(code(&run(&["solve-ef", "--p", "exp(w)", "--q", "1"])), 3);
}

#[test]
fn solve_ef_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("roots.csv");
    let o = run(&["solve-ef", "--p", "1", "--q", "w^4", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re,im,index,winding,residual,low_confidence"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn json_round_trips_bit_for_bit() {
    let v = stdout_json(&run(&["solve-ef", "--p", "1+0.3i*w", "--q", "w^3-0.2"]));
    let parsed: EfResult = serde_json::from_value(v["result"].clone()).unwrap();
    let f = RationalFn::new(
        vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.3)],
        vec![Complex64::new(-0.2, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    )
    .unwrap();
    assert_eq!(parsed, solve_ef(&f).unwrap());

    let v = stdout_json(&run(&["classify-matrix", "1+i 2 0.5 -i"]));
    let parsed: ConjClass = serde_json::from_value(v["class"].clone()).unwrap();
    let m: MobiusMat = serde_json::from_value(v["matrix"].clone()).unwrap();
    assert_eq!(parsed, conj_canonical(&m));
}

#[test]
fn gen_surface_catalog_with_total_curvature() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("graph.obj");
    let o = run(&[
        "gen-surface", "catalog", "elliptic-graph", "--param", "n=2", "--annulus", "0.5", "2", "--grid", "8x16",
        "--total-curvature", "--dual", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let obj = std::fs::read_to_string(&out).unwrap();
    let v_lines = obj.lines().filter(|l| l.starts_with("v ")).count();
    let t_lines = obj.lines().filter(|l| l.starts_with("# t ")).count();
    assert_eq!((v_lines, t_lines), (8 * 16, 8 * 16));
    for face in obj.lines().filter(|l| l.starts_with("f ")) {
        for idx in face.split_whitespace().skip(1) {
            let k: usize = idx.parse().unwrap();
            assert!((1..=v_lines).contains(&k));
        }
    }
    let report = read_json(&dir.path().join("graph.report.json"));
    let total = report["total_curvature"]["value"].as_f64().unwrap();
    assert!((total + 8.0 * PI).abs() < 0.01 * 8.0 * PI, "{total}");
    assert!(report["null_residual"].as_f64().unwrap() < 1e-12);
    assert!(report["dual"]["domination_residual"].as_f64().unwrap() < 1e-12);
    assert!(dir.path().join("graph.dual.obj").exists());
}

#[test]
fn gen_surface_families() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("par.csv");
    let o = run(&["gen-surface", "family", "parabolic", "--psi", "z", "--f", "1", "--grid", "5x4", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().next(), Some("z_re,z_im,x1,x2,x3,x4,lambda2,K"));
    assert_eq!(csv.lines().count(), 1 + 20);

    // At alpha = pi/2 the surface lies in the hyperplane x4 = const.
    let out = dir.path().join("ell.csv");
    let o = run(&[
        "gen-surface", "family", "elliptic", "--alpha", "pi/2", "--psi", "z", "--g", "z", "--grid", "6x6", "--format",
        "csv", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    for line in csv.lines().skip(1) {
        let x4: f64 = line.split(',').nth(5).unwrap().parse().unwrap();
        assert!(x4.abs() < 1e-12, "{line}");
    }
}

#[test]
fn gen_surface_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|k| dir.path().join(format!("s{k}.obj"))).collect();
    for p in &paths {
        let o = run(&["gen-surface", "catalog", "parabolic-exp", "--rect", "-1", "1", "-1", "1", "--grid", "6x5", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
}

#[test]
fn period_obstruction_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.obj");
    let o = run(&["gen-surface", "family", "elliptic", "--alpha", "pi/2", "--psi", "z", "--g", "1", "--punctures", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let report = read_json(&dir.path().join("e.report.json"));
    assert!(report["error"].as_str().unwrap().contains("period"));
}

#[test]
fn validate_wdata() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("w.json");
    let w = catalog("elliptic-rational").unwrap().wdata;
    std::fs::write(&input, serde_json::to_string(&w).unwrap()).unwrap();
    let v = stdout_json(&run(&["validate-wdata", input.to_str().unwrap()]));
    assert!(v["violations"].as_array().unwrap().is_empty());

    let o = run(&["validate-wdata", "--psi1", "z", "--psi2", "0", "--f", "1"]);
    assert_eq!(code(&o), 2);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!v["gap_zeros"].as_array().unwrap().is_empty());

    let o = run(&["validate-wdata", "--psi1", "1/z", "--psi2", "0", "--f", "z^2", "--punctures", "0", "--loops", "0:0.5"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["loops"].as_array().unwrap().len(), 2);

    assert_eq!(code(&run(&["validate-wdata", "--psi1", "z"])), 3);
}

#[test]
fn hyperplane_area() {
    let v = stdout_json(&run(&["hyperplane-area", "IV", "--alpha", "0.6"]));
    assert_eq!(v["result"]["result"], "FINITE");
    assert!((v["result"]["value"].as_f64().unwrap() - 4.0 * PI).abs() < 1e-3);
    let v = stdout_json(&run(&["hyperplane-area", "III", "--u", "1", "--exhaustion", "10"]));
    assert_eq!(v["result"]["result"], "DIVERGES");
    assert_eq!(code(&run(&["hyperplane-area", "IV"])), 3);
}

#[test]
fn configuration_errors_exit_3() {
    assert_eq!(code(&run(&["solve-ef", "--p", "1", "--q", "w^2", "--format", "obj"])), 3);
    assert_eq!(code(&run(&["classify-matrix", "1 0 0 1", "--tol", "-1"])), 3);
    assert_eq!(code(&run(&["gen-surface", "catalog", "no-such-surface", "--out", "/tmp/x.obj"])), 3);
    assert_eq!(code(&run(&["gen-surface", "catalog", "elliptic-graph"])), 3);
    assert_eq!(code(&run(&["gen-surface", "family", "elliptic", "--alpha", "1.5708", "--psi", "z", "--g", "1", "--out", "/tmp/x.obj"])), 3);
    assert_eq!(code(&run(&["no-such-command"])), 3);
    assert_eq!(code(&run(&["solve-ef", "--p", "1"])), 3);
    assert_eq!(code(&run(&["--help"])), 0);
}
