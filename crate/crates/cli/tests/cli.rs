use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spherecurve")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", &path]);
    let o = run(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn classify(path: &str) -> Value {
    let o = run(&["classify", path]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn circles_classify_by_turns() {
    let dir = tempfile::tempdir().unwrap();
    for k in 1..=4 {
        let ks = k.to_string();
        let p = gen(dir.path(), "c.json", &["circle", "--rho", "0.8", "--k", &ks, "--kappa1", "0", "--n", "256"]);
        let v = classify(&p);
        assert_eq!(v["n"], 3);
        let want = if k <= 3 { k } else { 2 };
        assert_eq!(v["j"], want, "k = {k}");
        assert_eq!(v["parity"], if k % 2 == 0 { 1 } else { -1 });
    }
}

#[test]
fn neither_example_classifies_as_neither() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen(dir.path(), "n.json", &["neither-example"]);
    let v = classify(&p);
    assert_eq!(v["status"], "neither");
    assert_eq!(v["condensed"], false);
    assert_eq!(v["diffuse"], false);
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"kappa1\": 0, \"n\": ").unwrap();
    let o = run(&["classify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["classify", dir.path().join("missing.json").to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn bending_path_validates() {
    let o = run(&["bend", "--k", "1", "--steps", "9"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let last: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(last["pass"], true);
    assert_eq!(last["frames"], 9);
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn bending_below_the_critical_bound_fails() {
    let o = run(&["bend", "--k", "1", "--kappa1", "0.9"]);
    assert!(!o.status.success());
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = gen(dir.path(), "a.json", &["bending-frame", "--k", "2", "--s", "0.3"]);
    let b = gen(dir.path(), "b.json", &["bending-frame", "--k", "2", "--s", "0.3"]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let ca = run(&["--seed", "7", "classify", &a]);
    let cb = run(&["--seed", "7", "classify", &b]);
    assert_eq!(ca.stdout, cb.stdout);
}

#[test]
fn written_curves_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let a = gen(dir.path(), "a.json", &["circle", "--rho", "1.1", "--k", "3", "--n", "128"]);
    let first = std::fs::read_to_string(&a).unwrap();
    let v: Value = serde_json::from_str(&first).unwrap();
    let o = run(&["loops", &a, "--count", "0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let w: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    for key in ["kappa1", "kappa2", "n", "v_hat", "w_hat", "q0"] {
        assert_eq!(v[key], w[key], "{key}");
    }
    assert_eq!(w["tot_before"], w["tot_after"]);
    assert_eq!(v["kappa1"], "-inf");
    assert_eq!(v["q0"].as_array().unwrap().len(), 9);
}

#[test]
fn band_profiles_of_a_circle_are_constant() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen(dir.path(), "c.json", &["circle", "--rho", "1.0", "--k", "2", "--kappa1", "-1", "--n", "256"]);
    let o = run(&["bands", &p, "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<(f64, f64)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[2].parse().unwrap(), r[3].parse().unwrap())
        })
        .collect();
    assert!(rows.len() >= 64);
    for (p, m) in &rows {
        assert!((p - rows[0].0).abs() < 1e-8 && (m - rows[0].1).abs() < 1e-8);
        assert!(p > m);
    }
}

#[test]
fn grafting_a_diffuse_curve_does_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen(dir.path(), "c.json", &["circle", "--rho", "0.5", "--k", "1"]);
    let o = run(&["graft", &p, "--mode", "auto"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let last: Value = serde_json::from_str(stdout(&o).lines().last().unwrap()).unwrap();
    assert_eq!(last["status"], "diffuse");
    assert_eq!(last["grafts"], 0);
}

#[test]
fn antipodal_graft_conserves_the_frame() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen(dir.path(), "c.json", &["circle", "--rho", "0.3", "--k", "2", "--kappa1", "-1", "--n", "256"]);
    let o = run(&["graft", &p, "--mode", "antipodal", "--step", "0.4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let last: Value = serde_json::from_str(stdout(&o).lines().last().unwrap()).unwrap();
    assert!(last["frame_residual"].as_f64().unwrap() < 1e-7);
}

#[test]
fn shrink_output_validates() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen(dir.path(), "c.json", &["circle", "--rho", "0.6", "--k", "2", "--kappa1", "0.5", "--n", "256"]);
    let path = dir.path().join("path.jsonl").to_string_lossy().into_owned();
    let o = run(&["shrink", &p, "--steps", "7", "-o", &path]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["validate", &path, "--kappa1", "0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["pass"], true);
}
