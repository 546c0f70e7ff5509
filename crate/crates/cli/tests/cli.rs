use std::path::Path;
use std::process::{Command, Output};

fn glv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glv")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn classify_alpha_beta_origin_is_gas() {
    let v = json(&glv(&["classify", "--alpha", "0", "--beta", "0"]));
    assert_eq!(v["label"], "GAS");
    assert_eq!(v["global"]["status"], "GAS");
    assert_eq!(v["certificates"][0]["type"], "Dulac");
}

#[test]
fn classify_reports_invariant_set_witness() {
    let v = json(&glv(&["classify", "--alpha", "0.5", "--beta", "1.5"]));
    assert_eq!(v["label"], "AS-not-GAS");
    assert_eq!(v["global"]["witness"]["lemma"], "L1");
    assert_eq!(v["hopf"], "Supercritical");
}

#[test]
fn classify_all_k() {
    let v = json(&glv(&["classify", "--exponents", "-1,-1,-1,1", "--all-k", "--n", "2"]));
    assert_eq!(v["label"], "GAS");
    assert_eq!(v["scope"]["kind"], "AllKStoichiometric");
}

#[test]
fn zip_case_exits_2() {
    let out = glv(&["classify", "--exponents", "1,1,1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zip"));
}

#[test]
fn missing_file_exits_1() {
    let out = glv(&["parse", "missing.glv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.glv"));
}

#[test]
fn bad_flags_exit_1() {
    assert_eq!(glv(&["classify", "--exponents", "1,2,3"]).status.code(), Some(1));
    assert_eq!(glv(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(glv(&["simulate", "--alpha", "0", "--beta", "0", "--x0", "-1", "--y0", "1"]).status.code(), Some(1));
}

#[test]
fn parse_lowers_network_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("classical.glv");
    std::fs::write(&path, "# classical\ncycle { n = 1; k12 = 1; k23 = 2; k31 = 3; order1 = X^1; order2 = X^1 Y^1; }\n")
        .unwrap();
    let v = json(&glv(&["parse", path.to_str().unwrap()]));
    assert!(v.is_object());
    let c = json(&glv(&["classify", path.to_str().unwrap()]));
    assert_eq!(c["label"], "Center");
}

#[test]
fn equilibrium_jacobian_focal() {
    let e = json(&glv(&["equilibrium", "--exponents", "-1,0,0,1", "--rates", "1,2,3,4"]));
    assert!((e["x"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((e["y"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    let j = json(&glv(&["jacobian", "--alpha", "2", "--beta", "2"]));
    assert!(j["trace"].as_f64().unwrap() > 0.0);
    let f = json(&glv(&["focal", "--alpha", "1.5", "--beta", "0.5"]));
    assert_eq!(f["criticality"], "Supercritical");
}

#[test]
fn simulate_classical_lv_is_periodic() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let out = glv(&[
        "simulate", "--exponents", "1,0,1,1,0,1", "--x0", "2", "--y0", "1", "--tmax", "100", "-o",
        csv.to_str().unwrap(),
    ]);
    let v = json(&out);
    assert_eq!(v["terminal"]["kind"], "PeriodicOrbit");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,x,y\n"));
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(csv.with_extension("json")).unwrap()).unwrap();
    assert_eq!(side, v);
}

#[test]
fn certify_kinds() {
    let d = json(&glv(&["certify", "--kind", "dulac", "--alpha", "1.25", "--beta", "0.5"]));
    assert_eq!(d["branch"], "Triangle");
    assert_eq!(d["verification"]["passed"], true);
    let i = json(&glv(&["certify", "--kind", "invariant-set", "--alpha", "1.5", "--beta", "0.4"]));
    assert_eq!(i["lemma"], "L4");
    let b = json(&glv(&["certify", "--kind", "boundary-curve", "--exponents", "-1,-0.5,-0.5,0"]));
    assert_eq!(b["type"], "BoundaryCurve");
    let f = json(&glv(&["certify", "--kind", "integral", "--exponents", "0,-1,-1,0"]));
    assert_eq!(f["type"], "FirstIntegral");
    let out = glv(&["certify", "--kind", "invariant-set", "--exponents", "-1,-1,-1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

fn file_bytes(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap()
}

#[test]
fn diagram_and_portrait_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let dir = d.path().to_str().unwrap();
        assert!(glv(&["diagram", "--box", "-1,3,-1,3", "--step", "0.05", "--out-dir", dir]).status.success());
        assert!(glv(&["portrait", "--preset", "fig5", "--out-dir", dir]).status.success());
    }
    let sequential = tempfile::tempdir().unwrap();
    let dir = sequential.path().to_str().unwrap();
    assert!(glv(&["--sequential", "diagram", "--out-dir", dir]).status.success());
    assert!(glv(&["--sequential", "portrait", "--preset", "fig5", "--out-dir", dir]).status.success());
    for name in ["diagram.csv", "fig5.csv"] {
        assert_eq!(file_bytes(a.path(), name), file_bytes(b.path(), name));
        assert_eq!(file_bytes(a.path(), name), file_bytes(sequential.path(), name));
    }
    let csv = String::from_utf8(file_bytes(a.path(), "diagram.csv")).unwrap();
    assert_eq!(csv.lines().count(), 81 * 81 + 1);
    for row in ["0,0,GAS", "1,1,Center", "1.5,0.5,GAS", "0.5,1.5,AS-not-GAS", "2,2,Unstable"] {
        assert!(csv.lines().any(|l| l == row), "{row}");
    }
    let svg = String::from_utf8(file_bytes(a.path(), "fig5.svg")).unwrap();
    assert!(svg.contains("stroke=\"red\"") && svg.contains("stroke=\"green\""));
}

#[test]
fn portrait_from_flags() {
    let d = tempfile::tempdir().unwrap();
    let dir = d.path().to_str().unwrap();
    let out = glv(&["portrait", "--alpha", "0.5", "--beta", "0.5", "--tmax", "10", "--out-dir", dir]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(d.path().join("portrait.csv")).unwrap();
    assert!(csv.starts_with("panel,curve,index,x,y\n"));
    assert!(csv.contains(",x-nullcline,") && csv.contains(",trajectory,"));
    assert_eq!(glv(&["portrait", "--preset", "fig1"]).status.code(), Some(1));
}
