use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn problems() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../problems")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_algebroid")).args(args).output().expect("binary runs")
}

fn problem(name: &str) -> String {
    problems().join(name).display().to_string()
}

#[test]
fn fiber_of_sqrt() {
    let out = run(&["fiber", "--problem", &problem("sqrt_z.json"), "--at", "4+0i"]);
    assert_eq!(out.status.code(), Some(0));
    let summary = String::from_utf8(out.stderr).unwrap();
    assert!(summary.contains("sheet 1: -2\n") && summary.contains("sheet 2: 2\n"), "{summary}");
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn monodromy_is_a_transposition() {
    let out = run(&["monodromy", "--problem", &problem("sqrt_z.json"), "--around", "0", "--radius", "0.5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["cycle_type"], serde_json::json!([2]));
    assert_eq!(v["permutation"], serde_json::json!([2, 1]));
    assert!(String::from_utf8(out.stderr).unwrap().contains("cycle type (2)"));
}

#[test]
fn fmt_residual_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["fmt", "--problem", &problem("sqrt_zm1.json"), "--target", "value:0", "--rmin", "2", "--rmax", "100"];
    let out = run(&[&args[..], &["--out-dir", d, "--format", "json"]].concat());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("fmt.json")).unwrap()).unwrap();
    assert!(v["max_deviation"].as_f64().unwrap() < 0.05);
    assert_eq!(v["manifest"], "fmt.manifest.json");
    let m: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("fmt.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["status"], "passed");
    assert_eq!(m["outputs"], serde_json::json!(["fmt.json"]));
    assert_eq!(m["inputs"].as_object().unwrap().len(), 1);

    // an impossible tolerance turns the check into an assertion failure
    let out = run(&[&args[..], &["--tol", "1e-300"]].concat());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = run(&["nevanlinna", "--problem", &problem("sqrt_zm1.json"), "--steps", "12", "--out-dir", d.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("nevanlinna.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert!(String::from_utf8(read(&a)).unwrap().starts_with("# manifest: nevanlinna.manifest.json\nr,T,"));
}

#[test]
fn smt_writes_table_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "smt",
        "--problem",
        &problem("sqrt_z.json"),
        "--targets",
        &problem("smt_targets.json"),
        "--rmin",
        "10",
        "--rmax",
        "1e4",
        "--steps",
        "30",
        "--delta",
        "0.05",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("smt.json")).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["coefficient"], 1);
    assert!(dir.path().join("smt.csv").exists());
}

#[test]
fn curvature_ops() {
    let out = run(&["curvature", "--op", "jacobi", "--profile", &problem("kappa_linear.json")]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["curvature", "--op", "kfactor", "--profile", &problem("kappa_hyperbolic.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["curvature", "--op", "hfactor", "--profile", &problem("volume_quartic.json"), "--delta", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    for line in csv.lines().skip(1) {
        let h: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((h[1] - 0.5).abs() < 1e-10 && (h[2] - 0.5).abs() < 1e-10, "{line}");
    }
    // a volume profile is not a curvature profile
    let out = run(&["curvature", "--op", "jacobi", "--profile", &problem("volume_quartic.json")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn errors_name_their_kind() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"curve\": {\n    \"backend\": \"exact\",,\n").unwrap();
    let out = run(&["define", "--problem", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("Parse") && err.contains("line 3, column 24"), "{err}");

    // W = 1/z has a pole at 0
    let pole = dir.path().join("pole.json");
    std::fs::write(&pole, r#"{"curve": {"backend": "exact", "components": [["1", "z"]]}, "disk_radius": 5}"#).unwrap();
    let out = run(&["fiber", "--problem", pole.to_str().unwrap(), "--at", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error: PoleAtBase"), "{err}");
}

#[test]
fn branch_and_define_on_a_cusp() {
    let out = run(&["branch", "--problem", &problem("cusp.json"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["branch_divisor_degree"], 1);
    assert_eq!(v["comparison_holds"], true);
    let out = run(&["define", "--problem", &problem("cusp.json"), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["components"][0]["discriminant"], "4*z^3");
}

#[test]
fn track_around_the_branch_point_swaps_sheets() {
    let out = run(&["track", "--problem", &problem("sqrt_z.json"), "--path", &problem("circle_path.json"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["sheets"][0]["end_sheet"], 2);
    assert_eq!(v["sheets"][1]["end_sheet"], 1);
}
