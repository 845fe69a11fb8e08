use serde_json::Value;
use std::path::Path;
use std::process::Command;

fn cmc(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cmc")).args(args).output().expect("cmc runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path).unwrap().lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn column(rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let k = rows[0].iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows[1..].iter().map(|r| r[k].parse().unwrap()).collect()
}

#[test]
fn clifford_surface_is_a_closed_torus() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("clifford.obj");
    let (code, _, err) = cmc(&["surface", "--family", "clifford", "--grid", "48", "32", "--out", obj.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let r = json(&obj.with_extension("json"));
    assert_eq!(r["mesh"]["euler_characteristic"], 0);
    assert_eq!(r["mesh"]["boundary_edges"], 0);
    assert!(r["H_num"].as_f64().unwrap().abs() < 1e-2);
    let text = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 48 * 32);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 48 * 32);
}

#[test]
fn delaunay_profile_matches_elliptic_formula() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("d.obj");
    let prof = dir.path().join("d.csv");
    let (code, _, err) = cmc(&[
        "surface", "--family", "delaunay", "--a_r", "0.3", "--b_r", "0.5", "--grid", "8", "160", "--out", obj.to_str().unwrap(), "--profile",
        prof.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let rows = csv_rows(&prof);
    let v = column(&rows, "v");
    let want = column(&rows, "v_formula");
    assert!(!v.is_empty());
    let worst = v.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-5, "{worst}");
    assert_eq!(json(&obj.with_extension("json"))["mesh"]["euler_characteristic"], 1);
}

#[test]
fn reality_violation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let xi = dir.path().join("bad.json");
    let z = [[0.0, 0.0], [0.0, 0.0]];
    let one = [[1.0, 0.0], [0.0, 0.0]];
    let body = serde_json::json!({"g": 0, "coeffs": [[z, one], [[[0.0, 0.0], [0.0, 0.0]], [[0.5, 0.0], [0.0, 0.0]]]]});
    std::fs::write(&xi, body.to_string()).unwrap();
    let obj = dir.path().join("bad.obj");
    let (code, _, err) = cmc(&["surface", "--xi", xi.to_str().unwrap(), "--grid", "8", "8", "--out", obj.to_str().unwrap()]);
    assert_eq!(code, 1, "{err}");
    assert!(err.contains("reality"), "{err}");
    assert!(!obj.exists());
}

#[test]
fn small_grid_is_a_schema_error() {
    let (code, _, _) = cmc(&["surface", "--family", "clifford", "--grid", "4", "8", "--out", "never.obj"]);
    assert_eq!(code, 3);
}

#[test]
fn check_revolution_and_perturbation() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("rev.json");
    let p = cmc_core::families::RevolutionParams::new(0.0, 0.25).unwrap();
    let d = cmc_core::families::revolution_family(&p).unwrap();
    std::fs::write(&data, d.to_json()).unwrap();
    let out = dir.path().join("report.json");
    let (code, _, err) = cmc(&["check", "--data", data.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let r = json(&out);
    assert_eq!(r["pass"], true);
    assert_eq!(r["G"]["g"], 2);

    let mut v: Value = serde_json::from_str(&d.to_json()).unwrap();
    v["b"][1] = serde_json::json!(v["b"][1].as_f64().unwrap() * 1.01);
    std::fs::write(&data, v.to_string()).unwrap();
    let (code, _, _) = cmc(&["check", "--data", data.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);
    let r = json(&out);
    assert_eq!(r["C"]["pass"], false);
    assert!(r["C"]["residual0"].as_f64().unwrap() > 1e-4);

    std::fs::write(&data, "{\"a\": [1, 0, 0.25], \"b\": [0, ").unwrap();
    let (code, _, err) = cmc(&["check", "--data", data.to_str().unwrap()]);
    assert_eq!(code, 3, "{err}");
    let (code, _, _) = cmc(&["check", "--data", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code, 3);
}

#[test]
fn flow_zero_and_mobius() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("zero.csv");
    let (code, _, err) = cmc(&["flow", "--family", "revolution", "--alpha", "0.25", "--c", "zero", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let rows = csv_rows(&out);
    for name in ["a0", "b1", "kappa0", "kappa1"] {
        let c = column(&rows, name);
        assert!(c.iter().all(|x| *x == c[0]), "{name} moved");
    }
    assert!(json(&out.with_extension("json"))["pass"].as_bool().unwrap());

    let out = dir.path().join("mobius.csv");
    let (code, _, err) = cmc(&["flow", "--family", "revolution", "--alpha", "0.25", "--c", "mobius", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let rows = csv_rows(&out);
    let h = column(&rows, "H");
    assert!(h.iter().all(|x| (x - h[0]).abs() < 1e-8));
    let k0 = column(&rows, "kappa0");
    assert!((k0[k0.len() - 1] - k0[0]).abs() > 1e-3);
}

#[test]
fn flow_target_branch_advances_linearly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("target.csv");
    let (code, _, err) = cmc(&[
        "flow", "--family", "revolution", "--alpha", "0.25", "--mobius", "0.3", "--target-branch", "0", "--t-final", "0.05", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let rows = csv_rows(&out);
    let t = column(&rows, "t");
    let d = column(&rows, "delta_beta");
    for (ti, di) in t.iter().zip(&d) {
        assert!((di - d[0] - ti).abs() < 1e-5, "t {ti}: Delta advanced {}", di - d[0]);
    }
    assert!((t[t.len() - 1] - 0.05).abs() < 1e-12);
}

#[test]
fn delta_scan_of_clifford_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("delta.csv");
    let (code, _, err) = cmc(&["delta", "--family", "clifford", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let r = json(&out.with_extension("json"));
    let ks: Vec<f64> = r["points"].as_array().unwrap().iter().map(|p| p["kappa"].as_f64().unwrap()).collect();
    assert_eq!(ks.len(), 3);
    for (k, want) in ks.iter().zip([-1.0, 0.0, 1.0]) {
        assert!((k - want).abs() < 1e-8);
    }
    assert!(std::fs::read_to_string(&out).unwrap().lines().skip(1).all(|l| l.ends_with(",true")));
    let first = std::fs::read(&out).unwrap();
    let (code, _, _) = cmc(&["delta", "--family", "clifford", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read(&out).unwrap(), first, "output is not deterministic");

    let (code, _, _) = cmc(&["delta", "--family", "clifford", "--window", "2", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(json(&out.with_extension("json"))["points"].as_array().unwrap().is_empty());
}

#[test]
fn verify_subset() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify.json");
    let (code, stdout, _) = cmc(&["verify", "--only", "12", "13", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count(), 2);
    assert_eq!(json(&out)["criteria"].as_array().unwrap().len(), 2);
}
