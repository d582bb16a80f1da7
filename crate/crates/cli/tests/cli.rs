use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_suris-lab")).args(args).env_remove("SURIS_LAB_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn beta_of_free_map() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "zero.json", r#"{"suris": {"A": 0, "B": 0, "C": 0, "D": 0}}"#);
    let o = lab(&["beta", "--potential", &zero, "--p", "1", "--q", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "p,q,beta\n1,4,0.03125\n");
}

#[test]
fn pinned_free_orbit() {
    let o = lab(&["orbit", "--p", "1", "--q", "4", "--pin", "0.0"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let pts: Vec<f64> = serde_json::from_value(v["result"]["points"].clone()).unwrap();
    for (a, b) in pts.iter().zip([0.0, 0.25, 0.5, 0.75]) {
        assert!((a - b).abs() < 1e-12);
    }
    assert_eq!(v["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["command"]["orbit"]["q"], 4);
}

#[test]
fn orthogonality_experiment_passes() {
    let o = lab(&["rigidity", "orthogonality", "--eps", "0.02", "--qmax", "32"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["passed"], true);
}

#[test]
fn threshold_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let half = write(dir.path(), "half.json", r#"{"suris": {"A": 0, "B": 0, "C": -0.03, "D": 0.04}}"#);
    assert_eq!(lab(&["rigidity", "obstruction", "--potential", &half]).status.code(), Some(2));
    let flat = write(dir.path(), "flat.json", r#"{"constant": 0.5}"#);
    assert_eq!(lab(&["rigidity", "obstruction", "--potential", &flat]).status.code(), Some(0));
}

#[test]
fn errors_exit_one() {
    assert_eq!(lab(&["orbit", "--bogus"]).status.code(), Some(1));
    let o = lab(&["beta", "--potential", "/nonexistent/v.json", "--p", "1", "--q", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/v.json"));
    assert_eq!(lab(&["beta", "--p", "2", "--q", "8"]).status.code(), Some(1));
    assert_eq!(lab(&["beta", "--p", "1", "--q", "3", "--tol", "-1"]).status.code(), Some(1));
    assert_eq!(lab(&["orbit", "--q", "3"]).status.code(), Some(1));
    assert_eq!(lab(&["spectrum", "--out", "/nonexistent/dir/out.csv"]).status.code(), Some(1));
}

#[test]
fn outputs_are_atomic_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let pot = write(dir.path(), "v.json", r#"{"suris": {"A": 0.01, "B": -0.02, "C": 0.015, "D": 0.01}}"#);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = lab(&["spectrum", "--potential", &pot, "--qmax", "9", "--format", "json", "--out", out.to_str().unwrap(), "--threads", "2"]);
        assert!(o.status.success());
        assert!(o.stdout.is_empty());
    }
    let (ta, tb) = (std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
    // only the echoed output path differs
    assert_eq!(ta.replace("a.json", "X"), tb.replace("b.json", "X"));
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 3);
}

#[test]
fn coefficient_table() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.json", r#"{"trig": {"cos": [0, 0, 0, 1.0], "sin": []}}"#);
    let o = lab(&["coeffs", "--w", &w, "--qmax", "6", "--grid", "256"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,re,im,abs"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 13);
    for r in rows {
        let want = if r[0].abs() == 4.0 { 0.5 } else { 0.0 };
        if r[0].abs() >= 3.0 {
            assert!((r[3] - want).abs() < 1e-12, "{r:?}");
        }
    }
}

#[test]
fn curve_and_chart_headers() {
    let dir = tempfile::tempdir().unwrap();
    let pot = write(dir.path(), "v.json", r#"{"suris": {"A": 0.01, "B": 0.0, "C": -0.03, "D": 0.02}}"#);
    let o = lab(&["curve", "--potential", &pot, "--rho", "0.25", "--samples", "8"]);
    let text = stdout(&o);
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap().trim_start_matches("# ")).unwrap();
    assert!((header["rho_measured"].as_f64().unwrap() - 0.25).abs() < 1e-9);
    assert_eq!(text.lines().nth(1), Some("x,psi"));
    assert_eq!(text.lines().count(), 10);
    let o = lab(&["chart", "--potential", &pot, "--rho", "0.3", "--samples", "4"]);
    let text = stdout(&o);
    assert!(text.lines().nth(1) == Some("x,theta,theta_prime"));
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap().trim_start_matches("# ")).unwrap();
    assert!(header["conjugacy_defect"].as_f64().unwrap() < 1e-6);
}

#[test]
fn phase_portrait_and_schema() {
    let o = lab(&["phase-portrait", "--orbits", "3", "--steps", "5"]);
    assert_eq!(stdout(&o).lines().count(), 1 + 3 * 6);
    let s1 = stdout(&lab(&["phase-portrait", "--orbits", "2", "--steps", "3", "--seed", "9"]));
    let s2 = stdout(&lab(&["phase-portrait", "--orbits", "2", "--steps", "3", "--seed", "9"]));
    assert_eq!(s1, s2);
    assert!(s1.starts_with("# {\"seed\":9}"));
    let o = lab(&["coeffs", "--schema"]);
    assert!(o.status.success() && stdout(&o).contains("q,re,im,abs"));
}

#[test]
fn thread_variable_is_accepted() {
    let o = Command::new(env!("CARGO_BIN_EXE_suris-lab"))
        .args(["spectrum", "--qmax", "5"])
        .env("SURIS_LAB_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).contains("1,4,0.25,0.125,"));
}

#[test]
fn projection_residuals_do_not_grow() {
    let dir = tempfile::tempdir().unwrap();
    let base = write(dir.path(), "base.json", r#"{"suris": {"A": 0.02, "B": 0.0, "C": -0.03, "D": 0.0}}"#);
    let w = write(dir.path(), "w.json", r#"{"trig": {"cos": [0.001, 0.0005], "sin": [0.0, 0.0002]}}"#);
    let o = lab(&["project", "--potential", &base, "--w", &w, "--iterations", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r: Vec<f64> = serde_json::from_value(v["result"]["residual_norms"].clone()).unwrap();
    assert!(r.windows(2).all(|p| p[1] <= p[0]));
}
