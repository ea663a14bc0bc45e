use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn psilab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psilab"))
        .args(args)
        .env_remove("PSILAB_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "invalid JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

/// Writes a disk OFF file and a matching hat field CSV.
fn disk_inputs(dir: &Path) -> (String, String) {
    let mesh = dir.join("disk.off");
    let out = psilab(&["curvature", "--surface", "disk:1:12", "--write-mesh", mesh.to_str().unwrap()]);
    assert!(out.status.success());
    let summary = stdout_json(&out);
    let n = summary["vertices"].as_u64().unwrap() as usize;

    let text = std::fs::read_to_string(&mesh).unwrap();
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    assert_eq!(lines.next().unwrap().trim(), "OFF");
    lines.next();
    let mut csv = String::from("vertex_index,value\n");
    for (i, line) in lines.take(n).enumerate() {
        let xyz: Vec<f64> = line.split_whitespace().map(|t| t.parse().unwrap()).collect();
        let r = (xyz[0] * xyz[0] + xyz[1] * xyz[1]).sqrt();
        let v = 1.0 - r;
        csv.push_str(&format!("{i},{}\n", if v > 1e-9 { v } else { 0.0 }));
    }
    let field = dir.join("u.csv");
    std::fs::write(&field, csv).unwrap();
    (mesh.to_str().unwrap().to_string(), field.to_str().unwrap().to_string())
}

#[test]
fn constants_table_reports_unit_ps_and_talenti() {
    let out = psilab(&["constants", "--n", "3", "--p", "2", "--K", "0", "--iso", "brendle:1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["ps"].as_f64().unwrap(), 1.0);
    assert!((v["talenti"].as_f64().unwrap() - 0.42725).abs() < 1e-4);
    assert_eq!(v["reading"], "corrected");
    assert!(v["spectral_gap_literal"].is_number());
}

#[test]
fn constants_csv_lists_rows() {
    let out = psilab(&["constants", "--n", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("name,value\n"));
    assert!(text.contains("\nPS,"));
}

#[test]
fn ps_on_disk_from_files_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (mesh, field) = disk_inputs(dir.path());
    let out = psilab(&[
        "verify", "ps", "--mesh", &mesh, "--field", &field, "--p", "2", "--K", "0", "--iso", "brendle:1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = stdout_json(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["inequality_id"], "polya_szego");
    assert_eq!(r["pass"], true);
    let ratio = r["ratio"].as_f64().unwrap();
    assert!((0.97..=1.03).contains(&ratio), "ratio {ratio}");
}

#[test]
fn batch_of_exponents_keeps_order_and_is_deterministic() {
    let args = [
        "verify", "ps", "--surface", "disk:1:12", "--field-fn", "hat:1", "--p", "1,1.5,2", "--jobs", "3",
    ];
    let a = psilab(&args);
    let b = psilab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let ps: Vec<f64> = stdout_json(&a)
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["inputs"]["p"].as_f64().unwrap())
        .collect();
    assert_eq!(ps, vec![1.0, 1.5, 2.0]);
}

#[test]
fn counterexample_divergence_is_not_a_failure() {
    let out = psilab(&["counterexample", "--p", "2", "--lambda", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["rows"][0]["plane_grad_p"], "divergent");

    let csv = psilab(&["counterexample", "--p", "2", "--lambda", "10", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().contains("divergent"));
}

#[test]
fn counterexample_threshold_and_slope() {
    let out = psilab(&["counterexample", "--p", "1.5", "--lambda", "10,100,1000", "--N", "1,10"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let slope = v["slopes"][0]["slope"].as_f64().unwrap();
    assert!((slope / 1.5 - 1.0).abs() < 0.1, "slope {slope}");
    let bars: Vec<f64> = v["lambda_bar"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["lambda_bar"].as_f64().unwrap())
        .collect();
    assert!(bars[0] <= bars[1]);
}

#[test]
fn closed_sphere_is_a_domain_error() {
    let out = psilab(&["verify", "ps", "--surface", "sphere:2", "--field-fn", "const:1", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("curvature bound violated"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(psilab(&["verify", "ps", "--p", "2"]).status.code(), Some(2));
    assert_eq!(psilab(&["constants"]).status.code(), Some(2));
    assert_eq!(psilab(&["constants", "--n", "2", "--iso", "bogus"]).status.code(), Some(2));
    assert_eq!(psilab(&["counterexample", "--p", "1.5", "--lambda", "0.5"]).status.code(), Some(2));
    assert_eq!(psilab(&["--jobs", "0", "constants", "--n", "2"]).status.code(), Some(2));
}

#[test]
fn failed_check_exits_one() {
    // Under the literal reading the extremal violates the inequality.
    let out = psilab(&["verify", "gn", "--radial", "gn:3:2:3.5", "--p", "2", "--q", "3.5", "--reading", "literal"]);
    assert_eq!(out.status.code(), Some(1));
    let r = stdout_json(&out);
    assert_eq!(r["pass"], false);
    assert!(r["lhs"].as_f64().unwrap() > r["rhs"].as_f64().unwrap());
}

#[test]
fn radial_checks_reach_equality() {
    let gn = psilab(&["verify", "gn", "--radial", "gn:3:2:4", "--p", "2", "--q", "4"]);
    assert!(gn.status.success());
    assert!((stdout_json(&gn)["ratio"].as_f64().unwrap() - 1.0).abs() < 1e-6);

    let gap = psilab(&["verify", "gap", "--radial", "eigen:2:1"]);
    assert!(gap.status.success());
    assert!((stdout_json(&gap)["ratio"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn rearrange_writes_profile_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let out = psilab(&[
        "rearrange", "--surface", "disk:1:8", "--field-fn", "hat:1", "--format", "csv", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("radius,value\n"));
    assert!(text.lines().count() > 3);
}

#[test]
fn rearrange_accepts_weighted_samples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dmf.csv");
    std::fs::write(&path, "weight,value\n1,2\n1,1\n2,0.5\n").unwrap();
    let out = psilab(&["rearrange", "--dmf", path.to_str().unwrap(), "--interp", "step"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["total_weight"].as_f64().unwrap(), 4.0);
    assert_eq!(v["knots"].as_array().unwrap().len(), 3);
}

#[test]
fn plot_data_is_whitespace_columns() {
    let out = psilab(&["counterexample", "--p", "1.5", "--lambda", "10,20", "--plot-data"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with('#'));
    assert_eq!(lines.next().unwrap().split_whitespace().count(), 5);
}

#[test]
fn monotonicity_preset_runs() {
    let out = psilab(&[
        "verify", "monotonicity", "--surface", "disk:1:12", "--field-fn", "hat:1", "--preset", "sobolev:1.5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["inequality_id"], "monotonicity_principle");
}
