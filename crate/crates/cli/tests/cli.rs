use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpnodes"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// 17 significant digits: one leading digit and 16 after the point.
fn has_full_precision(field: &str) -> bool {
    let mantissa = field.trim_start_matches('-').split('e').next().unwrap();
    mantissa.len() == 18 && mantissa.as_bytes()[1] == b'.'
}

#[test]
fn nodes_mp_csv() {
    let csv = ok(&["nodes", "--family", "mp", "--n", "2"]);
    assert_eq!(csv.lines().next(), Some("x,y,weight"));
    let r = rows(&csv);
    assert_eq!(r.len(), 6);
    assert!(r.iter().flatten().all(|f| has_full_precision(f)));
    let total: f64 = r.iter().map(|row| num(&row[2])).sum();
    assert!((total - 1.0).abs() < 1e-14);
}

#[test]
fn nodes_padua_json() {
    let doc: Value = serde_json::from_str(&ok(&["nodes", "--family", "padua", "--n", "4", "--format", "json"])).unwrap();
    assert_eq!(doc["points"].as_array().unwrap().len(), 15);
    assert_eq!(doc["family"], "padua");
}

#[test]
fn nodes_meshes_flag_extras() {
    let r = rows(&ok(&["nodes", "--family", "mesh-a", "--n", "2"]));
    assert_eq!(r.len(), 8);
    let extras: Vec<_> = r.iter().filter(|row| row[3] == "1").collect();
    assert_eq!(extras.len(), 2);
    assert_eq!(num(&extras[1][0]), -1.0);
    let doc: Value = serde_json::from_str(&ok(&["nodes", "--family", "mesh-b", "--n", "3", "--format", "json"])).unwrap();
    assert_eq!(doc["extras"].as_array().unwrap().len(), 2);
    assert_eq!(doc["nu"], 3);
    assert_eq!(rows(&ok(&["nodes", "--family", "emp", "--n", "4"])).len(), 15);
}

#[test]
fn invalid_degree_is_usage_error() {
    assert_eq!(code(&["nodes", "--family", "mp", "--n", "3"]), 2);
    assert_eq!(code(&["nodes", "--family", "bogus", "--n", "2"]), 2);
}

#[test]
fn unwritable_output_is_io_error() {
    assert_eq!(code(&["nodes", "--family", "mp", "--n", "2", "--out", "/nonexistent/dir/x.csv"]), 1);
}

#[test]
fn lebesgue_equispaced_low_degree() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("lam.csv");
    ok(&["lebesgue", "--n", "2", "--grid", "equi", "--m", "51", "--method", "direct", "--out", path_str(&out)]);
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().next(), Some("x,y,lambda"));
    assert_eq!(rows(&csv).len(), 51 * 51);
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("lam.report.json")).unwrap()).unwrap();
    for key in [
        "n", "mesh", "constant", "argmax", "corner_value", "fit_lower", "fit_upper", "cubic_bound",
        "fast_fallback_count",
    ] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["mesh"]["kind"], "equi");
    assert_eq!(report["mesh"]["m"], 51);
    let c = report["constant"].as_f64().unwrap();
    assert!((5.76..=6.25).contains(&c), "{c}");
}

#[test]
fn lebesgue_auto_agrees_with_direct() {
    let report: Value = serde_json::from_str(&ok(&["lebesgue", "--n", "8", "--m", "101"])).unwrap();
    assert!(report["fast_direct_max_rel_diff"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn lebesgue_high_degree_fast() {
    let report: Value = serde_json::from_str(&ok(&["lebesgue", "--n", "30", "--m", "100", "--method", "fast"])).unwrap();
    let argmax = report["argmax"].as_array().unwrap();
    assert!(argmax.iter().all(|v| v.as_f64().unwrap().abs() == 1.0));
    let c = report["constant"].as_f64().unwrap();
    assert!((484.0..=552.25).contains(&c), "{c}");
    assert!(report["fast_direct_max_rel_diff"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn lebesgue_emp_family() {
    let report: Value = serde_json::from_str(&ok(&["lebesgue", "--n", "6", "--family", "emp"])).unwrap();
    assert_eq!(report["family"], "emp");
    assert!(report["constant"].as_f64().unwrap() < 28.0);
}

#[test]
fn growth_default_range() {
    let csv = ok(&["growth", "--n-min", "2", "--n-max", "30", "--step", "2"]);
    assert_eq!(
        csv.lines().next(),
        Some("n,lambda,corner,corner_formula,fit_lower,fit_upper,cubic_bound,mesh_size,seconds")
    );
    let r = rows(&csv);
    assert_eq!(r.len(), 15);
    for row in &r {
        let (lambda, lo, hi, cubic) = (num(&row[1]), num(&row[4]), num(&row[5]), num(&row[6]));
        assert!(lo <= lambda && lambda <= hi, "{row:?}");
        assert!(lambda <= cubic);
        assert_eq!(num(&row[8]), 0.0);
    }
}

#[test]
fn growth_is_increasing() {
    let r = rows(&ok(&["growth", "--n-max", "10"]));
    let lambdas: Vec<f64> = r.iter().map(|row| num(&row[1])).collect();
    assert!(lambdas.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn growth_rejects_empty_range() {
    assert_eq!(code(&["growth", "--n-min", "4", "--n-max", "2", "--step", "2"]), 2);
    assert_eq!(code(&["growth", "--n-min", "2", "--n-max", "6", "--step", "3"]), 2);
}

#[test]
fn cubature_check_rows() {
    let csv = ok(&["cubature-check", "--n", "6"]);
    assert_eq!(csv.lines().next(), Some("n,i,j,value,abs_error"));
    assert!(rows(&csv).iter().all(|row| num(&row[4]) < 1e-11));
    let r = rows(&ok(&["cubature-check", "--n", "2"]));
    let find = |i: &str, j: &str| r.iter().find(|row| row[1] == i && row[2] == j).unwrap().clone();
    assert!((num(&find("0", "0")[3]) - 1.0).abs() < 1e-14);
    assert!(num(&find("1", "1")[3]).abs() < 1e-12);
    assert_eq!(r.len(), 15);
    let sweep = rows(&ok(&["cubature-check", "--n", "4", "--sweep"]));
    assert_eq!(sweep.len(), 15 + 45);
    assert_eq!(code(&["cubature-check", "--n", "5"]), 2);
}

#[test]
fn mesh_certify_passes() {
    let csv = ok(&["mesh-certify", "--n", "6", "--mu", "3", "--variant", "a", "--trials", "100"]);
    let r = rows(&csv);
    assert_eq!(r.len(), 100);
    for row in &r {
        assert!(num(&row[7]) <= 2.0, "{row:?}");
        assert_eq!(row[8], "0");
    }
    assert_eq!(code(&["mesh-certify", "--n", "6", "--mu", "2", "--trials", "10"]), 2);
}

#[test]
fn curve_samples() {
    let r = rows(&ok(&["curve", "--n", "6", "--samples", "11"]));
    assert_eq!(r.len(), 11);
    assert_eq!((num(&r[0][1]), num(&r[0][2])), (-1.0, -1.0));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    for cmd in [
        vec!["mesh-certify", "--n", "4", "--variant", "mp2", "--trials", "20", "--seed", "9"],
        vec!["lebesgue", "--n", "12", "--m", "41"],
        vec!["growth", "--n-max", "8"],
    ] {
        let mut outputs = Vec::new();
        for (k, threads) in ["1", "0"].iter().enumerate() {
            let out = dir.path().join(format!("{}-{k}.csv", cmd[0]));
            let mut args = cmd.clone();
            args.extend(["--threads", threads, "--out", path_str(&out)]);
            ok(&args);
            let mut bytes = fs::read(&out).unwrap();
            if cmd[0] == "lebesgue" {
                bytes.extend(fs::read(out.with_extension("report.json")).unwrap());
            }
            outputs.push(bytes);
        }
        assert_eq!(outputs[0], outputs[1], "{:?}", cmd);
    }
}

#[test]
fn seed_changes_random_output() {
    let a = ok(&["mesh-certify", "--n", "3", "--trials", "3", "--seed", "1"]);
    let b = ok(&["mesh-certify", "--n", "3", "--trials", "3", "--seed", "2"]);
    assert_ne!(a, b);
}
