use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn spinlink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinlink")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = spinlink(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn sweep_single_row() {
    let csv = stdout(&["sweep", "--preset", "line", "--n", "2..2"]);
    assert_eq!(csv.lines().next().unwrap(), "N,t0,f_max,F,E,alpha");
    let r = rows(&csv);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][0], "2");
    assert_eq!(r[0][2], "1.000");
    assert_eq!(r[0][1], "1.57080");
}

#[test]
fn sweep_short_range_reports_boundary() {
    let out = spinlink(&["sweep", "--n", "2..6", "--tmax", "400"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let r = rows(&csv);
    assert_eq!(r.iter().map(|x| x[0].as_str()).collect::<Vec<_>>(), ["2", "3", "4", "5", "6"]);
    assert_eq!(r[2][3], "1.000");
    assert!(String::from_utf8_lossy(&out.stderr).contains("F > 2/3"));
}

#[test]
fn csv_is_byte_stable() {
    let args = ["sweep", "--n", "2..9", "--tmax", "300"];
    assert_eq!(stdout(&args), stdout(&args));
    let args = ["asymptotic", "--n", "100,1000"];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn evolve_two_sites_is_sine() {
    let csv = stdout(&["evolve", "--n", "2", "--tmax", "3.14159", "--step", "0.01"]);
    assert_eq!(csv.lines().next().unwrap(), "t,re_f,im_f,abs_f,F,E");
    let r = rows(&csv);
    assert_eq!(r.len(), 315);
    for row in &r {
        let t: f64 = row[0].parse().unwrap();
        let a: f64 = row[3].parse().unwrap();
        // six significant digits bound the comparison
        assert!((a - t.sin().abs()).abs() <= 5e-6 * a.max(1e-4), "t={t} abs_f={a}");
    }
    assert!(r[0][3].parse::<f64>().unwrap().abs() < 1e-12);
}

#[test]
fn evolve_eight_site_trace_reaches_high_fidelity() {
    let csv = stdout(&["evolve", "--n", "8", "--tmax", "4000", "--step", "0.05"]);
    let best = rows(&csv).iter().map(|r| r[3].parse::<f64>().unwrap()).fold(0.0, f64::max);
    // |f| implied by F = 0.994 (less the tolerance) on the compensated curve
    let needed = (-1.0 / 3.0 + ((1.0f64 / 9.0) + 4.0 / 6.0 * (0.993 - 0.5)).sqrt()) / (1.0 / 3.0);
    assert!(best >= needed, "best {best} < {needed}");
}

#[test]
fn ring_rows_carry_coincidence_columns() {
    let csv = stdout(&["ring", "--n", "2..5", "--tmax", "500"]);
    assert_eq!(csv.lines().next().unwrap(), "N,t0,f_max,F,E,alpha,line_f_max,max_E_diff");
    let r = rows(&csv);
    assert_eq!(r[0][2], "1.000");
    for row in &r {
        assert!(row[7].parse::<f64>().unwrap() < 1e-6);
        assert_eq!(row[2], row[6]);
    }
}

#[test]
fn benzene_preset_runs() {
    let csv = stdout(&["ring", "--preset", "benzene"]);
    let r = rows(&csv);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][0], "3");
    assert_eq!(r[0][6], "");
}

#[test]
fn asymptotic_columns() {
    let out = spinlink(&["asymptotic", "--n", "100,1000,1e12"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "N,t0_formula,E_formula,E_exact_if_feasible");
    let r = rows(&csv);
    assert_eq!(r[1][1], "504.044");
    assert_eq!(r[1][2], "0.134990");
    assert_eq!(r[2][0], "1000000000000");
    assert_eq!(r[2][2], "0.000134990");
    assert_eq!(r[2][3], "");
    assert!(String::from_utf8_lossy(&out.stderr).contains("N=1000000000000"));
    let (formula, exact): (f64, f64) = (r[0][2].parse().unwrap(), r[0][3].parse().unwrap());
    assert!((exact - formula).abs() / formula < 0.05);
}

#[test]
fn graph_file_input() {
    let path = scratch("chain.edges");
    std::fs::write(&path, "# two sites\nsites 2\n1 2 0.5\n").unwrap();
    let csv = stdout(&["sweep", "--preset", "graph", "--graph", path.to_str().unwrap(), "--tmax", "10"]);
    let r = rows(&csv);
    assert_eq!(r[0][0], "2");
    assert_eq!(r[0][2], "1.000");
}

#[test]
fn json_matches_schema() {
    let schema: Value =
        serde_json::from_str(include_str!("../schema/report.schema.json")).expect("schema parses");
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    for args in [
        &["sweep", "--n", "2..5", "--tmax", "200", "--format", "json"][..],
        &["ring", "--preset", "benzene", "--format", "json", "--sites", "1,4"],
        &["evolve", "--n", "3", "--tmax", "1", "--format", "json"],
        &["asymptotic", "--n", "100,1e12", "--format", "json"],
    ] {
        let doc: Value = serde_json::from_str(&stdout(args)).unwrap();
        let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
        assert_eq!(doc["columns"].as_array().unwrap().len(), doc["rows"][0].as_object().unwrap().len());
    }
    let bad = serde_json::json!({"command": "sweep", "preset": "line", "parameters": {"j": 1}, "columns": [], "rows": []});
    assert!(!validator.is_valid(&bad));
}

#[test]
fn svg_written_to_file() {
    let path = scratch("sweep.svg");
    stdout(&["sweep", "--n", "2..6", "--tmax", "100", "--format", "svg", "--out", path.to_str().unwrap()]);
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<rect").count(), 5);
    assert!(svg.contains("<polyline"));
}

#[test]
fn verify_passes_and_catches_fault() {
    let out = spinlink(&["verify", "--max-n", "6"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 9);
    assert!(!text.contains("FAIL"));

    let out = spinlink(&["verify", "--max-n", "4", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL receiver-state"));
}

#[test]
fn config_errors_exit_one() {
    for args in [
        &["sweep", "--n", "5..2"][..],
        &["sweep", "--j=-1"],
        &["sweep", "--step", "2"],
        &["sweep", "--preset", "graph"],
        &["ring", "--preset", "line"],
        &["evolve", "--sites", "1,9", "--n", "4"],
        &["verify", "--max-n", "40"],
        &["nonsense"],
    ] {
        let out = spinlink(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn thread_count_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_spinlink"))
        .args(["sweep", "--n", "2..4", "--tmax", "50"])
        .env("SPINLINK_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_spinlink"))
        .args(["sweep", "--n", "2..4"])
        .env("SPINLINK_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
