use std::process::Command;

use alp::cli::main_with;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let argv = std::iter::once("alp").chain(args.iter().copied()).map(String::from);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = main_with(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn edges_twelve_six_ground_row() {
    let r = run(&["edges", "--a", "3", "--b", "2", "--m", "0.5", "--emax", "20"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let header = r.stdout.lines().next().unwrap();
    assert_eq!(header, "m,edge_index,E,D_sign,nodes,gap_to_next,degenerate_flag,midband_energies");
    let first = &rows(&r.stdout)[0];
    assert_eq!(first[..5], ["0.5", "0", "4.5", "1", "0"]);
    assert!(r.stderr.contains("period 2K"));
}

#[test]
fn edges_twelve_two_has_the_antiperiodic_level_three() {
    let r = run(&["edges", "--a", "3", "--b", "1", "--m", "1/2", "--emax", "12"]);
    assert_eq!(r.code, 0);
    assert!(rows(&r.stdout).iter().any(|row| row[2] == "3" && row[3] == "-1"), "{}", r.stdout);
}

#[test]
fn edges_equal_indices_report_period_k() {
    let r = run(&["edges", "--a", "1", "--b", "1", "--m", "0.5", "--emax", "30", "--format", "json"]);
    assert_eq!(r.code, 0);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["period"], "K");
    assert_eq!(v["closed_gaps"], 0);
    assert_eq!(v["a"], "1");
    assert!(v["edges"].as_array().unwrap().len() >= 3);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["edges", "--a", "1", "--b", "2", "--m", "0.5"][..],
        &["edges", "--a", "3", "--b", "2", "--m", "1"],
        &["edges", "--a", "3.5", "--b", "2", "--m", "0.5"],
        &["edges", "--a", "7/0", "--b", "2", "--m", "0.5"],
        &["scan", "--a", "3", "--b", "2", "--m-range", "0.5:1.5:0.5"],
        &["verify", "--only", "no-such-entry"],
        &["frobnicate"],
        &["edges", "--a", "3"],
    ] {
        let r = run(args);
        assert_eq!(r.code, 1, "{args:?}: {}", r.stderr);
        assert!(r.stdout.is_empty(), "{args:?}");
    }
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn rationals_echo_back_exactly() {
    let r = run(&["midband", "--a", "14/4", "--b", "0", "--m", "0.5", "--emax", "1", "--format", "json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["a"], "7/2");
    assert_eq!(v["b"], "0");
}

#[test]
fn midband_three_halves() {
    let r = run(&["midband", "--a", "3/2", "--b", "0", "--m", "0.5", "--emax", "5"]);
    assert_eq!(r.code, 0);
    let es: Vec<f64> = rows(&r.stdout).iter().map(|row| num(&row[1])).collect();
    let want = [15.0 / 8.0 - 0.75f64.sqrt(), 15.0 / 8.0 + 0.75f64.sqrt()];
    assert_eq!(es.len(), 2);
    for (e, w) in es.iter().zip(want) {
        assert!((e - w).abs() < 1e-9, "{es:?}");
    }
}

#[test]
fn scan_is_byte_identical_and_writes_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chart.csv");
    let args = ["scan", "--a", "3", "--b", "2", "--m-range", "0.1:0.9:0.2", "--emax", "20"];
    let first = run(&args);
    assert_eq!(first.code, 0);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let second = run(&with_out);
    assert_eq!(second.code, 0);
    assert!(second.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), first.stdout);

    // The E3 = E4 gap stays closed across the grid.
    let table = rows(&first.stdout);
    let ms: Vec<&str> = table.iter().map(|r| r[0].as_str()).collect();
    assert!(ms.windows(2).all(|w| num(w[0]) <= num(w[1])));
    for m in ["0.1", "0.3", "0.5", "0.7", "0.9"] {
        let gap = table.iter().find(|r| r[0] == m && r[1] == "3").unwrap();
        assert!(num(&gap[5]).abs() < 1e-6, "{gap:?}");
        assert_eq!(gap[6], "1");
    }
}

#[test]
fn scan_twelve_two_degenerate_level_near_nine() {
    let r = run(&["scan", "--a", "3", "--b", "1", "--m-range", "0.001:0.003:0.001", "--emax", "12"]);
    assert_eq!(r.code, 0);
    for row in rows(&r.stdout).iter().filter(|row| row[1] == "5") {
        assert_eq!(row[6], "1");
        assert!((num(&row[2]) - 9.0).abs() < 0.05, "{row:?}");
    }
}

#[test]
fn scan_failures_are_flagged_rows() {
    let r = run(&[
        "scan", "--a", "3", "--b", "2", "--m-range", "0.1:0.2:0.1", "--emax", "10", "--ode-rel-tol", "1e-40", "--ode-abs-tol",
        "1e-40",
    ]);
    assert_eq!(r.code, 2);
    let table = rows(&r.stdout);
    assert_eq!(table.len(), 2);
    assert!(table.iter().all(|row| row[1].is_empty() && row[2] == "NaN"));
    assert!(r.stderr.contains("underflow"));
}

#[test]
fn verify_single_entry() {
    let r = run(&["verify", "--only", "MB-1/2-1"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stdout.contains("PASS MB-1/2-1  E = 9/4 + 1/4m"));
    assert!(r.stdout.contains("m = 0.5: E = 2.375"));
    assert!(r.stdout.ends_with("1/1 entries PASS\n"));
}

#[test]
fn verify_names_a_perturbed_entry() {
    let r = run(&["verify", "--only", "ALP-12-2-E1", "--perturb", "ALP-12-2-E1=0.001", "--m", "0.5"]);
    assert_eq!(r.code, 3);
    assert!(r.stdout.contains("FAIL ALP-12-2-E1"));
    assert!(r.stderr.contains("ALP-12-2-E1"));
}

#[test]
fn catalog_lists_every_entry() {
    let r = run(&["catalog", "--format", "json"]);
    assert_eq!(r.code, 0);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    let list = v.as_array().unwrap();
    assert!(list.len() >= 22);
    assert!(list.iter().any(|e| e["id"] == "ALP-12-6-ground" && e["energy"] == "9m"));
}

#[test]
fn binary_exit_codes_and_env_override() {
    let bin = env!("CARGO_BIN_EXE_alp");
    let usage = Command::new(bin).args(["edges", "--a", "0", "--b", "1", "--m", "0.5"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(1));

    let out = Command::new(bin)
        .args(["edges", "--a", "3", "--b", "2", "--m", "0.5", "--emax", "20"])
        .env("ALP_GAP_TOL", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let note = String::from_utf8(out.stderr).unwrap();
    assert!(note.contains("1 open gaps"), "{note}");

    let bad = Command::new(bin).args(["edges", "--a", "3", "--b", "2", "--m", "0.5"]).env("ALP_GAP_TOL", "-1").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
