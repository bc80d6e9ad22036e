use std::path::Path;
use std::process::{Command, Output};

use aluthge_cli::io::{read_matrix, MatrixFile};
use aluthge_core::generators::{random_compact, SequenceRule};
use aluthge_core::linalg::{op_norm, singular_values};
use aluthge_core::{ComplexMatrix, C64};
use serde_json::Value;
use tempfile::TempDir;

fn aluthge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aluthge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn matrix_json(m: &ComplexMatrix) -> String {
    serde_json::to_string(&MatrixFile::from_matrix(m)).unwrap()
}

fn limit_of(summary: &Value) -> ComplexMatrix {
    let file: MatrixFile = serde_json::from_value(summary["limit"].clone()).unwrap();
    file.to_matrix("").unwrap()
}

#[test]
fn gen_output_round_trips_bit_exactly() {
    let tmp = TempDir::new().unwrap();
    let first = tmp.path().join("a.json");
    let out = aluthge(&[
        "gen",
        "--kind",
        "random-compact",
        "--rule",
        "harmonic",
        "--dim",
        "8",
        "--seed",
        "42",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let m = read_matrix(&first).unwrap();
    let expected = random_compact(8, &SequenceRule::harmonic(), 42).unwrap();
    for (a, b) in m.row_major().iter().zip(expected.row_major()) {
        assert_eq!(
            (a.re.to_bits(), a.im.to_bits()),
            (b.re.to_bits(), b.im.to_bits())
        );
    }

    let s = singular_values(&m).unwrap();
    for (k, x) in s.iter().enumerate() {
        assert!(
            (x - 1.0 / (k + 1) as f64).abs() <= 1e-12,
            "s_{} = {x}",
            k + 1
        );
    }

    // writing the parsed matrix again reproduces the file byte for byte
    let again = tmp.path().join("b.json");
    aluthge_cli::io::write_json(Some(&again), &MatrixFile::from_matrix(&m)).unwrap();
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&again).unwrap()
    );
}

#[test]
fn gen_shift_and_jordan_examples() {
    let out = aluthge(&["gen", "--kind", "shift", "--values", "4,9", "--dim", "3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let m: MatrixFile = serde_json::from_slice(&out.stdout).unwrap();
    let m = m.to_matrix("").unwrap();
    let z = C64::new(0.0, 0.0);
    assert_eq!(m[(1, 0)], C64::new(4.0, 0.0));
    assert_eq!(m[(2, 1)], C64::new(9.0, 0.0));
    assert_eq!(op_norm(&m), 9.0);
    assert_eq!(m.row_major().iter().filter(|&&x| x != z).count(), 2);

    let out = aluthge(&["gen", "--kind", "jordan", "--lambda", "0", "--dim", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let m: MatrixFile = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(m.data, vec![[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]);
}

#[test]
fn iterate_fixed_point() {
    let tmp = TempDir::new().unwrap();
    let input = write(
        tmp.path(),
        "diag.json",
        &matrix_json(&ComplexMatrix::from_real_diagonal(&[5.0, 2.0]).unwrap()),
    );
    let dir = tmp.path().join("run");
    let out = aluthge(&[
        "iterate",
        "--input",
        &input,
        "--out",
        dir.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let summary = read_json(&dir.join("summary.json"));
    assert_eq!(summary["converged"], true);
    assert_eq!(summary["stop_reason"], "step_tolerance");
    assert_eq!(summary["iterations"], 1);
    let input_matrix = ComplexMatrix::from_real_diagonal(&[5.0, 2.0]).unwrap();
    let gap = op_norm(&(&limit_of(&summary) - &input_matrix));
    assert!(gap <= 1e-14, "{gap}");

    let csv = std::fs::read_to_string(dir.join("trace.csv")).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("iter,op_norm,step_delta,normality_defect")
    );
}

#[test]
fn iterate_jordan_family_collapses() {
    let tmp = TempDir::new().unwrap();
    let input = write(
        tmp.path(),
        "spec.json",
        r#"{"operator": {"family": {"kind": "jordan", "lambda": [0, 0]}, "dim": 3},
            "analyses": [{"type": "radius"}, {"type": "spectrum"}]}"#,
    );
    let out = aluthge(&["iterate", "--input", &input]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["converged"], true);
    assert!(op_norm(&limit_of(&summary)) <= 1e-10);
    assert!(summary["analyses"]["radius"].is_object());
    assert!(summary["analyses"]["spectrum"].is_object());
}

#[test]
fn truncated_iteration_exits_two() {
    let tmp = TempDir::new().unwrap();
    let input = write(
        tmp.path(),
        "spec.json",
        r#"{"operator": {"matrix": {"dim": 2, "data": [[1, 0], [1, 0], [0, 0], [1, 0]]}},
            "config": {"max_iter": 1}}"#,
    );
    let out = aluthge(&["iterate", "--input", &input]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["converged"], false);
    assert_eq!(summary["stop_reason"], "max_iter");
}

#[test]
fn malformed_input_names_the_field() {
    let tmp = TempDir::new().unwrap();
    let cases = [
        (r#"{"dim": 2, "data": [[1, 0], [2, 0], [3, 0]]}"#, "data"),
        (r#"{"dim": 1, "data": [[1, "x"]]}"#, "data[0][1]"),
        (
            r#"{"operator": {"matrix": {"dim": 1, "data": [[1, 0]]}}, "config": {"tol_step": -1}}"#,
            "config",
        ),
        (
            r#"{"operator": {"family": {"kind": "jordan", "lambda": [0, 0]}}}"#,
            "operator.dim",
        ),
        (
            r#"{"operator": {"matrix": {"dim": 1, "data": [[1, 0]]}}, "bogus": 1}"#,
            "bogus",
        ),
    ];
    for (k, (text, field)) in cases.iter().enumerate() {
        let input = write(tmp.path(), &format!("bad{k}.json"), text);
        let out = aluthge(&["iterate", "--input", &input]);
        assert_eq!(code(&out), 1, "case {k}");
        let err = stderr(&out);
        assert!(err.contains(&format!("`{field}`")), "case {k}: {err}");
    }

    let out = aluthge(&[
        "iterate",
        "--input",
        tmp.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(code(&aluthge(&["iterate", "--bogus"])), 1);
}

#[test]
fn analysis_verbs_write_reports() {
    let tmp = TempDir::new().unwrap();
    let t = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.1]]).unwrap();
    let input = write(tmp.path(), "t.json", &matrix_json(&t));

    let out = aluthge(&["split", "--input", &input, "--threshold", "0.5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let split: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(split["residual"].as_f64().unwrap() <= 1e-10);

    let out = aluthge(&["radius", "--input", &input, "--n-max", "8"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let out = aluthge(&["spectrum", "--input", &input]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let csv = tmp.path().join("cont.csv");
    let args = [
        "continuity",
        "--input",
        &input,
        "--seed",
        "3",
        "--trials",
        "2",
        "--format",
        "csv",
    ];
    let out = aluthge(&[&args[..], &["--out", csv.to_str().unwrap()]].concat());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let first = std::fs::read_to_string(&csv).unwrap();
    aluthge(&[&args[..], &["--out", csv.to_str().unwrap()]].concat());
    assert_eq!(first, std::fs::read_to_string(&csv).unwrap());
    assert_eq!(code(&aluthge(&["continuity", "--input", &input])), 1);
}

#[test]
fn suite_names_the_criterion_it_fails() {
    let tmp = TempDir::new().unwrap();
    let out = aluthge(&[
        "suite",
        "--out",
        tmp.path().to_str().unwrap(),
        "--tol",
        "1e-30",
        "--criteria",
        "1",
    ]);
    assert_ne!(code(&out), 0);
    assert!(
        stderr(&out).contains("1:matrix_convergence"),
        "{}",
        stderr(&out)
    );
    let report = read_json(&tmp.path().join("suite_report.json"));
    assert_eq!(report["passed"], false);
    assert_eq!(report["failed"][0], "1:matrix_convergence");
}

#[test]
fn suite_reruns_are_numerically_identical() {
    let tmp = TempDir::new().unwrap();
    let mut reports = Vec::new();
    for run in ["a", "b"] {
        let dir = tmp.path().join(run);
        let out = aluthge(&[
            "suite",
            "--out",
            dir.to_str().unwrap(),
            "--criteria",
            "3,7,8,10",
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        reports.push(aluthge_cli::suite::numeric_fields(&read_json(
            &dir.join("suite_report.json"),
        )));
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn experiment_output_directory_serves_every_verb() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("runs");
    let spec = format!(
        r#"{{"operator": {{"family": {{"kind": "jordan", "lambda": [0, 0]}}, "dim": 3}},
            "output": {{"path": {:?}, "format": "csv"}}}}"#,
        dir.to_str().unwrap()
    );
    let input = write(tmp.path(), "spec.json", &spec);
    assert_eq!(code(&aluthge(&["iterate", "--input", &input])), 0);
    let out = aluthge(&["radius", "--input", &input, "--n-max", "4"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for name in ["summary.json", "trace.csv", "radius.csv"] {
        assert!(dir.join(name).is_file(), "{name} missing");
    }
}
