use std::process::{Command, Output};

use tailbound::cumulant::exact_tail;
use tailbound::sweep::{sweep, Grid, Settings, COLUMNS};
use tailbound::CumulantModel;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tailbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key).filter(|r| r.starts_with(' ')))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
        .trim()
        .parse()
        .unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn eval_gamma_reference_point() {
    let o = run(&["eval", "--dist", "gamma:8,1", "--y", "16"]);
    assert!(o.status.success());
    let t = stdout(&o);
    assert!((field(&t, "chernoff") - 0.085879).abs() < 1e-6);
    assert!((field(&t, "exact") - 0.0099998).abs() < 1e-7);
    let new = field(&t, "new_lower");
    assert!(new > 1e-9 && new < 1e-8, "{new}");
}

#[test]
fn eval_at_mean_exits_2() {
    let o = run(&["eval", "--dist", "gamma:8,1", "--y", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("y must exceed the mean (8)"));
}

#[test]
fn eval_bad_spec_exits_2() {
    assert_eq!(
        run(&["eval", "--dist", "gamma:-1", "--y", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["eval", "--dist", "cauchy:1", "--y", "3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn eval_exponential_stroock_is_na() {
    let o = run(&["eval", "--dist", "exp:1", "--y", "5"]);
    assert!(o.status.success());
    let t = stdout(&o);
    let line = t.lines().find(|l| l.starts_with("stroock")).unwrap();
    assert_eq!(line.split_whitespace().nth(1), Some("NA"));
    assert!(field(&t, "new_lower") > 0.0);
}

#[test]
fn sweep_gamma_grid_holds_sandwich() {
    let o = run(&["sweep", "--dist", "gamma:8,1", "--y", "10:40:61"]);
    assert!(o.status.success());
    let (header, rows) = parse_csv(&stdout(&o));
    assert_eq!(header, COLUMNS);
    assert_eq!(rows.len(), 61);
    let m: CumulantModel = "gamma:8,1".parse().unwrap();
    for r in &rows {
        let y: f64 = r[0].parse().unwrap();
        let (exact, chernoff, new): (f64, f64, f64) = (
            r[1].parse().unwrap(),
            r[2].parse().unwrap(),
            r[3].parse().unwrap(),
        );
        // values are printed to 6 digits; compare against an unrounded exact tail
        assert!((exact / exact_tail(&m, y) - 1.0).abs() < 1e-5);
        assert!(new < exact && exact < chernoff, "row {r:?}");
        assert_eq!(r[12], "");
    }
}

#[test]
fn sweep_two_steps_gives_endpoints() {
    let o = run(&[
        "sweep",
        "--dist",
        "gamma:8,1",
        "--y",
        "12:20:2",
        "--bounds",
        "chernoff",
    ]);
    let (_, rows) = parse_csv(&stdout(&o));
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][0].as_str(), rows[1][0].as_str()), ("12", "20"));
}

#[test]
fn sweep_column_selection() {
    let o = run(&[
        "sweep",
        "--dist",
        "gamma:8,1",
        "--y",
        "12:20:3",
        "--bounds",
        "chernoff,new",
    ]);
    let (header, rows) = parse_csv(&stdout(&o));
    for r in rows {
        for (name, v) in header.iter().zip(&r) {
            let populated = !v.is_empty();
            let expected = matches!(
                name.as_str(),
                "y" | "chernoff" | "new_lower" | "new_alpha" | "new_delta" | "new_alpha_hat"
            );
            assert_eq!(populated, expected, "{name} = {v:?}");
        }
    }
}

#[test]
fn csv_round_trip_matches_rows_in_memory() {
    let o = run(&["sweep", "--dist", "exp:1", "--y", "1.5:6:10"]);
    let (_, parsed) = parse_csv(&stdout(&o));
    let m: CumulantModel = "exp:1".parse().unwrap();
    let rows = sweep(
        &m,
        &Grid::new(1.5, 6.0, 10).unwrap(),
        &Settings::default(),
        1,
    )
    .unwrap();
    let expected: Vec<Vec<String>> = rows.iter().map(|r| r.record()).collect();
    assert_eq!(parsed, expected);
    assert!(parsed.iter().all(|r| r[7] == "NA"));
}

#[test]
fn parallel_output_is_byte_identical() {
    let base = [
        "sweep",
        "--dist",
        "poisson:4",
        "--y",
        "5:15:12",
        "--samples",
        "2000",
        "--seed",
        "3",
    ];
    let serial = run(&base);
    let mut par = base.to_vec();
    par.extend(["--parallel", "4"]);
    let parallel = run(&par);
    assert!(serial.status.success() && parallel.status.success());
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn json_rows_use_column_names() {
    let o = run(&[
        "sweep", "--dist", "exp:1", "--y", "2:3:2", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let keys: Vec<&str> = rows[0]
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    let mut want = COLUMNS.to_vec();
    want.sort_unstable();
    let mut got = keys.clone();
    got.sort_unstable();
    assert_eq!(got, want);
    assert_eq!(rows[0]["stroock"], "NA");
    assert!(rows[0]["exact"].as_f64().unwrap() == (-2f64).exp());
}

#[test]
fn sweep_writes_file_and_reports_unwritable_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let o = run(&[
        "sweep",
        "--dist",
        "gamma:8,1",
        "--y",
        "12:14:2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 3);

    let bad = dir.path().join("missing").join("out.csv");
    let o = run(&[
        "sweep",
        "--dist",
        "gamma:8,1",
        "--y",
        "12:14:2",
        "--out",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn sweep_below_mean_exits_2() {
    assert_eq!(
        run(&["sweep", "--dist", "gamma:8,1", "--y", "6:12:3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn mc_gamma_contains_exact_and_is_deterministic() {
    let args = [
        "mc",
        "--dist",
        "gamma:8,1",
        "--y",
        "16",
        "--samples",
        "1000000",
        "--seed",
        "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let t = stdout(&a);
    assert!(t.contains("exact_in_ci     pass"), "{t}");
    assert!(!t.contains("FAIL"));
}

#[test]
fn mc_exponential_near_inverse_e() {
    let o = run(&[
        "mc",
        "--dist",
        "exp:1",
        "--y",
        "1",
        "--samples",
        "100000",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let est = &v["estimate"];
    let (p, lo, hi) = (
        est["p_hat"].as_f64().unwrap(),
        est["ci_lo"].as_f64().unwrap(),
        est["ci_hi"].as_f64().unwrap(),
    );
    assert!((p - (-1f64).exp()).abs() < 0.01);
    assert!(lo <= (-1f64).exp() && (-1f64).exp() <= hi);
}

#[test]
fn mc_too_few_samples_exits_2() {
    assert_eq!(
        run(&["mc", "--dist", "exp:1", "--y", "1", "--samples", "99"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn negative_y_marks_scaled_bounds_na() {
    let o = run(&["eval", "--dist", "normal:-4,1", "--y", "-2"]);
    assert!(o.status.success());
    let t = stdout(&o);
    for key in ["new_lower", "stroock", "bo"] {
        let line = t.lines().find(|l| l.starts_with(key)).unwrap();
        assert_eq!(line.split_whitespace().nth(1), Some("NA"), "{key}");
    }
    assert!(field(&t, "chernoff") > 0.0);

    let o = run(&["sweep", "--dist", "normal:-4,1", "--y", "-3:1:5"]);
    assert!(o.status.success());
    let (_, rows) = parse_csv(&stdout(&o));
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][3], "NA");
    assert_ne!(rows[4][3], "NA");
}
