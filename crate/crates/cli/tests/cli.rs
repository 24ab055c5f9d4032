use std::process::{Command, Output};

fn dkp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dkp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json document")
}

#[test]
fn table_three_half_percent_row() {
    let o = dkp(&["table", "--which", "3"]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let h = rdr.headers().unwrap().clone();
    let col = |name: &str| h.iter().position(|x| x == name).unwrap();
    let row = rdr
        .records()
        .map(Result::unwrap)
        .find(|r| &r[col("omega_alpha")] == "0.005")
        .unwrap();
    assert_eq!(&row[col("alpha11")], "2.66667");
    assert_eq!(&row[col("printed_alpha11")], "2.6666");
    assert_eq!(&row[col("typo_flag")], "false");
}

#[test]
fn table_rejects_unknown_index() {
    let o = dkp(&["table", "--which", "4"]);
    assert!(!o.status.success());
}

#[test]
fn solve_reports_kappa2_eight() {
    let o = dkp(&[
        "solve", "--state", "n0", "--regime", "small", "--M", "1", "--q", "1", "--m", "1", "--k",
        "1", "--omega", "0.01", "--alpha", "0.5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    assert_eq!(doc["schema_version"], 1);
    let branches = doc["branches"].as_array().unwrap();
    assert_eq!(branches.len(), 8);
    let b = branches.iter().find(|b| b["branch_id"] == "-+3/2").unwrap();
    assert!((b["kappa2"].as_f64().unwrap() - 8.0).abs() < 1e-12);
    assert_eq!(b["physical"], true);
    assert_eq!(doc["physical_count"], 2);
}

#[test]
fn solve_csv_has_stable_columns() {
    let o = dkp(&["solve", "--format", "csv", "--state", "n1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    assert!(header
        .starts_with("omega_alpha,alpha,branch_id,b1,b2,b3,b4,alpha11,kappa2,e_plus,e_minus,res_"));
    assert!(header.ends_with("physical,reasons,error"));
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn invalid_parameters_exit_two() {
    let o = dkp(&["solve", "--alpha", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ALPHA_OUT_OF_RANGE"));
    assert_eq!(dkp(&["solve", "--q", "0"]).status.code(), Some(2));
    assert_eq!(
        dkp(&["solve", "--regime", "small", "--varpi", "0.3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn no_physical_branch_exits_three() {
    let o = dkp(&["solve", "--regime", "osc", "--varpi", "0.2"]);
    assert_eq!(o.status.code(), Some(3));
    // The document is still written.
    assert_eq!(json(&o)["branches"].as_array().unwrap().len(), 8);
}

#[test]
fn verify_passes() {
    let o = dkp(&["verify", "--seed", "7", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    for r in doc["equivalence"].as_array().unwrap() {
        assert!(r["elimination_max_rel"].as_f64().unwrap() < 1e-8);
        assert!(r["substitution_max_rel"].as_f64().unwrap() < 1e-8);
    }
    assert_eq!(doc["pass"], true);
}

#[test]
fn algebra_check_passes() {
    let o = dkp(&[
        "algebra-check",
        "--omega",
        "0.4",
        "--alpha",
        "0.8",
        "--r",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["pass"], true);
    assert_eq!(
        dkp(&["algebra-check", "--omega", "1", "--r", "3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn outputs_are_byte_identical() {
    for args in [
        &["table", "--which", "1"][..],
        &["solve", "--state", "n1", "--policy", "first-principles"],
        &[
            "sweep",
            "--var",
            "omega-alpha",
            "--from",
            "0.001",
            "--to",
            "0.01",
            "--points",
            "10",
            "--state",
            "n1",
        ],
        &["verify", "--seed", "3", "--trials", "4"],
        &["wavefunction", "--points", "50"],
    ] {
        assert_eq!(dkp(args).stdout, dkp(args).stdout, "{args:?}");
    }
}

#[test]
fn sweep_keeps_failed_points() {
    let o = dkp(&[
        "sweep",
        "--var",
        "omega-alpha",
        "--from",
        "0.001",
        "--to",
        "0.01",
        "--points",
        "10",
        "--state",
        "n1",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 21);
    assert_eq!(
        text.lines()
            .filter(|l| l.contains("invalid parameters"))
            .count(),
        10
    );
}

#[test]
fn wavefunction_files() {
    let dir = std::env::temp_dir().join(format!("dkp-cli-test-{}", std::process::id()));
    let svg = dir.join("fig.svg");
    let o = dkp(&[
        "wavefunction",
        "--alphas",
        "0.3,0.6,0.9",
        "--points",
        "101",
        "--out-dir",
        dir.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(dir.join("wavefunction.csv")).unwrap();
    assert!(csv.starts_with("r,R_alpha_0.3,R_alpha_0.6,R_alpha_0.9\n"));
    assert_eq!(csv.lines().count(), 102);
    let plot = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(plot.matches("<polyline").count(), 4);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn hard_wall_wavefunction_vanishes_at_the_wall() {
    let o = dkp(&[
        "wavefunction",
        "--regime",
        "arbitrary",
        "--branch",
        "++3/2",
        "--omega",
        "1",
        "--alpha",
        "0.5",
        "--q",
        "-0.5",
        "--lo",
        "0.01",
        "--hi",
        "2",
        "--points",
        "200",
        "--normalization",
        "raw",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    let v: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!(v.abs() < 1e-12, "{last}");
}
