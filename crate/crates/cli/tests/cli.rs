use std::process::{Command, Output};

use serde_json::Value;

fn exitmoments(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exitmoments")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = exitmoments(&full);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(&out)).unwrap_or_else(|e| panic!("{args:?}: {e}"))
}

#[test]
fn barta_reproduces_quoted_value() {
    let v = json(&["barta", "--m", "3", "--r", "atan:sqrt2"]);
    let lambda = v["estimate"]["value"].as_f64().unwrap();
    assert!((lambda - 5.85).abs() < 0.05);
    assert_eq!(v["exceeds_2m"], Value::Bool(false));

    let at_pi_3 = json(&["barta", "--m", "3", "--r", "pi/3"]);
    assert!((at_pi_3["estimate"]["value"].as_f64().unwrap() - 4.829).abs() < 1e-3);
}

#[test]
fn false_wedge_verdict_is_not_an_error() {
    let out = exitmoments(&["wedge", "--m", "2", "--l", "1", "--k", "1", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], Value::Bool(false));
    assert_eq!(v["value"].as_f64(), Some(-1.0));
}

#[test]
fn moments_at_centre() {
    let out = exitmoments(&["moments", "--profile", "constant:0", "--n", "2", "--r", "1", "--K", "2", "--at", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "k,value\n0,1\n1,0.25\n2,0.09375\n");
}

#[test]
fn exit_codes() {
    assert_eq!(exitmoments(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(exitmoments(&["barta", "--m", "3"]).status.code(), Some(1));
    assert_eq!(exitmoments(&["barta", "--m", "3", "--r", "pie"]).status.code(), Some(1));
    assert_eq!(exitmoments(&["cone"]).status.code(), Some(1));
    assert_eq!(exitmoments(&["--help"]).status.code(), Some(0));
    // numerical failures
    assert_eq!(exitmoments(&["barta", "--m", "3", "--r", "2"]).status.code(), Some(2));
    assert_eq!(exitmoments(&["cone", "--m", "2", "--theta", "pi/2"]).status.code(), Some(2));
    assert_eq!(exitmoments(&["simulate", "--n", "2", "--r", "1", "--dt", "0.01"]).status.code(), Some(2));
    assert_eq!(
        exitmoments(&["warped-cone", "--l", "1", "--lambda", "4", "--alpha", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_suite() {
    let out = exitmoments(&["verify", "--paths", "4000"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.starts_with("check,expected,got,tolerance,status\n"));
    assert!(!text.contains("FAIL"));

    // a single path has zero sample variance, so the Monte Carlo checks cannot pass
    let out = exitmoments(&["verify", "--paths", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn every_subcommand_emits_json() {
    let dir = tempfile::tempdir().unwrap();
    let batch = dir.path().join("batch.json");
    std::fs::write(&batch, r#"[{"criterion":"cone","m":2,"theta":0.5}]"#).unwrap();
    let batch = batch.to_str().unwrap();
    let cases: [&[&str]; 12] = [
        &["warp", "--profile", "polynomial:1,0.5", "--t-max", "1"],
        &["met", "--n", "3", "--r", "1", "--points", "5"],
        &["moments", "--n", "2", "--r", "1", "--K", "2", "--cells", "64"],
        &["bound", "--m", "3", "--l", "1", "--eta", "2", "--r-d", "1", "--k", "2"],
        &["barta", "--m", "2", "--r", "pi/4"],
        &["eigen", "--m", "2", "--r", "pi/4"],
        &["cone", "--lambda", "9", "--l", "4"],
        &["wedge", "--m", "4", "--n", "2", "--l", "1", "--k", "0", "--alpha", "1"],
        &["warped-cone", "--l", "2", "--lambda", "4.5", "--alpha", "1", "--cells", "65536"],
        &["criteria", "--input", batch],
        &["simulate", "--n", "2", "--r", "1", "--paths", "200"],
        &["verify", "--paths", "2000"],
    ];
    for args in cases {
        json(args);
    }
    let eigen = json(&["eigen", "--m", "2", "--r", "pi/4"]);
    assert!((eigen["estimate"]["value"].as_f64().unwrap() - 4.0).abs() < 1e-6);
}

#[test]
fn simulate_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let out = exitmoments(&[
            "simulate", "--n", "2", "--r", "1", "--paths", "3000", "--seed", "42", "--threads", threads,
            "--output", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    let a = run("a.json", "1");
    let b = run("b.json", "3");
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["seed_echo"].as_u64(), Some(42));
    assert!(v.get("elapsed").is_none());
}

#[test]
fn simulate_writes_exit_times_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let times = dir.path().join("times.bin");
    let out = exitmoments(&[
        "simulate", "--n", "2", "--r", "1", "--paths", "100", "--times-out", times.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::metadata(&times).unwrap().len(), 800);

    let out = exitmoments(&["simulate", "--n", "2", "--r", "1", "--paths", "200", "--sweep", "1e-2,1e-3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("dt,mean,se\n0.01,"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn criteria_batch_with_summary() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("cases.json");
    std::fs::write(
        &input,
        r#"[
            {"criterion":"theorem1","m":3,"l":1,"profile":{"variant":"constant","b":0},"r_d":1.0,"max_h":0.0,"eta":2.0},
            {"criterion":"theorem2","m":2,"l":1,"b":4.0,"r_d":0.5,"max_h":10.0},
            {"criterion":"wedge","m":5,"n":2,"l":2,"k":0,"alpha":0.5}
        ]"#,
    )
    .unwrap();
    let summary = dir.path().join("summary.csv");
    let out = exitmoments(&["criteria", "--input", input.to_str().unwrap(), "--summary", summary.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let reports: Vec<Value> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(reports.len(), 3);
    assert_eq!(reports[0]["bound"].as_f64(), Some(0.25));
    let csv = std::fs::read_to_string(&summary).unwrap();
    assert_eq!(csv.lines().next(), Some("criterion_id,verdict,threshold"));
    assert!(csv.contains("theorem1,true,0\n"));
    assert!(csv.contains("theorem2,false,"));

    std::fs::write(&input, "not json").unwrap();
    assert_eq!(exitmoments(&["criteria", "--input", input.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(exitmoments(&["criteria", "--input", "/nonexistent.json"]).status.code(), Some(1));
}

#[test]
fn profile_from_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.json");
    std::fs::write(&path, r#"{"variant":"constant","b":1.0}"#).unwrap();
    let out = exitmoments(&["met", "--n", "2", "--r", "1", "--at", "0", "--profile-json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let value: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((value - 2.0 * 0.5f64.cosh().ln()).abs() < 1e-6);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.csv");
    let out = exitmoments(&["warp", "--profile", "constant:1", "--t-max", "0.5", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,h,h_prime\n0,0,1\n"));
}
