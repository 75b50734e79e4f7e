use std::fs;
use std::process::{Command, Output};

use reeb_core::config::RunConfig;
use serde_json::Value;

fn reeb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reeb")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn quick_verify_passes() {
    let o = reeb(&["verify", "--quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["report"]["passed"], true);
    assert!(v["config"].is_object());
}

#[test]
fn field_on_the_torus() {
    let v = json(&reeb(&["field", "-p", "1,0,1,0,0"]));
    let x: Vec<f64> = v["field"]["x"].as_array().unwrap().iter().map(|a| a.as_f64().unwrap()).collect();
    let s = v["config"]["profile"]["s"].as_f64().unwrap();
    let want = [0.0, 1.0, 0.0, s, 0.0];
    for (a, b) in x.iter().zip(want) {
        assert!((a - b).abs() < 1e-12, "{x:?}");
    }
}

#[test]
fn polar_point_matches_cartesian() {
    let a = json(&reeb(&["field", "-p", "0,2,0,0,-0.3"]));
    let b = json(&reeb(&["field", "--polar", "2,1.5707963267948966,0,0,-0.3"]));
    let (xa, xb) = (&a["field"]["x"], &b["field"]["x"]);
    for i in 0..5 {
        assert!((xa[i].as_f64().unwrap() - xb[i].as_f64().unwrap()).abs() < 1e-12);
    }
}

#[test]
fn orbit_csv_translates_outside_support() {
    let o = reeb(&["orbit", "-p", "10,0,0,0,0", "--t", "5", "--backward"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config: "));
    assert_eq!(lines.next().unwrap(), "t,x1,y1,x2,y2,z");
    let last: Vec<f64> = lines.last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last[0], -5.0);
    assert!((last[5] + 5.0).abs() < 1e-12);
}

#[test]
fn orbit_jsonl_has_named_keys() {
    let o = reeb(&["orbit", "-p", "1,0,1,0,-0.5", "--t", "2", "--format", "jsonl"]);
    let text = stdout(&o);
    let rows: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(rows[0]["config"].is_object());
    assert!(rows[1..].iter().all(|r| r["t"].is_number() && r["z"].is_number()));
    assert_eq!(rows.last().unwrap()["t"], 2.0);
}

#[test]
fn header_round_trips() {
    let o = reeb(&["--tol", "1e-9", "--seed", "11", "orbit", "-p", "1,0,1,0,-0.5", "--t", "1"]);
    let cfg = RunConfig::from_output(&stdout(&o)).unwrap();
    assert_eq!(cfg.tol, 1e-9);
    assert_eq!(cfg.seed, 11);

    let o = reeb(&["--seed", "12", "classify", "-p", "1,0,1,0,-0.5", "--horizon", "50"]);
    let cfg = RunConfig::from_output(&stdout(&o)).unwrap();
    assert_eq!(cfg.seed, 12);
}

#[test]
fn config_file_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"tol": 1e-8, "seed": 4}"#).unwrap();
    let out = dir.path().join("orbit.csv");
    let o = reeb(&[
        "--config",
        cfg.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
        "orbit",
        "-p",
        "1,0,1,0,-0.5",
        "--t",
        "1",
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let back = RunConfig::from_output(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!((back.tol, back.seed), (1e-8, 4));
    assert_eq!(back.output.as_deref(), out.to_str());
}

#[test]
fn bad_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let unknown = dir.path().join("unknown.json");
    fs::write(&unknown, r#"{"tolerance": 1e-9}"#).unwrap();
    let missing = dir.path().join("missing.json");
    let unwritable = dir.path().join("no/such/dir/out.csv");
    let cases: Vec<Vec<&str>> = vec![
        vec!["--bogus", "verify"],
        vec!["frobnicate"],
        vec!["--config", bad.to_str().unwrap(), "verify"],
        vec!["--config", unknown.to_str().unwrap(), "verify"],
        vec!["--config", missing.to_str().unwrap(), "verify"],
        vec!["-o", unwritable.to_str().unwrap(), "orbit", "-p", "0,0,0,0,0", "--t", "1"],
        vec!["orbit", "-p", "1,2,3", "--t", "1"],
        vec!["orbit", "-p", "0,0,0,0,0", "--t", "-1"],
        vec!["--tol", "2", "field", "-p", "0,0,0,0,0"],
        vec!["field"],
    ];
    for args in cases {
        let o = reeb(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(o.stderr).unwrap();
        assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
    }
}

#[test]
fn outputs_are_deterministic() {
    let args = ["--seed", "3", "scan-periodic", "--grid", "2", "--focus", "20", "--horizon", "20"];
    let a = reeb(&args);
    let b = reeb(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = reeb(&["--jobs", "1", "--seed", "3", "scan-periodic", "--grid", "2", "--focus", "20", "--horizon", "20"]);
    let (va, vc) = (json(&a), json(&c));
    assert_eq!(va["scan"], vc["scan"]);
    assert_eq!(va["scan"]["passed"], true);
}

#[test]
fn plotdata_columns() {
    let o = reeb(&["plotdata", "-p", "1,0,1,0,-0.5", "--t", "3"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config: "));
    assert_eq!(lines.next().unwrap(), "# t z r1 r2 dist_T");
    for l in lines {
        let v: Vec<f64> = l.split(' ').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v.len(), 5);
        assert!((v[2] - 1.0).abs() < 1e-6 && v[4] <= 0.5 + 1e-9);
    }
}

#[test]
fn sweep_and_rotation_run() {
    let v = json(&reeb(&["sweep-hyperplane", "--rho-min", "2", "--rho-max", "3", "--steps", "2"]));
    let rows = v["sweep"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| (r["crossing_time"].as_f64().unwrap() - 3.0).abs() < 1e-9));

    let v = json(&reeb(&["rotation", "--revs", "5"]));
    assert!(v["rotation"]["error"].as_f64().unwrap() < v["rotation"]["estimate"]["error_bound"].as_f64().unwrap());
}
