//! End-to-end runs of the `bellsim` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value;

fn bellsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellsim"))
        .args(args)
        .env_remove("BELLSIM_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let o = bellsim(&full);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn assert_schema(name: &str, instance: &Value) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let compiled = JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(instance) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "{name} output does not match its schema: {msgs:?}");
}

#[test]
fn twin_demo_reports_the_collapsed_expansion() {
    let v = json(&["twin-demo"]);
    assert_schema("twin-demo", &v);
    let e: Vec<f64> = serde_json::from_value(v["collapsed_tt_expansion"].clone()).unwrap();
    let r3 = 3f64.sqrt();
    for (a, x) in e.iter().zip([0.75, -r3 / 4.0, r3 / 4.0, -0.25]) {
        assert!((a - x).abs() < 1e-12, "{e:?}");
    }
    let text = stdout(&bellsim(&["twin-demo"]));
    assert!(text.contains("[+0.750000, -0.433013, +0.433013, -0.250000]"), "{text}");
}

#[test]
fn sequence_table_marks_mismatches() {
    let o = bellsim(&["sequence-table", "--model", "qm", "--theta1-deg", "0", "--theta2-deg", "30", "--trials", "40", "--seed", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("Filter")).collect();
    assert_eq!(rows.len(), 4);
    let v = json(&["sequence-table", "--trials", "40", "--seed", "5"]);
    assert_schema("sequence-table", &v);
    let flagged = v["pairs"].as_array().unwrap().iter().filter(|p| p["mismatch"] == true).count() as u64;
    assert_eq!(flagged, v["mismatches"].as_u64().unwrap());
    let starred = rows[0].matches('*').count() + rows[2].matches('*').count();
    assert_eq!(starred as u64, flagged);

    let equal = json(&["sequence-table", "--theta1-deg", "17", "--theta2-deg", "17", "--trials", "500", "--seed", "2"]);
    assert_eq!(equal["mismatches"], 0);
}

#[test]
fn bell_test_verdicts_and_expectations() {
    let qm = json(&["bell-test", "--model", "qm", "--alpha-deg", "30", "--trials", "100000", "--seed", "1"]);
    assert_schema("bell-test", &qm);
    assert_eq!(qm["violated"], true);

    let lhv = json(&["bell-test", "--model", "lhv:nearest-axis", "--trials", "100000", "--seed", "1"]);
    assert_schema("bell-test", &lhv);
    assert_eq!(lhv["violated"], false);

    let ok = bellsim(&["bell-test", "--trials", "10000", "--seed", "3", "--expect-violation"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = bellsim(&["bell-test", "--model", "lhv:malus-stochastic", "--trials", "10000", "--seed", "3", "--expect-violation"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(!bad.stdout.is_empty(), "report still printed");
    let bad = bellsim(&["bell-test", "--trials", "10000", "--seed", "3", "--expect-no-violation"]);
    assert_eq!(bad.status.code(), Some(1));

    let mwi = json(&["bell-test", "--model", "mwi", "--trials", "100000", "--seed", "1"]);
    assert_eq!(mwi["violated"], true);
}

#[test]
fn lhv_scan_exact_and_sampled() {
    let v = json(&["lhv-scan", "--model", "lhv:nearest-axis", "--delta-min-deg", "0", "--delta-max-deg", "90", "--steps", "10", "--exact"]);
    assert_schema("lhv-scan", &v);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    for r in rows {
        let d = r["delta_deg"].as_f64().unwrap();
        assert!((r["lhv_mismatch"].as_f64().unwrap() - d / 90.0).abs() < 1e-9);
        assert!((r["qm_mismatch"].as_f64().unwrap() - d.to_radians().sin().powi(2)).abs() < 1e-12);
    }
    let mc = json(&["lhv-scan", "--model", "lhv:malus-stochastic", "--steps", "3", "--trials", "20000", "--seed", "4"]);
    assert_schema("lhv-scan", &mc);
    assert_eq!(mc["method"], "monte-carlo");
    let csv = stdout(&bellsim(&["lhv-scan", "--exact", "--steps", "2", "--format", "csv"]));
    assert_eq!(csv.lines().next(), Some("delta_deg,lhv_mismatch,qm_mismatch"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn mwi_trace_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.json");
    let o = bellsim(&["mwi-trace", "--theta1-deg", "30", "--theta2-deg", "-30", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_schema("mwi-trace", &v);
    let counts: Vec<u64> = v["steps"].as_array().unwrap().iter().map(|s| s["branch_count"].as_u64().unwrap()).collect();
    assert_eq!(counts, [1, 2, 4, 4, 4]);
    let records: Vec<(u64, u64)> = v["steps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| {
            let r = &s["distinguishable_records"];
            (r["observer1"].as_u64().unwrap(), r["observer2"].as_u64().unwrap())
        })
        .collect();
    assert_eq!(records, [(1, 1), (2, 1), (2, 2), (2, 4), (4, 4)]);
    assert_eq!(v["audit"]["passed"], true);
}

#[test]
fn strategy_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let strategy = serde_json::json!({
        "name": "half-split",
        "lambda_bins": [1.0, 1.0],
        "response1": {"table": [[1.0, 0.0], [0.0, 1.0]]},
        "response2": {"table": [[1.0, 0.0], [0.0, 1.0]]},
    });
    assert_schema("strategy", &strategy);
    std::fs::write(&good, strategy.to_string()).unwrap();
    let model = format!("lhv:{}", good.display());
    let v = json(&["bell-test", "--model", &model, "--trials", "20000", "--seed", "9"]);
    assert_eq!(v["violated"], false);

    let malformed = dir.path().join("bad.json");
    std::fs::write(&malformed, "{ not json").unwrap();
    let o = bellsim(&["bell-test", "--model", &format!("lhv:{}", malformed.display()), "--seed", "1"]);
    assert_eq!(o.status.code(), Some(3));

    let missing = dir.path().join("absent.json");
    let o = bellsim(&["sequence-table", "--model", &format!("lhv:{}", missing.display()), "--seed", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_errors() {
    for args in [
        &["bell-test", "--seed", "1", "--trials", "999"][..],
        &["bell-test", "--seed", "1", "--model", "bohm"],
        &["sequence-table"],
        &["sequence-table", "--seed", "1", "--format", "xml"],
        &["lhv-scan", "--model", "qm", "--exact"],
        &["frobnicate"],
    ] {
        assert_eq!(bellsim(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn worker_count_never_changes_output() {
    let commands: [&[&str]; 5] = [
        &["twin-demo"],
        &["sequence-table", "--trials", "300", "--seed", "11"],
        &["bell-test", "--trials", "20000", "--seed", "11"],
        &["lhv-scan", "--model", "lhv:malus-stochastic", "--trials", "5000", "--seed", "11"],
        &["mwi-trace"],
    ];
    for cmd in commands {
        for format in ["text", "csv", "json"] {
            let mut one = cmd.to_vec();
            one.extend(["--format", format, "--workers", "1"]);
            let mut eight = cmd.to_vec();
            eight.extend(["--format", format, "--workers", "8"]);
            let (a, b) = (bellsim(&one), bellsim(&eight));
            assert!(a.status.success());
            assert_eq!(a.stdout, b.stdout, "{cmd:?} {format}");
        }
    }
    let env = Command::new(env!("CARGO_BIN_EXE_bellsim"))
        .args(["bell-test", "--trials", "20000", "--seed", "11"])
        .env("BELLSIM_WORKERS", "4")
        .output()
        .unwrap();
    assert_eq!(env.stdout, bellsim(&["bell-test", "--trials", "20000", "--seed", "11"]).stdout);
    let bad_env = Command::new(env!("CARGO_BIN_EXE_bellsim"))
        .args(["twin-demo"])
        .env("BELLSIM_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(2));
}
