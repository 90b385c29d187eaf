use indefint_cli::{run, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("indefint").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn section_rows(csv: &str, name: &str) -> usize {
    let mut lines = csv.lines().skip_while(|l| *l != format!("# {name}")).skip(2);
    let mut count = 0;
    while let Some(l) = lines.next() {
        if l.starts_with('#') {
            break;
        }
        count += 1;
    }
    count
}

#[test]
fn demo_tables_have_the_requested_sizes() {
    for sub in ["ft-invert", "lt-invert", "control", "ode", "wiener-hopf"] {
        let (code, csv, _) = invoke(&[sub, "--n", "6", "--fine-points", "37"]);
        assert_eq!(code, EXIT_OK, "{sub}");
        assert!(csv.starts_with("# metadata: {"), "{sub}");
        assert_eq!(section_rows(&csv, "coarse"), 6, "{sub}");
        assert_eq!(section_rows(&csv, "fine"), 37, "{sub}");
    }
}

#[test]
fn defaults_match_the_demo_intervals() {
    let (_, json, _) = invoke(&["ode", "--format", "json"]);
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["metadata"]["b"], 0.5);
    let first = &v["fine"][0];
    assert_eq!(first["exact"].as_f64().unwrap(), first["t"].as_f64().unwrap().tan());
    let (_, json, _) = invoke(&["control", "--format", "json"]);
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["metadata"]["exact_column"], "reference");
    assert_eq!(v["metadata"]["beta"], 0.7);
    assert!(v["metadata"]["route_discrepancy"].as_f64().unwrap() < 1e-10);
}

#[test]
fn conjecture_scan_json() {
    let (code, json, _) = invoke(&["conjecture", "--family", "legendre", "--n-max", "40"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["violations"], Value::Array(vec![]));
    assert_eq!(v["per_n"].as_array().unwrap().len(), 40);
    assert_eq!(v["per_n"][0]["eigs"], serde_json::json!([[1.0, 0.0]]));
    assert!(v["min_re_overall"].as_f64().unwrap() > 0.0);
    let (code, _, _) = invoke(&["conjecture", "--family", "chebyshev", "--n-max", "10", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn exit_codes() {
    assert_eq!(invoke(&["--help"]).0, EXIT_OK);
    assert_eq!(invoke(&["--version"]).0, EXIT_OK);
    let (code, _, err) = invoke(&["frobnicate"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("Usage"));
    assert_eq!(invoke(&["ode", "--bogus"]).0, EXIT_USAGE);
    assert_eq!(invoke(&["ode", "--n", "0"]).0, EXIT_USAGE);
    assert_eq!(invoke(&["ft-invert", "--a", "3", "--b", "1"]).0, EXIT_USAGE);
    assert_eq!(invoke(&["matrices", "--family", "gegenbauer:-2"]).0, EXIT_USAGE);
    assert_eq!(invoke(&["lt-invert", "--a", "0.5"]).0, EXIT_USAGE);
    // long interval: Picard diverges through the pole of tan
    let (code, _, err) = invoke(&["ode", "--b", "2"]);
    assert_eq!(code, EXIT_NUMERICAL);
    assert!(err.contains("diverged"));
}

#[test]
fn matrix_exports() {
    let (code, json, _) = invoke(&["matrices", "--n", "3", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&json).unwrap();
    let plus = v["plus"].as_array().unwrap();
    let minus = v["minus"].as_array().unwrap();
    let w = v["weights"].as_array().unwrap();
    for j in 0..3 {
        for k in 0..3 {
            let s = plus[j][k].as_f64().unwrap() + minus[j][k].as_f64().unwrap();
            assert!((s - w[k].as_f64().unwrap()).abs() < 1e-12);
        }
    }
    let (code, csv, _) = invoke(&["eigs", "--n", "4", "--side", "minus", "--a", "0", "--b", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(csv.lines().filter(|l| l.starts_with("minus,")).count(), 4);
    assert!(!csv.contains("plus,"));
}

#[test]
fn out_flag_writes_the_artifact() {
    let path = std::env::temp_dir().join(format!("indefint-cli-test-{}.csv", std::process::id()));
    let (code, stdout, _) = invoke(&["ft-invert", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(written, invoke(&["ft-invert"]).1);
}
