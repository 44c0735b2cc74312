use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rdv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdv"))
        .args(args)
        .env_remove("RDV_WORKERS")
        .output()
        .expect("rdv runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = rdv(&all);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn assert_schema(name: &str, value: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::draft7::new(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(value).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

#[test]
fn eval_prints_exact_value() {
    let out = rdv(&["eval", "--n", "4", "--tactic-a", "1 1 1 1", "--tactic-b", "1 2 3 4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("w = 5/2"));
}

#[test]
fn bad_tactic_is_a_usage_error() {
    let out = rdv(&["eval", "--n", "3", "--tactic-a", "1 4 2", "--tactic-b", "1 2 3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("out of range"));
    assert_eq!(rdv(&["eval", "--n", "3"]).status.code(), Some(2));
    assert_eq!(rdv(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(rdv(&["phi", "--strategy-a", "/no/such/file", "--strategy-b", "uniform", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn engines_agree_through_the_cli() {
    let pair = ["--n", "5", "--tactic-a", "1 2 2 3 1", "--tactic-b", "2 2 1 4 5"];
    let mut enumerated = vec!["eval"];
    enumerated.extend(pair);
    enumerated.extend(["--engine", "enumeration"]);
    let mut ie = vec!["eval"];
    ie.extend(pair);
    let (a, b) = (json(&enumerated), json(&ie));
    assert_eq!(a["w"], b["w"]);
    assert_eq!(a["survival"], b["survival"]);
}

#[test]
fn outputs_match_schemas() {
    let pair = ["--n", "4", "--tactic-a", "1 1 2 2", "--tactic-b", "1 2 3 4"];
    for cmd in ["eval", "survival", "moments"] {
        let mut args = vec![cmd];
        args.extend(pair);
        assert_schema(cmd, &json(&args));
    }
    assert_schema("phi", &json(&["phi", "--n", "3", "--strategy-a", "uniform", "--strategy-b", "aw:1/4"]));
    assert_schema("verify", &json(&["verify", "all", "--n", "3"]));
    assert_schema("verify", &json(&["verify", "all", "--n", "6", "--samples", "50", "--seed", "1"]));
    assert_schema("verify", &json(&["verify", "dp-var", "--n", "4", "--tactic-a", "1 2 1 2", "--tactic-b", "1 2 2 1"]));
    assert_schema("verify", &json(&["verify", "theorem1-assembly", "--n", "3"]));
    assert_schema("verify", &json(&["verify", "split", "--n", "24", "--graphs", "20", "--seed", "2"]));
    assert_schema("scan-engines", &json(&["scan", "engines", "--n", "3"]));
    assert_schema("scan-engines", &json(&["scan", "engines", "--n", "6", "--samples", "20", "--seed", "4"]));
    assert_schema(
        "scan-aw",
        &json(&["scan", "aw", "--n", "8", "--thetas", "0,0.25,1", "--trials", "500", "--seed", "5"]),
    );
    assert_schema(
        "simulate",
        &json(&["simulate", "--n", "6", "--strategy-a", "baby", "--strategy-b", "mommy", "--trials", "100", "--seed", "1"]),
    );
    assert_schema("optimize-theta", &json(&["optimize", "theta", "--n", "3"]));
    assert_schema(
        "optimize-theta",
        &json(&["optimize", "theta", "--n", "6", "--mode", "mc", "--resolution", "3", "--trials", "200", "--seed", "1"]),
    );
    assert_schema("optimize-symmetric", &json(&["optimize", "symmetric", "--n", "3", "--restarts", "4", "--seed", "1"]));
    assert_schema("strategy-export", &json(&["strategy", "export", "aw:1/3", "--n", "3"]));
}

#[test]
fn same_kind_gap_exhaustive_passes() {
    let out = rdv(&["verify", "same-kind-gap", "--n", "4", "--mode", "exhaustive"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("PASS same-kind-gap"));
}

#[test]
fn exported_strategies_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for spec in ["uniform", "aw:1/4", "baby", "mommy"] {
        let path = dir.path().join("s.txt");
        let path_str = path.to_str().unwrap();
        let out = rdv(&["strategy", "export", spec, "--n", "3", "--output", path_str]);
        assert_eq!(out.status.code(), Some(0));
        let again = rdv(&["strategy", "export", path_str]);
        assert_eq!(stdout(&again), std::fs::read_to_string(&path).unwrap());
        let from_file = json(&["phi", "--n", "3", "--strategy-a", path_str, "--strategy-b", "uniform"]);
        let builtin = json(&["phi", "--n", "3", "--strategy-a", spec, "--strategy-b", "uniform"]);
        assert_eq!(from_file["phi"], builtin["phi"]);
    }
}

#[test]
fn csv_outputs() {
    let out = rdv(&["survival", "--n", "3", "--tactic-a", "1 1 1", "--tactic-b", "1 2 3", "--format", "csv"]);
    assert_eq!(stdout(&out), "k,survival,survival_decimal\n0,1/1,1.00000000000\n1,2/3,0.666666666667\n2,1/3,0.333333333333\n3,0/1,0\n");
    let out = rdv(&["moments", "--n", "3", "--tactic-a", "1 1 1", "--tactic-b", "1 2 3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sim.csv");
    let out = rdv(&[
        "simulate", "--n", "5", "--strategy-a", "uniform", "--strategy-b", "uniform", "--horizon", "50", "--trials", "100",
        "--seed", "3", "--csv", file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(file).unwrap();
    assert!(csv.starts_with("strategy_a,strategy_b,n,horizon"));
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn auto_seed_is_recorded() {
    let v = json(&["simulate", "--n", "4", "--strategy-a", "uniform", "--strategy-b", "uniform", "--trials", "50"]);
    let seed = v["seed"].as_u64().expect("seed recorded").to_string();
    let again = json(&["simulate", "--n", "4", "--strategy-a", "uniform", "--strategy-b", "uniform", "--trials", "50", "--seed", &seed]);
    assert_eq!(v, again);
}

#[test]
fn multiblock_needs_horizon_only_when_simulating() {
    let out = rdv(&["phi", "--n", "4", "--strategy-a", "aw:0.25:multiblock", "--strategy-b", "uniform"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&["simulate", "--n", "10", "--strategy-a", "aw:0.25:multiblock", "--strategy-b", "aw:0.25:multiblock",
        "--horizon", "200", "--trials", "200", "--seed", "1"]);
    assert_eq!(v["horizon"], 200);
}

#[test]
fn workers_do_not_change_results() {
    let cases: [&[&str]; 4] = [
        &["simulate", "--n", "7", "--strategy-a", "uniform", "--strategy-b", "aw:1/4", "--horizon", "70", "--trials", "9000", "--seed", "11"],
        &["verify", "all", "--n", "6", "--samples", "300", "--seed", "12"],
        &["optimize", "symmetric", "--n", "3", "--restarts", "5", "--seed", "13"],
        &["scan", "aw", "--n", "9", "--thetas", "0.2,0.3", "--trials", "5000", "--seed", "14"],
    ];
    for case in cases {
        let mut one = case.to_vec();
        one.extend(["--format", "json", "--workers", "1"]);
        let mut three = case.to_vec();
        three.extend(["--format", "json", "--workers", "3"]);
        assert_eq!(stdout(&rdv(&one)), stdout(&rdv(&three)), "{case:?}");
    }
}
