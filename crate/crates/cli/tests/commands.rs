use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mixassoc"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const WELLBEING_CONFIG: &str = r#"{
  "data": "data.csv",
  "outcomes": [
    {"column": "wellbeing", "kind": "continuous"},
    {"column": "anxiety", "kind": "ordinal", "family": "adjacent_category_logit"}
  ],
  "covariates": ["strain", "health", "loneliness", "accommodation", "age", "gender"],
  "m": 5,
  "b": 120,
  "seed": 11
}"#;

/// A simulated well-being dataset and a config pointing at it.
fn wellbeing_setup(dir: &Path, n: usize) -> PathBuf {
    let data = dir.join("data.csv");
    let out = run(&["simulate", "--scenario", "wellbeing", "--seed", "3", "--n", &n.to_string(), "--out", s(&data)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, WELLBEING_CONFIG).unwrap();
    cfg
}

#[test]
fn simulate_requires_a_seed() {
    let out = run(&["simulate", "--scenario", "power"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["power", "--reps", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic() {
    let a = run(&["simulate", "--scenario", "power", "--seed", "5", "--n", "50"]);
    let b = run(&["simulate", "--scenario", "power", "--seed", "5", "--n", "50"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("y1,y2,x1,x2"));
    assert_eq!(text.lines().count(), 51);
}

#[test]
fn assoc_report_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = wellbeing_setup(dir.path(), 400);
    let a = run(&["assoc", "--config", s(&cfg)]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&["assoc", "--config", s(&cfg)]);
    assert_eq!(a.stdout, b.stdout);

    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let pair = &report["pairs"][0];
    assert_eq!(pair["outcome1"], "wellbeing");
    let partial = pair["partial"]["estimate"].as_f64().unwrap();
    let marginal = pair["marginal"]["estimate"].as_f64().unwrap();
    assert!(partial < 0.0 && marginal < partial, "{marginal} {partial}");
    assert!(pair["partial"]["p_value"].as_f64().unwrap() < 0.05);
    assert!(pair["partial"].get("p_value_composite").is_none());
    assert!(pair["moderation"]["pct_change"].as_f64().is_some());
    assert_eq!(report["settings"]["seed"], 11);

    let c = run(&["assoc", "--config", s(&cfg), "--delta", "0.1", "--seed", "12"]);
    assert!(c.status.success());
    let report: serde_json::Value = serde_json::from_slice(&c.stdout).unwrap();
    let p = report["pairs"][0]["partial"]["p_value_composite"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn fit_and_moderation_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = wellbeing_setup(dir.path(), 300);
    let out = run(&["fit", "--config", s(&cfg)]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["n"], 300);
    assert_eq!(report["models"][1]["levels"].as_array().unwrap().len(), 5);
    assert_eq!(report["models"][0]["params"]["beta"].as_array().unwrap().len(), 6);

    let out_file = dir.path().join("mod.json");
    let out = run(&["moderation", "--config", s(&cfg), "--cohort2", s(&dir.path().join("data.csv")), "--out", s(&out_file)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_file).unwrap()).unwrap();
    assert!(report["pairs"][0]["pct_change"].as_f64().unwrap() < 0.0);
    let diff = &report["cohort_difference"][0];
    assert_eq!(diff["bootstrap"]["estimate"].as_f64(), Some(0.0));
}

#[test]
fn plotdata_writes_points_and_curve() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = wellbeing_setup(dir.path(), 200);
    let (points, curve) = (dir.path().join("p.csv"), dir.path().join("c.csv"));
    let out = run(&[
        "plotdata", "--config", s(&cfg), "--pair", "anxiety,wellbeing", "--points", s(&points), "--curve", s(&curve),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let p = std::fs::read_to_string(&points).unwrap();
    let mut lines = p.lines();
    assert_eq!(lines.next(), Some("# seed=11, surrogate column 0"));
    assert_eq!(lines.next(), Some("h_r1,h_r2"));
    assert_eq!(lines.count(), 200);
    let c = std::fs::read_to_string(&curve).unwrap();
    let rows: Vec<&str> = c.lines().skip(1).collect();
    assert_eq!(rows[0], "x,smooth");
    let xs: Vec<f64> = rows[1..].iter().map(|r| r.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(xs.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = wellbeing_setup(dir.path(), 100);
    // config error: unreadable config
    let out = run(&["fit", "--config", s(&dir.path().join("nope.json"))]);
    assert_eq!(out.status.code(), Some(2));
    // config error: a configured column missing from the data
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "wellbeing,anxiety\n1,2\n").unwrap();
    let out = run(&["fit", "--config", s(&cfg), "--data", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strain"));
    // data error: non-numeric covariate
    let mut text = std::fs::read_to_string(dir.path().join("data.csv")).unwrap();
    text.push_str("50.0,3,x,1,1,0,19,1\n");
    let broken = dir.path().join("broken.csv");
    std::fs::write(&broken, text).unwrap();
    let out = run(&["fit", "--config", s(&cfg), "--data", s(&broken)]);
    assert_eq!(out.status.code(), Some(3));
    // numerical failure: five rows, five categories, every resample degenerate
    let tiny_cfg = dir.path().join("tiny.json");
    std::fs::write(
        &tiny_cfg,
        r#"{"outcomes": [{"column": "a", "kind": "ordinal", "family": "adjacent_category_logit"},
                         {"column": "w", "kind": "continuous"}], "m": 2, "b": 100}"#,
    )
    .unwrap();
    let tiny = dir.path().join("tiny.csv");
    std::fs::write(&tiny, "a,w\n1,0.3\n2,-1.2\n3,0.8\n4,2.0\n5,-0.4\n").unwrap();
    let out = run(&["assoc", "--config", s(&tiny_cfg), "--data", s(&tiny)]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn power_table() {
    let out = run(&[
        "power", "--seed", "1", "--shapes", "linear", "--lambdas", "0,0.3", "--reps", "10", "--b", "100", "--m", "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "scenario_id,lambda,shape,method,rejection_rate,reps,seed");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("0,0.0,linear,proposed,"));
}
