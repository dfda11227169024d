use std::fs;
use std::path::Path;

use fairdiv::cli::{cmd_lowerbound, main_with_args, RUN_CSV_HEADER, SWEEP_CSV_HEADER};

const CONFIG: &str = r#"
[instance]
n = 2
m = 2
T = 400
a = 0.2
b = 0.8
mu_star = [[0.7, 0.3], [0.4, 0.6]]
noise_sigma = 0.1
seed = 11

[policy]
kind = "ucb_fair"
warmup_scale = 0.05

[grid]
spacing = "auto"
cap = 64
"#;

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("config.toml");
    fs::write(&p, text).unwrap();
    p
}

fn call(args: &[&str]) -> i32 {
    let mut full = vec!["fairdiv"];
    full.extend_from_slice(args);
    main_with_args(full)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_twice_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CONFIG);
    let (o1, o2) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(call(&["run", "--config", s(&cfg), "--output-dir", s(&o1)]), 0);
    assert_eq!(call(&["run", "--config", s(&cfg), "--output-dir", s(&o2)]), 0);
    let a = fs::read(o1.join("run.csv")).unwrap();
    assert_eq!(a, fs::read(o2.join("run.csv")).unwrap());

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), RUN_CSV_HEADER.join(","));
    assert_eq!(lines.count(), 400);

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(o1.join("summary.json")).unwrap()).unwrap();
    assert!(summary["final_regret"].as_f64().unwrap() >= 0.0);
    assert_eq!(summary["config"]["instance"]["T"], 400);
}

#[test]
fn oracle_run_has_zero_regret() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &CONFIG.replace("\"ucb_fair\"", "\"oracle\""));
    let out = tmp.path().join("o");
    assert_eq!(call(&["run", "--config", s(&cfg), "--output-dir", s(&out)]), 0);
    let mut r = csv::Reader::from_path(out.join("run.csv")).unwrap();
    let last = r.records().last().unwrap().unwrap();
    let cum: f64 = last[5].parse().unwrap();
    assert!(cum.abs() < 1e-9);
}

#[test]
fn config_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let cfg = write_config(tmp.path(), &format!("{CONFIG}\nbogus = 1\n"));
    assert_eq!(call(&["run", "--config", s(&cfg), "--output-dir", s(&out)]), 1);
    let cfg = write_config(tmp.path(), &CONFIG.replace("a = 0.2", "a = 0.9"));
    assert_eq!(call(&["run", "--config", s(&cfg), "--output-dir", s(&out)]), 1);
    let missing = tmp.path().join("missing.toml");
    assert_eq!(call(&["run", "--config", s(&missing), "--output-dir", s(&out)]), 1);
    assert_eq!(call(&["run"]), 1);
}

#[test]
fn sweep_writes_rows_and_medians() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &CONFIG.replace("T = 400", "T = 100"));
    let out = tmp.path().join("o");
    let code = call(&[
        "sweep", "--config", s(&cfg), "--param", "policy.kind", "--values", "uar,oracle", "--seeds", "1,2,3",
        "--output-dir", s(&out),
    ]);
    assert_eq!(code, 0);
    let mut r = csv::Reader::from_path(out.join("sweep.csv")).unwrap();
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), SWEEP_CSV_HEADER.to_vec());
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 6 + 2);
    assert_eq!(rows.iter().filter(|x| &x[2] == "median").count(), 2);
    let oracle_median = rows.iter().find(|x| &x[2] == "median" && &x[1] == "oracle").unwrap();
    assert!(oracle_median[4].parse::<f64>().unwrap().abs() < 1e-9);

    let code = call(&["sweep", "--config", s(&cfg), "--param", "T", "--values", "--output-dir", s(&out)]);
    assert_eq!(code, 1);
    let code = call(&["sweep", "--config", s(&cfg), "--param", "nope", "--values", "1", "--output-dir", s(&out)]);
    assert_eq!(code, 1);
}

#[test]
fn output_dir_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &CONFIG.replace("T = 400", "T = 20"));
    let env_dir = tmp.path().join("env");
    // Only this test touches the variable.
    std::env::set_var("FAIRDIV_OUTPUT_DIR", &env_dir);
    let code = call(&["run", "--config", s(&cfg)]);
    std::env::remove_var("FAIRDIV_OUTPUT_DIR");
    assert_eq!(code, 0);
    assert!(env_dir.join("run.csv").exists());
}

#[test]
fn lowerbound_uniform_statistic() {
    let mut buf = Vec::new();
    cmd_lowerbound(3000, &[0, 1], "uar", 1.0, 1.0, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    for row in &rows {
        // Each of the three witness cells holds 1/3 every round.
        assert!((row[2].parse::<f64>().unwrap() - 3000.0).abs() < 1e-9);
    }
    assert_eq!(call(&["lowerbound", "--T", "2744", "--policy", "uar"]), 1);
    assert_eq!(call(&["lowerbound", "--T", "3000", "--policy", "nope"]), 1);
}

#[test]
fn verify_suites() {
    for suite in ["lp", "robust", "lowerbound"] {
        assert_eq!(call(&["verify", "--suite", suite]), 0, "suite {suite}");
    }
    assert_eq!(call(&["verify", "--suite", "nope"]), 1);
}
