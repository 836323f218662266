use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ustlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ustlab")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
}

fn table<'a>(csv: &'a str, name: &str) -> Vec<&'a str> {
    let marker = format!("# table {name}");
    csv.lines().skip_while(|l| *l != marker).skip(1).take_while(|l| !l.starts_with('#')).collect()
}

#[test]
fn gen_two_cliques_edge_count() {
    let csv = stdout(&ustlab(&["gen", "--family", "two-cliques-bridge", "--n", "10"]));
    let graphs = table(&csv, "graphs");
    assert_eq!(graphs[0], "family,n,seed,m,min_degree,max_degree,delta,degree_ok");
    assert!(graphs[1].starts_with("two-cliques-bridge,10,"));
    assert_eq!(graphs[1].split(',').nth(3), Some("21"));
    assert_eq!(table(&csv, "edges").len(), 1 + 21);
}

#[test]
fn gen_dense_gnp_meets_degree() {
    let csv = stdout(&ustlab(&["gen", "--family", "dense-gnp:0.9", "--n", "100", "--delta", "0.7", "--seed", "3"]));
    let row = table(&csv, "graphs")[1].split(',').map(str::to_string).collect::<Vec<_>>();
    assert!(row[4].parse::<usize>().unwrap() >= 70);
    assert_eq!(row[7], "true");
}

#[test]
fn randomized_runs_need_a_seed() {
    let out = ustlab(&["sample", "--n", "5", "--trials", "2"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn star_control_has_diameter_two() {
    let csv = stdout(&ustlab(&["sample", "--family", "star", "--n", "12", "--trials", "5", "--seed", "1"]));
    let rows = table(&csv, "trees");
    assert_eq!(rows.len(), 6);
    for r in &rows[1..] {
        assert_eq!(r.split(',').nth(4), Some("2"));
    }
}

#[test]
fn sample_rows_carry_trial_seeds() {
    let csv = stdout(&ustlab(&["sample", "--n", "8", "--trials", "4", "--seed", "9"]));
    let rows = table(&csv, "trees");
    let seeds: std::collections::HashSet<&str> = rows[1..].iter().map(|r| r.split(',').nth(3).unwrap()).collect();
    assert_eq!(seeds.len(), 4);
}

#[test]
fn spectral_complete_graph() {
    let csv = stdout(&ustlab(&["spectral", "--n", "5", "--top", "2"]));
    let row: Vec<&str> = table(&csv, "spectra")[1].split(',').collect();
    let gap: f64 = row[3].parse().unwrap();
    assert!((gap - 1.25).abs() < 1e-12);
}

#[test]
fn decompose_reports_passing_audit() {
    let out = ustlab(&["decompose", "--family", "complete", "--n", "60", "--delta", "0.45", "--eps", "0.3"]);
    let csv = stdout(&out);
    assert_eq!(table(&csv, "decompositions")[1].rsplit(',').next(), Some("true"));
    assert_eq!(table(&csv, "labels").len(), 61);
}

#[test]
fn decompose_rejects_low_degree() {
    let out = ustlab(&["decompose", "--family", "star", "--n", "20", "--delta", "0.4"]);
    assert!(!out.status.success());
}

#[test]
fn json_output_has_schema() {
    let text = stdout(&ustlab(&["cheeger", "--n", "6", "--format", "json"]));
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["schema"], "ustlab/1");
    assert_eq!(doc["tables"]["instances"][0]["phi_exact"], true);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    fs::write(&config, r#"{"family": {"kind": "complete"}, "n": [7], "trials": 3, "seed": 11}"#).unwrap();
    let cfg = config.to_str().unwrap();
    let csv = stdout(&ustlab(&["sample", "--config", cfg, "--trials", "2"]));
    let rows = table(&csv, "trees");
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("complete,7,"));
}

#[test]
fn unknown_config_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    fs::write(&config, r#"{"n": [7], "trails": 3}"#).unwrap();
    assert!(!ustlab(&["gen", "--config", config.to_str().unwrap()]).status.success());
}

fn run_to(path: &Path, args: &[&str]) -> String {
    let mut all = args.to_vec();
    all.extend(["--out", path.to_str().unwrap()]);
    stdout(&ustlab(&all));
    fs::read_to_string(path).unwrap()
}

#[test]
fn replay_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 3] = [
        &["scaling", "--family", "complete", "--n", "16,32", "--trials", "6", "--seed", "42"],
        &["sample", "--family", "dense-gnp:0.6", "--n", "20", "--delta", "0.3", "--trials", "4", "--seed", "7"],
        &["cheeger", "--family", "dense-gnp:0.6", "--n", "10", "--trials", "3", "--seed", "7"],
    ];
    for args in cases {
        let a = run_to(&dir.path().join("a.csv"), args);
        let b = run_to(&dir.path().join("b.csv"), args);
        assert_eq!(data_rows(&a), data_rows(&b), "{args:?}");
        let threaded: Vec<&str> = args.iter().copied().chain(["--threads", "2"]).collect();
        let c = run_to(&dir.path().join("c.csv"), &threaded);
        assert_eq!(data_rows(&a), data_rows(&c), "{args:?} with two threads");
    }
}
