use std::path::Path;
use std::process::{Command, Output};

use hsbm_core::datasets::{karate, load_named};
use hsbm_core::graph::{format_edge_list, format_labels};
use serde_json::Value;

const TWO_LEAF: &str =
    r#"{"tree": {"p": 0.05, "children": [{"p": 0.6, "size": 30}, {"p": 0.5, "size": 20}]}}"#;

fn hsbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hsbm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn help_and_usage_exit_codes() {
    assert_eq!(hsbm(&["--help"]).status.code(), Some(0));
    assert_eq!(hsbm(&["--version"]).status.code(), Some(0));
    assert_eq!(hsbm(&["sample"]).status.code(), Some(1));
    assert_eq!(hsbm(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        hsbm(&["--solver", "qr", "spectrum", "--model", "x"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn missing_and_malformed_inputs_are_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.edges", "0 1\n1 x\n");
    assert_eq!(
        hsbm(&["spectrum", "--model", "/no/such/model.json"])
            .status
            .code(),
        Some(2)
    );
    let o = hsbm(&["cluster", "--input", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":2:"));
    let bad_rule = hsbm(&["cluster", "--input", &bad, "--rule", "sometimes"]);
    assert_eq!(bad_rule.status.code(), Some(1));
}

#[test]
fn sample_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "m.json", TWO_LEAF);
    let labels = dir.path().join("labels.txt");
    let a = hsbm(&[
        "--seed",
        "7",
        "sample",
        "--model",
        &model,
        "--labels-out",
        labels.to_str().unwrap(),
    ]);
    let b = hsbm(&["--seed", "7", "sample", "--model", &model]);
    let c = hsbm(&["--seed", "8", "sample", "--model", &model]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert_ne!(stdout(&a), stdout(&c));
    assert!(stdout(&a).starts_with("# n=50\n"));
    let labels = std::fs::read_to_string(labels).unwrap();
    assert_eq!(labels.lines().next(), Some("0 0"));
    assert_eq!(labels.lines().last(), Some("49 1"));
}

#[test]
fn spectrum_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "m.json", TWO_LEAF);
    let o = hsbm(&["spectrum", "--model", &model]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["node_code", "eigenvalue", "multiplicity"]);
    assert_eq!(rows[1], ["ones", "0", "1"]);
    // Root: n * p_root = 50 * 0.05 = 2.5, simple.
    assert_eq!(rows[2][0], "");
    assert!((rows[2][1].parse::<f64>().unwrap() - 2.5).abs() < 1e-12);
    assert_eq!(rows[2][2], "1");
    let total: usize = rows[1..]
        .iter()
        .map(|r| r[2].parse::<usize>().unwrap())
        .sum();
    assert_eq!(total, 50);
}

#[test]
fn cluster_and_metrics_on_karate() {
    let dir = tempfile::tempdir().unwrap();
    let k = karate();
    let edges = write(dir.path(), "karate.edges", &format_edge_list(&k.graph));
    let truth = write(dir.path(), "truth.txt", &format_labels(&k.labels));
    let out = dir.path().join("d.json");
    let o = hsbm(&[
        "--out",
        out.to_str().unwrap(),
        "cluster",
        "--input",
        &edges,
        "--max-depth",
        "1",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let tree: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let children = tree["children"].as_array().unwrap();
    assert_eq!(children.len(), 2);

    let mut est = vec![String::new(); 34];
    for child in children {
        for v in child["vertices"].as_array().unwrap() {
            est[v.as_u64().unwrap() as usize] = child["code"].as_str().unwrap().to_string();
        }
    }
    let est = write(dir.path(), "est.txt", &format_labels(&est));
    let m = hsbm(&["metrics", "--truth", &truth, "--est", &est]);
    assert_eq!(m.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&m)).unwrap();
    assert!((report["completeness"].as_f64().unwrap() - 0.840).abs() < 0.02);
    assert_eq!(report["n"], 34);
    assert_eq!(report["K_true"], 2);
    assert_eq!(report["K_est"], 2);
}

#[test]
fn one_based_input_matches_zero_based() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "z.edges", "0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n2 3\n");
    let one = write(dir.path(), "o.edges", "1 2\n2 3\n3 1\n4 5\n5 6\n6 4\n3 4\n");
    let a = hsbm(&["cluster", "--input", &zero]);
    let b = hsbm(&["cluster", "--input", &one, "--one-based"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn experiment_outputs_are_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "m.json", TWO_LEAF);
    let spec = write(
        dir.path(),
        "spec.json",
        r#"{"kind": "synthetic", "model": "m.json", "trials": 3, "master_seed": 5, "out_dir": "runs/a"}"#,
    );
    let first = hsbm(&["experiment", "--spec", &spec]);
    assert_eq!(
        first.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let other = dir.path().join("b");
    let second = hsbm(&[
        "--out",
        other.to_str().unwrap(),
        "experiment",
        "--spec",
        &spec,
    ]);
    assert_eq!(second.status.code(), Some(0));
    for name in ["trials.csv", "summary.json", "fiedler_trial0.csv"] {
        let a = std::fs::read(dir.path().join("runs/a").join(name)).unwrap();
        let b = std::fs::read(other.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs");
    }
    let reseeded = dir.path().join("c");
    hsbm(&[
        "--seed",
        "6",
        "--out",
        reseeded.to_str().unwrap(),
        "experiment",
        "--spec",
        &spec,
    ]);
    assert_ne!(
        std::fs::read(other.join("trials.csv")).unwrap(),
        std::fs::read(reseeded.join("trials.csv")).unwrap()
    );
}

#[test]
fn experiment_without_output_dir_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "spec.json",
        r#"{"kind": "real", "dataset": "karate"}"#,
    );
    assert_eq!(
        hsbm(&["experiment", "--spec", &spec]).status.code(),
        Some(1)
    );
    let out = dir.path().join("out");
    let o = hsbm(&[
        "--out",
        out.to_str().unwrap(),
        "experiment",
        "--spec",
        &spec,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = std::fs::read_to_string(out.join("completeness.csv")).unwrap();
    assert!(csv.lines().count() >= 2);
    assert!(out.join("dendrogram.json").exists());
}

#[test]
fn fetch_converts_local_gml() {
    let dir = tempfile::tempdir().unwrap();
    let gml = write(
        dir.path(),
        "toy.gml",
        r#"graph [ directed 1
  node [ id 1 label "a" value "x" ] node [ id 2 label "b" value "x" ]
  node [ id 3 label "c" value "y" ] node [ id 4 label "d" value "y" ]
  edge [ source 1 target 2 ] edge [ source 2 target 1 ] edge [ source 3 target 4 ]
  edge [ source 2 target 3 ] edge [ source 4 target 4 ] ]"#,
    );
    let data = dir.path().join("data");
    let o = hsbm(&[
        "fetch",
        "football",
        "--file",
        &gml,
        "--data-dir",
        data.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let ds = load_named("football", &data).unwrap();
    assert_eq!(ds.graph.n(), 4);
    assert_eq!(ds.graph.edges(), &[(0, 1), (1, 2), (2, 3)]);
    assert_eq!(ds.labels, vec!["x", "x", "y", "y"]);
    let manifest = std::fs::read_to_string(data.join("MANIFEST.tsv")).unwrap();
    assert!(manifest.starts_with("name\tsha256\tn\tedges\torigin\nfootball\t"));

    let wrong = hsbm(&[
        "fetch",
        "football",
        "--file",
        &gml,
        "--data-dir",
        data.to_str().unwrap(),
        "--sha256",
        "00",
    ]);
    assert_eq!(wrong.status.code(), Some(2));
    let unlabelled = hsbm(&[
        "fetch",
        "dolphins",
        "--file",
        &gml,
        "--data-dir",
        data.to_str().unwrap(),
    ]);
    assert_eq!(unlabelled.status.code(), Some(2));
    let no_source = hsbm(&["fetch", "ukfaculty", "--data-dir", data.to_str().unwrap()]);
    assert_eq!(no_source.status.code(), Some(1));
}
