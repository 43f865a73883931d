use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graphon-dist"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/cospectral")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn test_against_itself_never_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let edges: String = (0..30)
        .map(|i| format!("{i} {}\n", (i * 7 + 3) % 30))
        .collect();
    let g = write(dir.path(), "g.txt", &edges);
    let v = stdout_json(&run(&["test", &g, &g, "--bootstrap", "30", "--seed", "4"]));
    assert_eq!(v["p_value"], 1.0);
    assert_eq!(v["reject"], false);
    assert_eq!(v["statistic"], 0.0);
    for key in [
        "statistic",
        "p_value",
        "reject",
        "n0",
        "bootstrap_samples",
        "seed",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn duplicate_edge_lists_have_zero_distance() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.txt", "0 1\n1 2\n2 3\n");
    let b = write(dir.path(), "b.txt", "0 1\n1 2\n2 3\n");
    let out = run(&["distance", "--edge-list", &a, &b]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "0,0\n0,0\n");
}

#[test]
fn sampled_population_round_trips_through_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let pop = dir.path().join("pop");
    let out = run(&[
        "sample",
        "--graphons",
        "W1,W4",
        "--per",
        "3",
        "--nmin",
        "40",
        "--nmax",
        "60",
        "--seed",
        "2",
        "--out",
        pop.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(pop.join("manifest.json")).unwrap()).unwrap();
    let graphs = manifest["graphs"].as_array().unwrap();
    assert_eq!(graphs.len(), 6);
    assert!(graphs
        .iter()
        .all(|g| (40..=60).contains(&g["nodes"].as_u64().unwrap())));

    let csv = dir.path().join("d.csv");
    let manifest_path = pop.join("manifest.json");
    let out = run(&[
        "distance",
        "--population",
        manifest_path.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 6);

    let v = stdout_json(&run(&[
        "cluster",
        "--population",
        manifest_path.to_str().unwrap(),
        "--K",
        "2",
        "--algorithm",
        "ssdp",
    ]));
    assert_eq!(v["labels"].as_array().unwrap().len(), 6);
    assert!(v["error"].as_f64().is_some());
}

#[test]
fn identical_runs_differ_only_in_metadata() {
    let args = [
        "cluster",
        "--algorithm",
        "ssdp",
        "--graphons",
        "W1,W2,W4",
        "--per",
        "4",
        "--nmin",
        "40",
        "--nmax",
        "60",
        "--K",
        "3",
        "--seed",
        "11",
    ];
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("metadata");
        serde_json::to_string(&v).unwrap()
    };
    let a = stdout_json(&run(&args));
    let b = stdout_json(&run(&args));
    assert!(a["metadata"]["timestamp"].is_string());
    assert_eq!(strip(a), strip(b));
}

#[test]
fn thread_count_does_not_change_results() {
    let args = [
        "cluster",
        "--graphons",
        "W1,W3",
        "--per",
        "5",
        "--K",
        "2",
        "--seed",
        "3",
    ];
    let mut one = args.to_vec();
    one.extend(["--threads", "1"]);
    let a = stdout_json(&run(&one));
    let b = stdout_json(
        &bin()
            .args(args)
            .env("GRAPHON_DIST_THREADS", "2")
            .output()
            .unwrap(),
    );
    assert_eq!(a["labels"], b["labels"]);
}

#[test]
fn tudataset_fixture_clusters_end_to_end() {
    let dir = fixture();
    let mut errors = Vec::new();
    for algorithm in ["dsc", "ssdp", "nclm"] {
        let v = stdout_json(&run(&[
            "cluster",
            "--tudataset",
            dir.to_str().unwrap(),
            "--K",
            "2",
            "--algorithm",
            algorithm,
            "--seed",
            "1",
        ]));
        assert_eq!(v["labels"].as_array().unwrap().len(), 10);
        errors.push(v["error"].as_f64().unwrap());
    }
    assert!(errors[0] < errors[2] && errors[1] < errors[2], "{errors:?}");
}

#[test]
fn failures_are_one_line_json_with_nonzero_status() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "0 1\n1 x\n");
    let cases: Vec<(Vec<String>, &str)> = vec![
        (vec!["test".into(), bad.clone(), bad.clone()], "parse"),
        (
            vec![
                "test".into(),
                "/nonexistent/a".into(),
                "/nonexistent/b".into(),
            ],
            "missing_file",
        ),
        (
            vec![
                "cluster".into(),
                "--graphons".into(),
                "W1".into(),
                "--per".into(),
                "3".into(),
                "--K".into(),
                "5".into(),
            ],
            "size",
        ),
        (
            vec![
                "cluster".into(),
                "--graphons".into(),
                "W7".into(),
                "--K".into(),
                "2".into(),
            ],
            "input",
        ),
        (vec!["frobnicate".into()], "usage"),
    ];
    for (args, kind) in cases {
        let out = bin().args(&args).output().unwrap();
        assert!(!out.status.success(), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.trim_end().lines().count(), 1, "{err}");
        let v: Value = serde_json::from_str(err.trim_end()).unwrap();
        assert_eq!(v["error"], kind, "{args:?}: {err}");
    }
}

#[test]
fn power_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let json_path = dir.path().join("p.json");
    let out = run(&[
        "power",
        "--graphons",
        "W1,W4",
        "--n",
        "40",
        "--n0",
        "4",
        "--trials",
        "20",
        "--bootstrap",
        "20",
        "--csv",
        csv.to_str().unwrap(),
        "--out",
        json_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(v["graphons"], serde_json::json!(["W1", "W4"]));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 2);
}

#[test]
fn small_benchmark_reports_every_combination() {
    let v = stdout_json(&run(&[
        "benchmark",
        "--seeds",
        "1",
        "--per",
        "3",
        "--nmin",
        "30",
        "--nmax",
        "40",
        "--n0",
        "3",
        "--algorithms",
        "dsc,nclm",
        "--no-power",
    ]));
    let cases = v["clustering"].as_array().unwrap();
    assert_eq!(cases.len(), 10);
    assert!(v.get("power").is_none());
}
