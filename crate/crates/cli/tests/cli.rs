use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use frugal_cli::instance::SystemSpec;
use frugal_cli::{parse_instance, to_text, InstanceFile};
use proptest::prelude::*;
use serde_json::Value;

fn frugal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frugal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn error_record(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(1));
    let line = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(line.trim()).unwrap_or_else(|e| panic!("{e}: {line}"))
}

#[test]
fn run_reports_diamond() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let status = frugal(&[
        "run",
        "--instance",
        path_str(&fixture("diamond.json")),
        "--mechanism",
        "vcg",
        "--out",
        path_str(&out),
    ]);
    assert!(status.status.success(), "{status:?}");
    let report = read_json(&out);
    let record = &report["records"][0];
    assert_eq!(record["mechanism"], "vcg");
    assert_eq!(record["winners"], serde_json::json!([0, 2]));
    assert_eq!(record["total"].as_f64(), Some(8.0));
    assert!((record["nu"].as_f64().unwrap() - 6.0).abs() < 1e-9);
    assert!((record["mu"].as_f64().unwrap() - 6.0).abs() < 1e-9);
}

#[test]
fn run_without_mechanism_uses_every_applicable_one() {
    let out = frugal(&[
        "run",
        "--instance",
        path_str(&fixture("para4.json")),
        "--no-benchmarks",
    ]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = report["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["mechanism"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["kpath", "sqrt", "vcg"]);
    let totals: Vec<f64> = report["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["total"].as_f64().unwrap())
        .collect();
    assert!((totals[0] - 2.0).abs() < 1e-7);
    assert!((totals[1] - 2.0).abs() < 1e-7);
    assert_eq!(totals[2], 4.0);
    assert!(report["records"][0]["nu"].is_null());
}

#[test]
fn benchmark_writes_lower_bounds_and_probe() {
    let out = frugal(&[
        "benchmark",
        "--instance",
        path_str(&fixture("diamond.json")),
        "--grid",
        "2",
    ]);
    assert!(out.status.success());
    let file: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(file["reference"], serde_json::json!([0, 2]));
    assert!((file["nu_lower"].as_f64().unwrap() - 6.0).abs() < 1e-9);
    assert!((file["mu_lower"].as_f64().unwrap() - 6.0).abs() < 1e-9);
    assert_eq!(file["probe"]["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_passes_on_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify.json");
    let status = frugal(&["verify", "--out", path_str(&out)]);
    assert_eq!(
        status.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let report = read_json(&out);
    assert_eq!(report["failed"], 0);
    assert_eq!(report["instances"].as_array().unwrap().len(), 6);
}

#[test]
fn experiment_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = frugal(&[
            "experiment",
            "--kind",
            "layered-dag",
            "--count",
            "100",
            "--seed",
            "7",
            "--out",
            path_str(&out),
        ]);
        assert_eq!(status.status.code(), Some(0));
        std::fs::read(&out).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "instance_digest,mechanism,k,alpha,payment,nu,mu,ratio_nu,ratio_mu,bound_nu,bound_mu"
    );
    assert_eq!(lines.count(), 100);
    let report = read_json(&dir.path().join("a.json"));
    assert_eq!(report["violations"], 0);
    assert_eq!(report["records"].as_array().unwrap().len(), 100);
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        vec![
            "gen".to_string(),
            "--kind".into(),
            "random-gnp-cover".into(),
            "--seed".into(),
            "42".into(),
            "--count".into(),
            "3".into(),
            "--out".into(),
            out.display().to_string(),
        ]
    };
    for sub in ["a", "b"] {
        let out = dir.path().join(sub);
        let argv = args(&out);
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        assert!(frugal(&argv).status.success());
    }
    for i in 0..3 {
        let name = format!("random-gnp-cover-{i:04}.json");
        let a = std::fs::read(dir.path().join("a").join(&name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(&name)).unwrap();
        assert_eq!(a, b);
    }
}

fn without_provenance(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("provenance");
    v
}

#[test]
fn generators_reproduce_fixtures() {
    for (args, name) in [
        (&["--kind", "star", "--m", "4"][..], "star4.json"),
        (
            &["--kind", "parallel-paths", "--lengths", "1,4"][..],
            "para4.json",
        ),
    ] {
        let mut argv = vec!["gen"];
        argv.extend_from_slice(args);
        let out = frugal(&argv);
        assert!(out.status.success());
        let generated: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(
            without_provenance(generated),
            read_json(&fixture(name)),
            "{name}"
        );
    }
}

#[test]
fn syntax_error_is_reported_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"version\": 1,\n  \"costs\": [1,, 2]\n}\n").unwrap();
    let record = error_record(&frugal(&["run", "--instance", path_str(&bad)]));
    assert_eq!(record["error"], "syntax");
    assert!(record["message"].as_str().unwrap().contains("line 3"));
}

#[test]
fn dangling_vertex_is_reported_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("dangling.json");
    let text = std::fs::read_to_string(fixture("diamond.json"))
        .unwrap()
        .replace("[2, 3]]", "[2, 9]]");
    assert!(text.contains("[2, 9]"));
    std::fs::write(&bad, text).unwrap();
    let record = error_record(&frugal(&["benchmark", "--instance", path_str(&bad)]));
    assert_eq!(record["error"], "validation");
    assert!(record["message"].as_str().unwrap().contains("dangling"));
}

#[test]
fn unreadable_instance_is_an_io_error() {
    let record = error_record(&frugal(&[
        "run",
        "--instance",
        "/nonexistent/instance.json",
    ]));
    assert_eq!(record["error"], "io");
}

#[test]
fn fixtures_round_trip_bit_for_bit() {
    for entry in std::fs::read_dir(fixture("")).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let first = parse_instance(&text).unwrap();
        let again = parse_instance(&to_text(&first.file).unwrap()).unwrap();
        assert_eq!(first.file, again.file, "{}", path.display());
        let bits = |c: &[f64]| c.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(first.costs()), bits(again.costs()));
        assert_eq!(first.digest(), again.digest());
    }
}

proptest! {
    #[test]
    fn costs_survive_serialization(costs in proptest::collection::vec(0.0..1e12f64, 4)) {
        let mut file = InstanceFile::new(
            SystemSpec::KPath {
                vertices: 4,
                source: 0,
                sink: 3,
                edges: vec![(0, 1), (0, 2), (1, 3), (2, 3)],
            },
            costs.clone(),
        );
        file.k = Some(1);
        let parsed = parse_instance(&to_text(&file).unwrap()).unwrap();
        let bits = |c: &[f64]| c.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(parsed.costs()), bits(&costs));
    }
}
