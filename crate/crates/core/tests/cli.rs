use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gaplab::report::{export_report, Format, Report};
use serde_json::Value;

fn gaplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaplab")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = gaplab(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn error_object(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))
}

#[test]
fn bounds_table_lists_zhang() {
    let csv = stdout(&["bounds"]);
    assert!(csv.starts_with("name,value,conditional,citation\n"));
    assert!(csv.contains(",70000000,"));
    let json = stdout(&["bounds", "--format", "json"]);
    assert!(json.contains("70000000"));
}

#[test]
fn malformed_formula_is_a_usage_error() {
    let out = gaplab(&["parse", "--expr", "1/(n^"]);
    assert_eq!(out.status.code(), Some(2));
    let err = error_object(&out);
    assert_eq!(err["error"]["kind"], "parse");
    assert!(err["error"]["message"].as_str().unwrap().contains("byte 5"));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_and_computation_exit_codes() {
    for args in [
        &["scan", "--limit", "100"][..],
        &["gaps"],
        &["gaps", "--limit", "100", "--r", "2"],
        &["scan", "--r", "2", "--limit", "100", "--epsilon", "0", "--epsilon-grid", "0,1"],
        &["gaps", "--limit", "100", "--format", "bin", "--out", "x.bin"],
        &["frobnicate"],
        &["sieve", "--limit", "ten"],
        &[],
    ] {
        let out = gaplab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(error_object(&out)["error"]["kind"], "usage");
    }
    for (args, kind) in [
        (&["sieve", "--limit", "1"][..], "sieve"),
        (&["sieve", "--limit", "2000000000000"], "sieve"),
        (&["star", "--expr", "2 - n", "--r", "2", "--n-max", "4096"], "star"),
        (&["scan", "--r", "-1", "--limit", "100"], "star"),
        (&["scan", "--r", "2", "--limit", "100", "--n-lo", "1"], "star"),
        (&["series", "--limit", "100", "--checkpoints", "26"], "series"),
    ] {
        let out = gaplab(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert_eq!(error_object(&out)["error"]["kind"], kind, "{args:?}");
    }
    assert_eq!(gaplab(&["--help"]).status.code(), Some(0));
}

#[test]
fn scan_csv_has_every_twin_pair() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hits.csv");
    let p = path.to_str().unwrap();
    stdout(&["scan", "--r", "2", "--epsilon", "0", "--limit", "1000000", "--out", p]);
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,p_n,p_next,g_n,threshold,borderline"));
    let twins = lines.filter(|l| l.split(',').nth(3) == Some("2")).count();
    assert_eq!(twins, 8169);
    assert!(!text.contains('\r'));
}

#[test]
fn gaps_and_series_outputs() {
    let csv = stdout(&["gaps", "--limit", "10000"]);
    assert!(csv.starts_with("gap,count\n1,1\n2,205\n4,202\n6,299\n"));
    let csv = stdout(&["series", "--limit", "100"]);
    assert!(csv.starts_with("n,p_n,partial_sum,pnt_ratio,loglog_gap\n"));
    assert!(csv.lines().last().unwrap().starts_with("25,97,1.80281720104887,"));
    let json = stdout(&["sieve", "--limit", "1e6", "--format", "json"]);
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["prime_count"], 78498);
    assert_eq!(v["last_prime"], 999983);
}

#[test]
fn limit_spellings_agree() {
    let a = stdout(&["sieve", "--limit", "1000000", "--format", "json"]);
    for spelling in ["1_000_000", "1e6", "10^6"] {
        assert_eq!(stdout(&["sieve", "--limit", spelling, "--format", "json"]), a);
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "command = \"scan\"\nr = 2.0\nlimit = 1000\nformat = \"json\"\n").unwrap();
    let c = cfg.to_str().unwrap();
    let v: Value = serde_json::from_str(&stdout(&["--config", c])).unwrap();
    assert_eq!(v["limit"], 1000);
    let v: Value = serde_json::from_str(&stdout(&["--config", c, "--limit", "500", "--r", "3"])).unwrap();
    assert_eq!(v["limit"], 500);
    assert_eq!(v["r"], 3.0);
    fs::write(&cfg, "command = \"scan\"\nbogus = 1\n").unwrap();
    assert_eq!(gaplab(&["--config", c]).status.code(), Some(2));
}

#[test]
fn stdout_dash_and_file_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let args = ["star", "--expr", "1/ln(n)^2", "--r", "2", "--n-max", "65536"];
    let piped = stdout(&[&args[..], &["--out", "-"]].concat());
    stdout(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert_eq!(fs::read_to_string(&path).unwrap(), piped);
}

fn json_reports() -> Vec<Vec<&'static str>> {
    vec![
        vec!["sieve", "--nth", "1000", "--format", "json"],
        vec!["gaps", "--limit", "100000", "--format", "json"],
        vec!["series", "--limit", "100000", "--format", "json"],
        vec!["parse", "--expr", "1/(n*ln(n)^1.5)"],
        vec!["star", "--expr", "1/(n*ln(n)^2)", "--r", "2", "--n-max", "65536"],
        vec!["scan", "--r", "2", "--limit", "100000", "--format", "json"],
        vec!["scan", "--r", "2", "--limit", "100000", "--epsilon-grid", "0,0.5,2", "--format", "json"],
        vec!["bounds", "--format", "json"],
    ]
}

#[test]
fn json_reports_round_trip() {
    for args in json_reports() {
        let text = stdout(&args);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema_version"], "1.0");
        let report = Report::from_json(text.as_bytes()).unwrap_or_else(|e| panic!("{args:?}: {e}"));
        let again = export_report(&report, Format::Json).unwrap();
        assert_eq!(String::from_utf8(again).unwrap(), text, "{args:?}");
        let reread = Report::from_json(text.as_bytes()).unwrap();
        assert_eq!(reread, report);
    }
}

fn run_to(dir: &Path, name: &str, args: &[&str], threads: &str) -> Vec<u8> {
    let path = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--threads", threads, "--out", path.to_str().unwrap()]);
    stdout(&full);
    fs::read(&path).unwrap()
}

#[test]
fn artifacts_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("primes.csv", vec!["sieve", "--limit", "2000000", "--segment-size", "4096"]),
        ("primes.bin", vec!["sieve", "--limit", "2000000"]),
        ("gaps.csv", vec!["gaps", "--limit", "1000000"]),
        ("gaps.json", vec!["gaps", "--limit", "1000000"]),
        ("series.csv", vec!["series", "--limit", "1000000"]),
        ("hits.csv", vec!["scan", "--r", "2", "--limit", "1000000"]),
        ("scan.json", vec!["scan", "--r", "4", "--epsilon", "0.5", "--limit", "300000"]),
        ("star.json", vec!["star", "--expr", "1/ln(n)^2", "--r", "2", "--n-max", "262144"]),
    ];
    for (name, args) in cases {
        let one = run_to(dir.path(), name, &args, "1");
        let eight = run_to(dir.path(), name, &args, "8");
        let again = run_to(dir.path(), name, &args, "8");
        assert!(!one.is_empty());
        assert!(one == eight && eight == again, "{name} differs across runs");
    }
}
