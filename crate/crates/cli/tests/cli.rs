use std::process::{Command, Output};

use serde_json::Value;

fn sipotts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sipotts")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn drinfeld_prints_lambda_tables() {
    let o = sipotts(&["drinfeld", "--N", "3", "--L", "6"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("r=4"), "{s}");
    assert!(s.contains("Lambda: 1 50 141 50 1"), "{s}");
    assert_eq!(s.lines().filter(|l| l.starts_with("z_")).count(), 4);

    let s = stdout(&sipotts(&["drinfeld", "--N", "3", "--L", "3"]));
    assert!(s.contains("Lambda: 1 7 1"), "{s}");
}

#[test]
fn verify_writes_report_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.json");
    let o = sipotts(&[
        "verify", "--N", "3", "--L", "3", "--check", "lambda.tables,tau2.commute,comm.sector", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("3 passed, 0 failed, 0 skipped"), "{s}");

    let report: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["config"]["N"], 3);
    assert_eq!(report["config"]["L"], 3);
    let ids: Vec<&str> = report["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["comm.sector", "lambda.tables", "tau2.commute"]);
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));

    let shown = sipotts(&["report", out.to_str().unwrap()]);
    assert!(shown.status.success());
    assert!(stdout(&shown).contains("PASS  lambda.tables"));
}

#[test]
fn verify_skips_when_n_does_not_divide_l() {
    let o = sipotts(&["verify", "--N", "3", "--L", "4", "--check", "serre.q0.exhaustive"]);
    assert!(o.status.success());
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let check = &report["checks"][0];
    assert_eq!(check["status"], "skip");
    assert_eq!(check["reason"], "L not multiple of N");
}

#[test]
fn verify_runs_are_deterministic() {
    let run = || {
        let o = sipotts(&["verify", "--N", "3", "--L", "3", "--check", "serre.q0.sampled", "--samples", "5", "--seed", "7"]);
        assert!(o.status.success());
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["wall_ms"] = Value::Null;
        for c in v["checks"].as_array_mut().unwrap() {
            c["elapsed_ms"] = Value::Null;
        }
        v
    };
    assert_eq!(run(), run());
}

#[test]
fn configuration_errors_exit_two() {
    let o = sipotts(&["verify", "--N", "3", "--L", "3", "--check", "no.such.check"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("lambda.tables"), "{err}");

    let o = sipotts(&["verify", "--N", "3", "--L", "3", "--Q", "3"]);
    assert_eq!(o.status.code(), Some(2));

    let o = sipotts(&["verify", "--N", "3", "--L", "3", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn spectrum_reports_degenerate_ground_level() {
    let o = sipotts(&["spectrum", "--N", "3", "--L", "3", "--t", "0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["t_re", "t_im", "Q", "eigenvalue_re", "eigenvalue_im", "multiplicity"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let total: usize = rows.iter().map(|r| r[5].parse::<usize>().unwrap()).sum();
    assert_eq!(total, 9);
    // (1 − ωt)³ + (1 − t)³ at t = 1/2
    let w = num_complex::Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let target = (1.0 - w * 0.5).powu(3) + 0.125;
    let ground = rows
        .iter()
        .find(|r| {
            let z = num_complex::Complex64::new(r[3].parse().unwrap(), r[4].parse().unwrap());
            (z - target).norm() < 1e-8
        })
        .expect("ground eigenvalue present");
    assert_eq!(&ground[5], "4");
}

#[test]
fn gen_populates_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let o = sipotts(&["gen", "--N", "3", "--L", "3", "--cache-dir", cache.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let files = walk(&cache);
    assert!(!files.is_empty());

    let again = sipotts(&["gen", "--N", "3", "--L", "3", "--cache-dir", cache.to_str().unwrap()]);
    assert!(again.status.success());
    assert_eq!(walk(&cache), files);

    let o = sipotts(&[
        "verify", "--N", "3", "--L", "3", "--check", "serre.q0.exhaustive", "--cache-dir", cache.to_str().unwrap(),
    ]);
    assert!(o.status.success());
}

fn walk(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out.sort();
    out
}
