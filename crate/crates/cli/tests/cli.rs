use std::process::{Command, Output};

use rotbound::{compare_bounds, PaperConstants};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotbound")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn constants_digits() {
    let v = json(&["constants"]);
    let kappa = v["kappa"].as_f64().unwrap();
    assert!((kappa - 0.409_862_308_769_852).abs() < 1e-14);
    assert!(v["breakpoints"]["unit_preimage"].is_f64());
    for key in ["vartheta", "c_crit", "c_star", "c_kmm", "c_ms"] {
        let digits = v[key].to_string().trim_start_matches("0.").trim_start_matches("1.").len();
        assert!(digits <= 15, "{key}: {}", v[key]);
    }
}

#[test]
fn optimize_three_equal() {
    let v = json(&["optimize", "--theta", "1.2"]);
    assert_eq!(v["branch"], "THREE_EQUAL");
    assert_eq!(v["argmax"].as_array().unwrap().len(), 3);
}

#[test]
fn curve_csv_round_trip() {
    let out = run(&["curve", "--from", "0", "--to", "0.5", "--points", "500", "--format", "csv"]);
    assert!(out.status.success());
    let c = PaperConstants::solved();
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(reader.headers().unwrap(), vec!["x", "f_kmm", "f_ms", "m_star", "n"]);
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        let x: f64 = rec[0].parse().unwrap();
        let s = compare_bounds(x, c.kappa).unwrap();
        for (cell, expect) in rec.iter().skip(1).zip([s.kmm, s.ms, s.am, s.new]) {
            match expect {
                Some(e) => assert!((cell.parse::<f64>().unwrap() - e).abs() <= 1e-12, "x={x}"),
                None => assert!(cell.is_empty(), "x={x}: {cell}"),
            }
        }
        rows += 1;
    }
    assert_eq!(rows, 500);
}

#[test]
fn experiment_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.csv"), dir.path().join("b.csv")];
    let outs: Vec<Output> = paths
        .iter()
        .map(|p| {
            let p = p.to_str().unwrap();
            run(&["experiment", "--dim", "6", "--trials", "40", "--seed", "17", "--split-sigma", "--csv", p])
        })
        .collect();
    let strip = |o: &Output| {
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["csv"] = Value::Null;
        v
    };
    assert_eq!(strip(&outs[0]), strip(&outs[1]));
    assert_eq!(strip(&outs[0])["seed"], 17);
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("seed,dim,ratio,measured,bound,slack\n"));
    assert_eq!(text.lines().count(), 41);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("opt.json");
    let out = run(&["optimize", "--theta", "0.5", "--output", p.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&p).unwrap()).unwrap();
    assert_eq!(v["branch"], "SINGLE");
}

#[test]
fn brute_reports_closed_form() {
    let v = json(&["brute", "--theta", "0.6", "--n", "1", "--steps", "500"]);
    assert!(v["difference"].as_f64().unwrap().abs() < 1e-5);
}

#[test]
fn verification_subcommands() {
    let v = json(&["verify-appendix", "--lemma", "a4", "--grid", "2000"]);
    assert_eq!(v[0]["passed"], true);
    assert_eq!(json(&["verify-remark-am", "--x", "0.4"])["holds"], true);
    let p = json(&["path", "--dim", "4", "--ratio", "0.3", "--steps", "3", "--seed", "2"]);
    assert_eq!(p["seed"], 2);
    assert_eq!(p["steps"].as_array().unwrap().len(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["optimize", "--theta", "2.0"]).status.code(), Some(1));
    assert_eq!(run(&["optimize", "--theta", "nan"]).status.code(), Some(1));
    assert_eq!(run(&["optimize"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["verify-remark-am", "--x", "0.1"]).status.code(), Some(1));
    assert_eq!(run(&["curve", "--from", "0.3", "--to", "0.1"]).status.code(), Some(1));
    assert_eq!(run(&["experiment", "--dim", "1", "--trials", "2"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
