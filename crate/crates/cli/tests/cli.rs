use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn siegel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_siegel")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (String, Value) {
    let out = siegel(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&s).unwrap();
    (s, v)
}

fn column(v: &Value, key: &str) -> Vec<i64> {
    v["rows"].as_array().unwrap().iter().map(|r| r[key].as_i64().unwrap()).collect()
}

#[test]
fn q2_table_values() {
    let (_, v) = json(&["table", "--q", "2", "--n-max", "8", "--ext-sign", "1", "--format", "json"]);
    assert_eq!(column(&v, "dim"), vec![0, 0, 0, 1, 3, 7, 13, 23, 35]);
    assert_eq!(column(&v, "al")[6], 3);
    for key in ["config", "rows", "checks", "seed", "version"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["config"]["p"], 2);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn q3_constituent_at_level_five() {
    let (_, v) = json(&["table", "--q", "3", "--n-min", "5", "--n-max", "5", "--format", "json"]);
    let rows = v["rows"].as_array().unwrap();
    let c: Vec<_> = rows.iter().filter(|r| r["class"] == "constituent").collect();
    assert!(!c.is_empty());
    assert!(c.iter().all(|r| r["dim"] == 4));
}

#[test]
fn json_reemits_byte_identical() {
    let (s, v) = json(&["table", "--q", "4", "--n-max", "6", "--format", "json"]);
    let mut again = serde_json::to_string_pretty(&v).unwrap();
    again.push('\n');
    assert_eq!(s, again);
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(s.as_bytes()).unwrap();
    let back: Value = serde_json::from_str(&std::fs::read_to_string(f.path()).unwrap()).unwrap();
    assert_eq!(back, v);
}

#[test]
fn csv_has_header_and_lf() {
    let out = siegel(&["table", "--q", "3", "--n-max", "4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(!s.contains('\r'));
    let mut lines = s.lines();
    let header = lines.next().unwrap();
    assert!(header.contains("dim") && header.contains("class"));
    let width = header.split(',').count();
    let rows: Vec<_> = lines.collect();
    assert!(!rows.is_empty());
    // sigma cells are quoted, so count fields outside quotes
    for r in rows {
        let mut fields = 1;
        let mut quoted = false;
        for ch in r.chars() {
            match ch {
                '"' => quoted = !quoted,
                ',' if !quoted => fields += 1,
                _ => {}
            }
        }
        assert_eq!(fields, width, "{r}");
    }
}

#[test]
fn sigma_selector() {
    let (_, v) = json(&["table", "--q", "4", "--n-max", "5", "--sigma", "1,14,full,u1", "--format", "json"]);
    assert_eq!(v["rows"][0]["sigma"], "14,1,full");
    let (_, v) = json(&["table", "--q", "3", "--n-max", "5", "--sigma", "2,2,plus", "--ext-sign", "-1", "--format", "json"]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);
    assert_eq!(v["rows"][5]["al"], -2);
}

#[test]
fn support_listings() {
    let (_, v) = json(&["support", "--q", "2", "--n", "4", "--format", "json"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows.iter().filter(|r| r["ctype"] == "I").count(), 2);
    let ii: Vec<_> = rows.iter().filter(|r| r["ctype"] == "II").collect();
    assert_eq!(ii.len(), 1);
    assert_eq!(ii[0]["self_paired"], true);

    let (_, v) = json(&["support", "--q", "3", "--n", "3", "--format", "json"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0]["i"].as_i64(), rows[0]["j"].as_i64()), (Some(0), Some(1)));
    assert_eq!(rows[0]["self_paired"], true);

    let (_, v) = json(&["support", "--q", "2", "--n", "7", "--format", "json"]);
    let b: Vec<_> = v["rows"].as_array().unwrap().iter().filter(|r| r["ctype"] == "IIIb").collect();
    assert_eq!(b.len(), 2);
    assert!(b.iter().all(|r| r["self_paired"] == true));
}

#[test]
fn verify_suites_echo_seed() {
    let (_, v) = json(&["verify", "--suite", "counts", "--q", "2", "--seed", "17", "--format", "json"]);
    assert_eq!(v["seed"], 17);
    assert_eq!(v["config"]["suite"], "counts");
    assert!(!v["checks"].as_array().unwrap().is_empty());
    let out = siegel(&["verify", "--suite", "rg", "--q", "2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn exit_codes() {
    assert_eq!(siegel(&["verify", "--suite", "nonexistent"]).status.code(), Some(4));
    assert_eq!(siegel(&["table", "--q", "6", "--n-max", "2"]).status.code(), Some(4));
    assert_eq!(siegel(&["table", "--q", "2"]).status.code(), Some(4));
    assert_eq!(siegel(&["table", "--q", "2", "--n-max", "2", "--ext-sign", "3"]).status.code(), Some(4));
    assert_eq!(siegel(&["table", "--q", "3", "--n-max", "2", "--sigma", "1,2"]).status.code(), Some(4));
    assert_eq!(siegel(&["verify", "--suite", "oracle", "--q", "8"]).status.code(), Some(3));
    assert_eq!(siegel(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_independent_of_thread_count() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_siegel"))
            .args(["table", "--q", "5", "--n-max", "6", "--raw", "--format", "json"])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("4"));
}
