use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mbdom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbdom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn decide_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = write(dir.path(), "c5.txt", "5 5\n0 1\n1 2\n2 3\n3 4\n0 4\n");
    let out = mbdom(&["decide", &c5]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["outcome"], "D");
    assert_eq!(v["method"], "regular");

    // K_{2,3}: no factor, outside the classes, so only the oracle speaks.
    let k23 = write(dir.path(), "k23.txt", "5 6\n0 2\n0 3\n0 4\n1 2\n1 3\n1 4\n");
    let out = mbdom(&["decide", &k23]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["method"], "oracle");

    let out = mbdom(&["--max-oracle-n", "4", "decide", &k23]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["outcome"], "Unknown");

    let bad = write(dir.path(), "bad.txt", "3 1\n0 x\n");
    let out = mbdom(&["decide", &bad]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2, column 3"), "{err}");

    let out = mbdom(&[
        "decide",
        &dir.path().join("missing.txt").display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn certificate_round_trip_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "p4.txt", "4 3\n0 1\n1 2\n2 3\n");
    let cert = dir.path().join("cert.json").display().to_string();
    let out = mbdom(&["factor", &g, "--cert-out", &cert]);
    assert_eq!(out.status.code(), Some(0));
    let out = mbdom(&["verify", &g, &cert]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verified"], true);

    let other = write(dir.path(), "p4b.txt", "4 3\n0 1\n1 2\n0 3\n");
    let out = mbdom(&["verify", &other, &cert]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["reason"].as_str().unwrap().contains("digest"));
}

#[test]
fn staller_certificate_from_decide() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = write(dir.path(), "p3.txt", "3 2\n0 1\n1 2\n");
    let cert = dir.path().join("s.json").display().to_string();
    let out = mbdom(&["decide", &p3, "--cert-out", &cert]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["method"], "tree");
    assert_eq!(v["outcome"], "N");
    let out = mbdom(&["verify", &p3, &cert]);
    assert_eq!(json(&out)["verified"], true);
}

#[test]
fn interval_commands() {
    let dir = tempfile::tempdir().unwrap();
    let rep = write(
        dir.path(),
        "r.txt",
        "0 0 10\n1 0.5 1.5\n2 1 2\n3 7/2 4\n4 3 4.5\n",
    );
    let out = mbdom(&["nu", &rep]);
    assert_eq!(json(&out)["nestedness"], 3);
    let out = mbdom(&["--emit-normalized", "pds", &rep]);
    let v = json(&out);
    assert!(v["normalized"].as_str().unwrap().contains("0 1 10\n"));
    let apds = dir.path().join("a.json").display().to_string();
    let out = mbdom(&["pds", &rep, "--cert-out", &apds]);
    if json(&out)["pds"].is_null() {
        assert_eq!(out.status.code(), Some(1));
    } else {
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(json(&mbdom(&["verify", &rep, &apds]))["verified"], true);
    }
    let g = write(dir.path(), "g.txt", "2 1\n0 1\n");
    assert_eq!(mbdom(&["pds", &g]).status.code(), Some(3));
}

#[test]
fn play_and_exhaustive() {
    let dir = tempfile::tempdir().unwrap();
    let c6 = write(dir.path(), "c6.txt", "6 6\n0 1\n1 2\n2 3\n3 4\n4 5\n0 5\n");
    let t = dir.path().join("t.json").display().to_string();
    let out = mbdom(&[
        "--seed",
        "4",
        "play",
        &c6,
        "--staller",
        "random",
        "--cert-out",
        &t,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["transcript"]["winner"], "Dominator");
    assert_eq!(json(&mbdom(&["verify", &c6, &t]))["verified"], true);

    let out = mbdom(&["--exhaustive", "play", &c6]);
    let v = json(&out);
    assert_eq!(v["exhaustive"]["fixed_side_losses"], 0);
    assert_eq!(out.status.code(), Some(0));

    let p5 = write(dir.path(), "p5.txt", "5 4\n0 1\n1 2\n2 3\n3 4\n");
    let out = mbdom(&[
        "play",
        &p5,
        "--dominator",
        "exhaustive",
        "--staller",
        "strategy",
    ]);
    assert_eq!(json(&out)["exhaustive"]["fixed_side_losses"], 0);
}

#[test]
fn gen_is_deterministic_and_parses() {
    let a = mbdom(&["--seed", "9", "gen", "outerplanar", "--n", "8"]);
    let b = mbdom(&["--seed", "9", "gen", "outerplanar", "--n", "8"]);
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "o.txt", std::str::from_utf8(&a.stdout).unwrap());
    assert_eq!(
        mbdom(&["decide", &f]).status.code().map(|c| c <= 1),
        Some(true)
    );
    let out = mbdom(&["gen", "regular", "--n", "5", "--r", "3"]);
    assert_eq!(out.status.code(), Some(3));
    let out = mbdom(&[
        "--emit-normalized",
        "gen",
        "interval",
        "--n",
        "6",
        "--k",
        "2",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut ends: Vec<i64> = text
        .lines()
        .filter(|l| l.split_whitespace().count() == 3)
        .flat_map(|l| {
            l.split_whitespace()
                .skip(1)
                .map(|t| t.parse::<i64>().unwrap())
                .collect::<Vec<_>>()
        })
        .collect();
    ends.sort_unstable();
    assert_eq!(ends, (1..=12).collect::<Vec<_>>());
}

#[test]
fn bench_is_deterministic() {
    let args = ["--seed", "2", "bench", "--count", "6", "--corpus-n", "4"];
    let a = mbdom(&args);
    let b = mbdom(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    let agree = header.iter().position(|&h| h == "agree").unwrap();
    for l in lines {
        assert_ne!(l.split('\t').nth(agree), Some("false"), "{l}");
    }
}
