//! The command-line front end driven in-process through `cli::run`.

use std::path::PathBuf;

use polarsys::cert::Certificate;
use polarsys::cli::run;

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polarsys-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn construct_and_verify(args: &[&str], file: &str) -> Certificate {
    let out = tmp(file);
    let mut argv = vec!["polarsys", "construct"];
    argv.extend_from_slice(args);
    argv.extend_from_slice(&["--out", out.to_str().unwrap()]);
    assert_eq!(run(&argv), 0, "{args:?}");
    assert_eq!(run(["polarsys", "verify", "--in", out.to_str().unwrap()]), 0, "verify {args:?}");
    Certificate::from_json(&std::fs::read_to_string(out).unwrap()).unwrap()
}

#[test]
fn count_and_audit_examples() {
    assert_eq!(run(["polarsys", "count", "--family", "Qminus", "--d", "2", "--q", "3", "--k", "2"]), 0);
    let out = tmp("audit.json");
    let o = out.to_str().unwrap();
    assert_eq!(run(["polarsys", "audit-nonexistence", "--family", "W", "--d", "4", "--q", "2", "--k", "2", "--out", o]), 0);
    let c = Certificate::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(c.payload["verdict"], "contradiction");
    assert_eq!(c.payload["bound_value"], 63.75);
    assert_eq!(c.payload["system_size"], "153");
}

#[test]
fn constructions_round_trip() {
    let c = construct_and_verify(&["latin-greek", "--d", "3", "--q", "2"], "lg.json");
    assert_eq!(c.systems.len(), 2);
    let c = construct_and_verify(&["spread-search", "--family", "Q", "--d", "2", "--q", "2"], "spread.json");
    assert_eq!(c.systems[1].space.family, "W");
    let c = construct_and_verify(&["chain-lift", "--family", "Q", "--d", "2", "--q", "2"], "lift.json");
    assert_eq!((c.systems[1].ids.len(), c.systems[1].m), (10, Some(2)));
    let c = construct_and_verify(&["q63", "--i", "1", "--seed", "5"], "q63.json");
    assert_eq!(c.systems[0].m, Some(4));
    let c = construct_and_verify(&["field-reduction", "--d", "3", "--q", "2"], "fr.json");
    assert_eq!(c.payload["census"]["histogram"]["0"], 36);
    assert_eq!(c.payload["census"]["type"], "elliptic");
}

#[test]
fn tampered_certificate_fails_with_witness() {
    let out = tmp("tamper.json");
    let o = out.to_str().unwrap();
    assert_eq!(run(["polarsys", "construct", "switch", "--d", "3", "--q", "2", "--out", o]), 0);
    let mut c = Certificate::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let first = c.systems[0].ids.remove(0);
    assert!(first < 30);
    std::fs::write(&out, c.to_canonical_json()).unwrap();
    assert_eq!(run(["polarsys", "verify", "--in", o]), 1);
    // re-hashing does not help: the system itself no longer checks out
    c.sha256 = c.content_hash();
    std::fs::write(&out, c.to_canonical_json()).unwrap();
    assert_eq!(run(["polarsys", "verify", "--in", o]), 1);
}

#[test]
fn usage_and_cap_errors() {
    assert_eq!(run(["polarsys"]), 2);
    assert_eq!(run(["polarsys", "construct", "nothing"]), 2);
    assert_eq!(run(["polarsys", "count", "--family", "Q"]), 2);
    assert_eq!(run(["polarsys", "construct", "spread-search", "--family", "Q", "--d", "3", "--q", "3"]), 2);
    assert_eq!(run(["polarsys", "construct", "elliptic-hemisystem", "--q", "4"]), 2);
    assert_eq!(run(["polarsys", "verify", "--in", "/nonexistent/cert.json"]), 2);
}
