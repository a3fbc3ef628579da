mod common;

use std::path::PathBuf;
use std::process::Command;

use common::{call, fixture, golden, stable};
use copeland::cli::run_with_hooks;
use copeland::selftest::Hooks;
use copeland::*;

#[test]
fn fixture_outputs_are_byte_stable() {
    for (args, want) in golden() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, out) = stable(&args);
        assert_eq!(code, 0, "{args:?}");
        if !want.is_empty() {
            assert_eq!(out, want, "{args:?}");
        }
    }
}

#[test]
fn verify_reduction_report() {
    let (code, out) = stable(&["verify-reduction", "--to", "CCRPC-TP", "--graph", &fixture("path3.graph"), "--k", "1", "--alpha", "1/2"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("problem: CCRPC-TP\nvertex-cover: YES\nsolver: YES\nequal: true\n"), "{out}");
    let (code, out) = stable(&["verify-reduction", "--to", "CCDC", "--graph", &fixture("path3.graph"), "--k", "0", "--alpha", "0/1"]);
    assert_eq!(code, 0);
    assert!(out.contains("vertex-cover: NO\nsolver: NO\nequal: true\n"), "{out}");
}

#[test]
fn reduce_writes_a_solvable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("inst");
    let out_s = out.display().to_string();
    let (code, text, _) = call(&["reduce", "--to", "CCACu", "--graph", &fixture("edge.graph"), "--k", "1", "--alpha", "1/2", "--model", "unique", "--out", &out_s]);
    assert_eq!(code, 0);
    assert!(text.starts_with("problem: CCAC_u\np: p\nalpha: 1/2\nmodel: unique\ncover-size: 1\nspoilers: spoilers.cop\n"), "{text}");
    let election = out.join("election.cop").display().to_string();
    let spoilers = out.join("spoilers.cop").display().to_string();
    let (code, text, _) = call(&[
        "solve", "--problem", "CCAC_u", "--alpha", "1/2", "--model", "unique", "--election", &election, "--spoiler-candidates", &spoilers, "--p", "p",
    ]);
    assert_eq!((code, text.as_str()), (0, "YES\nadd: v1\n"));
    // The written election parses back to the generated one.
    let g = parse_graph(&std::fs::read_to_string(fixture("edge.graph")).unwrap()).unwrap();
    let inst = reduce_vc_to_ccacu(&g, 1, Alpha::HALF, WinnerModel::Unique).unwrap();
    let back = parse_election(&std::fs::read_to_string(out.join("election.cop")).unwrap()).unwrap();
    assert_eq!(back, inst.election.to_explicit());
}

#[test]
fn generator_preconditions_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let (code, _, err) = call(&["reduce", "--to", "CCACu", "--graph", &fixture("edge.graph"), "--k", "1", "--alpha", "0/1", "--out", &out]);
    assert_eq!(code, 2);
    assert!(err.contains("0 < alpha < 1"), "{err}");
}

#[test]
fn exit_codes() {
    // Usage errors.
    assert_eq!(call(&[]).0, 2);
    assert_eq!(call(&["frobnicate"]).0, 2);
    assert_eq!(call(&["score", "--alpha", "3/2", "--election", &fixture("e_cyc.cop")]).0, 2);
    assert_eq!(call(&["score", "--alpha", "1/2", "--election", "/nonexistent.cop"]).0, 2);
    assert_eq!(call(&["solve", "--problem", "DCDC", "--alpha", "1/2", "--election", &fixture("e_cyc.cop"), "--p", "a"]).0, 2);
    assert_eq!(call(&["solve", "--problem", "CCDC", "--method", "greedy", "--alpha", "1/2", "--election", &fixture("e_cyc.cop"), "--k", "1", "--p", "a"]).0, 2);
    assert_eq!(call(&["solve", "--problem", "DCDC", "--alpha", "1/2", "--election", &fixture("e_cyc.cop"), "--k", "1"]).0, 2);
    assert_eq!(call(&["--help"]).0, 0);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cop");
    std::fs::write(&bad, "candidates: a b\norder 1: a > a\n").unwrap();
    let (code, _, err) = call(&["score", "--alpha", "1/2", "--election", &bad.display().to_string()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");

    // Budget exceeded.
    let big = dir.path().join("big.cop");
    std::fs::write(&big, "candidates: a b c\norder 100: a > b > c\n").unwrap();
    let (code, _, err) = call(&["solve", "--problem", "BRIBERY", "--alpha", "1/2", "--election", &big.display().to_string(), "--k", "2", "--p", "c"]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_copeland");
    let out = Command::new(bin).args(["winners", "--alpha", "1/2", "--election", &fixture("e_cyc.cop")]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "a b c\n");
    let out = Command::new(bin).args(["winners", "--alpha", "x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fixtures_round_trip() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        match path.extension().and_then(|e| e.to_str()) {
            Some("cop") => {
                let e = parse_election(&text).unwrap();
                let s = serialize_election(&e);
                let again = parse_election(&s).unwrap();
                assert_eq!(again, e, "{}", path.display());
                assert_eq!(serialize_election(&again), s);
            }
            Some("graph") => {
                let g = parse_graph(&text).unwrap();
                assert_eq!(parse_graph(&serialize_graph(&g)).unwrap(), g);
            }
            _ => continue,
        }
        n += 1;
    }
    assert!(n >= 8);
}

#[test]
fn selftest_passes_and_catches_a_broken_greedy() {
    let (code, out) = stable(&["selftest", "--fixtures", &fixture("")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.ends_with("all suites passed\n"));

    fn broken(_: &ControlInstance) -> copeland::error::Result<Decision> {
        Ok(Decision::No)
    }
    let hooks = Hooks { greedy: broken, ..Hooks::default() };
    let mut out = Vec::new();
    let code = run_with_hooks(["copeland", "selftest"], &hooks, &mut out, &mut Vec::new());
    let out = String::from_utf8(out).unwrap();
    assert_eq!(code, 1);
    assert!(out.contains("equivalence: FAIL"), "{out}");
    assert!(out.contains("fixtures: pass"), "{out}");

    // An empty fixture directory still runs the built-in fixtures.
    let empty = tempfile::tempdir().unwrap();
    let (code, out) = stable(&["selftest", "--fixtures", &empty.path().display().to_string()]);
    assert_eq!(code, 0);
    assert!(out.contains("fixtures: pass (4 checks)"), "{out}");
}
