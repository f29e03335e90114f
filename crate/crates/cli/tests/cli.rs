//! End-to-end checks of the binary: exit codes, trace documents, and the
//! filesystem round-trip through `zoo export`.

use pwk_core::{dsl, zoo};
use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn pwk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn export(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    let path = dir.path().join(format!("{name}.pwk"));
    let out = pwk(&["zoo", "export", name, "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn run_exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let an_bn = export(&dir, "an_bn");
    let f = an_bn.to_str().unwrap();
    assert_eq!(code(&pwk(&["run", f, "ab"])), 0);
    assert_eq!(code(&pwk(&["run", f, "ba"])), 1);
    assert_eq!(code(&pwk(&["run", f, "aabb"])), 0);

    // A machine that spins in place forever exits 2.
    let spin = dir.path().join("spin.pwk");
    std::fs::write(
        &spin,
        "machine spin\nalphabet: a\nmessages:\nupper:\n states: u\n initial: u\n accepting:\n step: u LEND / NONE -> u stay\nlower:\n states: l\n initial: l\n accepting:\n step: l REND / NONE -> l stay\n",
    )
    .unwrap();
    assert_eq!(code(&pwk(&["run", spin.to_str().unwrap(), "a"])), 2);

    // Usage and parse problems exit 64.
    assert_eq!(code(&pwk(&["run", f, "axb"])), 64);
    assert_eq!(code(&pwk(&["frobnicate"])), 64);
    assert_eq!(code(&pwk(&["run", "/nonexistent.pwk", "a"])), 64);
    let bad = dir.path().join("bad.pwk");
    std::fs::write(&bad, "machine M\nalphabet: a LEND\n").unwrap();
    let out = pwk(&["run", bad.to_str().unwrap(), "a"]);
    assert_eq!(code(&out), 64);
    assert!(String::from_utf8_lossy(&out.stderr).contains("reserved symbol"));
}

#[test]
fn trace_documents_are_stable_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let an_bn = export(&dir, "an_bn");
    let trace_path = dir.path().join("trace.json");
    let out = pwk(&[
        "run",
        an_bn.to_str().unwrap(),
        "aabb",
        "--trace",
        trace_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&trace_path).unwrap()).unwrap();
    assert_eq!(doc["word"], "aabb");
    assert_eq!(doc["verdict"], "accepted");
    assert_eq!(doc["comm"]["forward"], 14);
    assert_eq!(doc["comm"]["backward"], 14);
    let steps = doc["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 7);
    for (i, s) in steps.iter().enumerate() {
        assert_eq!(s["index"], i as u64);
    }
    assert_eq!(steps[0]["upper"]["symbol"], "LEND");
    assert_eq!(steps[0]["lower"]["sent"], "REND");
    assert_eq!(steps[6]["upper"]["state"], "p4");

    // The empty word rejects, with a null send nowhere (echo machine).
    let out = pwk(&[
        "run",
        an_bn.to_str().unwrap(),
        "",
        "--trace",
        trace_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&trace_path).unwrap()).unwrap();
    assert_eq!(doc["verdict"], "rejected");
}

#[test]
fn export_then_run_reproduces_identical_traces() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["an_bn", "l_lin", "l_expo"] {
        let path = export(&dir, name);
        // Re-export through a parse cycle: the file parses back to the very
        // same spec, so the traces must be byte-identical.
        let text = std::fs::read_to_string(&path).unwrap();
        let reparsed = dsl::parse(&text).unwrap();
        assert_eq!(reparsed, zoo::get(name).unwrap().spec.unwrap());

        let t1 = dir.path().join("t1.json");
        let t2 = dir.path().join("t2.json");
        let word = match name {
            "an_bn" => "aabb",
            "l_lin" => "01c10",
            _ => "abaaaacaaaaaaaabaa",
        };
        pwk(&["run", path.to_str().unwrap(), word, "--trace", t1.to_str().unwrap()]);
        pwk(&["run", path.to_str().unwrap(), word, "--trace", t2.to_str().unwrap()]);
        assert_eq!(
            std::fs::read(&t1).unwrap(),
            std::fs::read(&t2).unwrap(),
            "{name}: traces differ between runs"
        );
    }
}

#[test]
fn verify_rev_certifies_and_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let an_bn = export(&dir, "an_bn");
    let out = pwk(&["verify-rev", an_bn.to_str().unwrap(), "--max-len", "4"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("certified up to length 4"));

    let out = pwk(&["verify-rev", an_bn.to_str().unwrap(), "--max-len", "3", "--json"]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["verdict"], "certified");
    assert_eq!(doc["words_checked"], 15);

    // Striking one backward row strands the replay; exit 1 with a witness.
    let crippled = dir.path().join("crippled.pwk");
    let text: String = std::fs::read_to_string(&an_bn)
        .unwrap()
        .lines()
        .filter(|l| !l.contains("back: p3 a / a"))
        .map(|l| format!("{l}\n"))
        .collect();
    std::fs::write(&crippled, text).unwrap();
    let out = pwk(&["verify-rev", crippled.to_str().unwrap(), "--max-len", "4"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("fails on"));
}

#[test]
fn derive_rev_reconstructs_the_backward_tables() {
    let dir = tempfile::tempdir().unwrap();
    let an_bn = export(&dir, "an_bn");
    let forward_only = dir.path().join("forward.pwk");
    let text: String = std::fs::read_to_string(&an_bn)
        .unwrap()
        .lines()
        .filter(|l| !l.trim_start().starts_with("back:"))
        .map(|l| format!("{l}\n"))
        .collect();
    std::fs::write(&forward_only, text).unwrap();

    let derived = dir.path().join("derived.pwk");
    let out = pwk(&[
        "derive-rev",
        forward_only.to_str().unwrap(),
        "-o",
        derived.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let derived_spec = dsl::parse(&std::fs::read_to_string(&derived).unwrap()).unwrap();
    assert_eq!(derived_spec, zoo::get("an_bn").unwrap().spec.unwrap());

    // A two-states-into-one merge reports a conflict and exits 1.
    let merge = dir.path().join("merge.pwk");
    std::fs::write(
        &merge,
        "machine merge\nalphabet: a\nmessages:\nupper:\n states: s0 s1 s2 s3\n initial: s0\n accepting:\n step: s0 LEND / NONE -> s1 fwd\n step: s1 a / NONE -> s3 fwd\n step: s3 a / NONE -> s2 fwd\n step: s2 a / NONE -> s3 fwd\nlower:\n states: l0\n initial: l0\n accepting:\n step: l0 REND / NONE -> l0 stay\n",
    )
    .unwrap();
    let out = pwk(&[
        "derive-rev",
        merge.to_str().unwrap(),
        "-o",
        dir.path().join("none.pwk").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("conflicts"));
}

#[test]
fn comm_csv_feeds_classify() {
    let dir = tempfile::tempdir().unwrap();
    let an_bn = export(&dir, "an_bn");
    let words_file = dir.path().join("words.txt");
    let members: String = [1usize, 2, 4, 8, 16]
        .iter()
        .map(|&k| format!("{}{}\n", "a".repeat(k), "b".repeat(k)))
        .collect();
    std::fs::write(&words_file, members).unwrap();
    let out = pwk(&[
        "comm",
        an_bn.to_str().unwrap(),
        "--words",
        words_file.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("n,forward,backward\n"));
    assert!(csv.contains("2,10,10"));
    assert!(csv.contains("32,70,70"));

    let csv_path = dir.path().join("series.csv");
    std::fs::write(&csv_path, csv).unwrap();
    let out = pwk(&["classify", csv_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "linear");

    // The doubling-block series classifies as log.
    let l_expo = export(&dir, "l_expo");
    let words_file = dir.path().join("expo.txt");
    std::fs::write(
        &words_file,
        (1..=3).map(|m| zoo::l_expo_word(m) + "\n").collect::<String>(),
    )
    .unwrap();
    let out = pwk(&[
        "comm",
        l_expo.to_str().unwrap(),
        "--words",
        words_file.to_str().unwrap(),
    ]);
    std::fs::write(&csv_path, out.stdout).unwrap();
    let out = pwk(&["classify", csv_path.to_str().unwrap()]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "log");

    // Too few points is an input error.
    std::fs::write(&csv_path, "n,forward,backward\n2,10,10\n").unwrap();
    assert_eq!(code(&pwk(&["classify", csv_path.to_str().unwrap()])), 64);

    // Enumeration measures every accepted word up to the bound.
    let out = pwk(&["comm", an_bn.to_str().unwrap(), "--enumerate", "6"]);
    assert_eq!(code(&out), 0);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv, "n,forward,backward\n2,10,10\n4,14,14\n6,18,18\n");
}

#[test]
fn equiv_against_catalog_oracles() {
    let dir = tempfile::tempdir().unwrap();
    let an_bn = export(&dir, "an_bn");
    let out = pwk(&[
        "equiv",
        an_bn.to_str().unwrap(),
        "--oracle",
        "an_bn",
        "--max-len",
        "8",
    ]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("pass: 511 words"));

    let prefix = export(&dir, "prefix_abb");
    let out = pwk(&[
        "equiv",
        prefix.to_str().unwrap(),
        "--oracle",
        "an_bn",
        "--max-len",
        "6",
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("counterexample"));

    let out = pwk(&[
        "equiv",
        an_bn.to_str().unwrap(),
        "--oracle",
        "no_such_entry",
        "--max-len",
        "3",
    ]);
    assert_eq!(code(&out), 64);
}

#[test]
fn zoo_list_names_every_entry() {
    let out = pwk(&["zoo", "list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    for e in zoo::list() {
        assert!(text.contains(e.name), "missing {}", e.name);
    }
    // Predicate-only entries cannot be exported.
    let out = pwk(&["zoo", "export", "l_empty_I", "-o", "/tmp/never.pwk"]);
    assert_eq!(code(&out), 64);
}
