use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn limaut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_limaut")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let zoo_file = dir.path().join("lp1.json");
    let o = limaut(&["zoo", "show", "Z_LP1_2LDA"]);
    std::fs::write(&zoo_file, &o.stdout).unwrap();
    assert_eq!(code(&limaut(&["validate", p(&zoo_file)])), 0);

    let text = String::from_utf8(o.stdout).unwrap();
    let first_prob = text.find("\"prob\": \"1\"").unwrap();
    let mut bad = text.clone();
    bad.replace_range(first_prob..first_prob + 11, "\"prob\": \"1/2\"");
    let stoch = dir.path().join("stoch.json");
    std::fs::write(&stoch, &bad).unwrap();
    let o = limaut(&["--format", "json", "validate", p(&stoch)]);
    assert_eq!(code(&o), 1);
    assert!(json(&o)["conditions"].as_array().unwrap().iter().any(|c| c == "STOCH"));

    let mut broken = text.clone();
    broken.replace_range(first_prob..first_prob + 11, "\"prob\": \"1/0\"");
    let zero = dir.path().join("zero.json");
    std::fs::write(&zero, &broken).unwrap();
    assert_eq!(code(&limaut(&["validate", p(&zero)])), 2);
}

#[test]
fn prob_reports_exact_rationals() {
    let o = limaut(&["--format", "json", "prob", "Z_L2PPDA", "--input", "abc"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["inputs"][0]["report"]["p_acc"], "1/2");

    let o = limaut(&["--format", "json", "prob", "Z_LP1_DPDA", "--input", "aabbc"]);
    assert_eq!(json(&o)["inputs"][0]["report"]["p_acc"], "1");
    let o = limaut(&["--format", "json", "prob", "Z_LP1_DPDA", "--input", "aabc"]);
    assert_eq!(json(&o)["inputs"][0]["report"]["p_acc"], "0");
}

#[test]
fn prob_sweep_matches_the_language() {
    for e in limaut::zoo::entries() {
        let o = limaut(&["--format", "json", "prob", e.name, "--upto", "5"]);
        assert_eq!(code(&o), 0, "{}", e.name);
        for w in json(&o)["inputs"].as_array().unwrap() {
            let input = w["input"].as_str().unwrap();
            let want = if (e.oracle.accepts)(input) { "accept" } else { "reject" };
            assert_eq!(w["verdict"], want, "{} on {input:?}", e.name);
        }
    }
}

#[test]
fn unknown_letter_is_an_input_error() {
    assert_eq!(code(&limaut(&["prob", "Z_AB_2LNA", "--input", "abz"])), 2);
}

#[test]
fn convert_outputs_validate_and_carry_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bs.json");
    assert_eq!(code(&limaut(&["convert", "Z_LP1_2LDA", "--transform", "blank-skip", "-o", p(&out)])), 0);
    assert_eq!(code(&limaut(&["validate", p(&out)])), 0);
    let (f, prov) = limaut::format::parse_machine_file(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let prov = prov.expect("provenance");
    assert_eq!(prov.transform, "blank-skip");
    let source = limaut::format::MachineFile::from((limaut::zoo::get("Z_LP1_2LDA").unwrap().build)());
    assert_eq!(prov.source_digest, limaut::format::digest(&source));
    match f {
        limaut::format::MachineFile::Limited(m) => assert!(limaut::machine::is_blank_skipping(&m).holds()),
        _ => panic!("expected a limited automaton"),
    }
    let o = limaut(&["equiv", "Z_LP1_2LDA", p(&out), "--check", "probs", "--upto", "6"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn convert_round_trips_through_the_file_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("la.json");
    assert_eq!(code(&limaut(&["convert", "Z_LP2_DPDA", "--transform", "ppda-to-lpa2", "-o", p(&out)])), 0);
    let (f, _) = limaut::format::parse_machine_file(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let pda = match (limaut::zoo::get("Z_LP2_DPDA").unwrap().build)() {
        limaut::machine::Machine::Pda(x) => x,
        _ => unreachable!(),
    };
    let direct = limaut::transforms::ppda_to_lpa2(&pda).unwrap();
    assert_eq!(f, limaut::format::MachineFile::Limited(direct));
}

#[test]
fn amplify_records_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("amp.json");
    let args = ["convert", "Z_L2PPDA", "--transform", "amplify", "--epsilon", "1/2", "--gap", "1/8", "-o", p(&out)];
    assert_eq!(code(&limaut(&args)), 0);
    let (_, prov) = limaut::format::parse_machine_file(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(prov.unwrap().parameters["alpha"], "1/4");
}

#[test]
fn domain_errors_exit_one() {
    let o = limaut(&["convert", "Z_AB_2LNA", "--transform", "lpa2-to-ppda"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("NOT_BLANK_SKIPPING"));

    let o = limaut(&["convert", "Z_L2PPDA", "--transform", "amplify", "--epsilon", "1/2", "--gap", "1/2"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("GAP_OUT_OF_RANGE"));
}

#[test]
fn equiv_finds_the_shortest_mismatch() {
    assert_eq!(code(&limaut(&["equiv", "Z_AB_2LNA", "Z_AB_2LNA", "--upto", "5"])), 0);

    let o = limaut(&["--format", "json", "equiv", "Z_LP1_DPDA", "Z_LP2_DPDA", "--upto", "4"]);
    assert_eq!(code(&o), 1);
    let cx = &json(&o)["counterexample"];
    // a^n b^n c^m against a^n b^m c^m; "a" is the shortest word in exactly one
    assert_eq!(cx["input"], "a");
    assert_eq!((cx["a"].as_str(), cx["b"].as_str()), (Some("reject"), Some("accept")));

    let o = limaut(&["--format", "json", "prob", "Z_LP1_DPDA", "--input", "abcc"]);
    assert_eq!(json(&o)["inputs"][0]["verdict"], "accept");
    let o = limaut(&["--format", "json", "prob", "Z_LP2_DPDA", "--input", "abcc"]);
    assert_eq!(json(&o)["inputs"][0]["verdict"], "reject");
}

#[test]
fn fuzz_blank_skip_hundred_seeds() {
    let o = limaut(&["--format", "json", "fuzz", "--pipeline", "blank-skip", "--seeds", "100", "--upto", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(json(&o)["tally"]["counterexamples"], 0);
}

#[test]
fn fuzz_report_digest_is_stable() {
    let args = ["--format", "json", "fuzz", "--pipeline", "ppda-roundtrip", "--seeds", "10", "--from", "7", "--upto", "3"];
    let (a, b) = (json(&limaut(&args)), json(&limaut(&args)));
    assert_eq!(a["report_digest"], b["report_digest"]);
    assert_eq!(a, b);
}

#[test]
fn fuzz_notices_a_mutated_transform() {
    let o = limaut(&["fuzz", "--pipeline", "lpa2-roundtrip", "--seeds", "5", "--upto", "2", "--mutate"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("first counterexample"));
}

#[test]
fn decompose_agrees_on_zoo_machines() {
    let dir = tempfile::tempdir().unwrap();
    let o = limaut(&["decompose", "Z_ANBN_3LDA", "--upto", "5", "--emit", p(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(code(&limaut(&["validate", p(&dir.path().join("residual.json"))])), 0);
    assert_eq!(code(&limaut(&["validate", p(&dir.path().join("transducer.json"))])), 0);
    assert_eq!(code(&limaut(&["decompose", "Z_DYCK_3LDA", "--upto", "5"])), 0);
}

#[test]
fn zoo_write_matches_checked_in_files() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&limaut(&["zoo", "write", p(dir.path())])), 0);
    let written = std::fs::read_to_string(dir.path().join("DIGESTS")).unwrap();
    assert_eq!(written, limaut::zoo::digests_text());
}
