use limaut::format::{digest, parse_machine_file, MachineFile};
use limaut::machine::{is_ideal_shape, Machine};
use limaut::semantics::{decide_language_upto, word_string, Caps, Verdict};
use limaut::zoo;

#[test]
fn every_zoo_machine_matches_its_oracle() {
    for e in zoo::entries() {
        let m = (e.build)();
        assert!(m.validate().is_empty(), "{}: {:?}", e.name, m.validate());
        let alphabet = m.input_alphabet();
        let n = if e.name.contains("3LDA") { 6 } else { 8 };
        for d in decide_language_upto(&m, n, &e.mode, Caps::default()).unwrap() {
            let x = word_string(&alphabet, &d.word);
            let want = if (e.oracle.accepts)(&x) { Verdict::Accept } else { Verdict::Reject };
            assert_eq!(d.verdict, want, "{} on {x:?}: {}", e.name, d.report.to_json());
            if !matches!(e.mode, limaut::semantics::Mode::Nondet) {
                assert!(d.report.p_nonhalt.to_string() == "0" && d.report.p_unresolved.to_string() == "0", "{} on {x:?}", e.name);
            }
        }
    }
}

#[test]
fn pda_witnesses_have_ideal_shape() {
    let (a, b) = zoo::build_dcfl2_witnesses();
    for p in [a, b, zoo::build_l2_rppda()] {
        assert!(is_ideal_shape(&p).holds(), "{:?}", is_ideal_shape(&p));
        assert!(Machine::Pda(p.clone()).validate().is_empty());
    }
    assert!(Machine::Pda(zoo::lp1_dpda()).classify().deterministic);
    assert!(Machine::Pda(zoo::lp2_dpda()).classify().deterministic);
}

#[test]
fn checked_in_files_match_builders() {
    let dir = zoo::zoo_dir();
    if std::env::var_os("LIMAUT_BLESS").is_some() {
        zoo::write_zoo(&dir).unwrap();
    }
    let digests = std::fs::read_to_string(dir.join("DIGESTS")).unwrap();
    assert_eq!(digests, zoo::digests_text());
    for e in zoo::entries() {
        let text = std::fs::read_to_string(dir.join(format!("{}.json", e.name))).unwrap();
        assert_eq!(text, zoo::file_text(&e), "{}", e.name);
        let (f, _) = parse_machine_file(&text).unwrap();
        let line = digests.lines().find(|l| l.starts_with(&format!("{} ", e.name))).unwrap();
        assert_eq!(line.split(' ').nth(1).unwrap(), digest(&f));
        assert_eq!(f, MachineFile::from((e.build)()));
    }
}
