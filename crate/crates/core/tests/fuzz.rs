use proptest::prelude::*;

use limaut::fuzz::{run, run_seed, FuzzConfig, Mutation, Outcome, Pipeline};
use limaut::Error;
use limaut::machine::{is_blank_skipping, Machine};
use limaut::semantics::{evaluate, verdict, words_upto, Caps, Mode};
use limaut::transforms::{to_blank_skipping, to_blank_skipping_recognition};
use limaut::zoo::{random_machine, Determinism, Kind, RandomSpec};

#[test]
fn mutation_is_caught_by_every_pipeline() {
    for p in Pipeline::ALL {
        let mut cfg = FuzzConfig::new(p, 3);
        cfg.mutation = Some(Mutation::SwapVerdicts);
        let reports = run(&cfg, &(0..20).collect::<Vec<_>>()).unwrap();
        let found = reports.iter().filter(|r| matches!(r.outcome, Outcome::Counterexample { .. })).count();
        assert!(found > 0, "{} missed the mutation", p.name());
    }
}

#[test]
fn same_seed_same_report() {
    let cfg = FuzzConfig::new(Pipeline::BlankSkip, 3);
    for seed in 0..10 {
        assert_eq!(run_seed(&cfg, seed).unwrap(), run_seed(&cfg, seed).unwrap());
    }
}

#[test]
fn parallel_run_keeps_seed_order() {
    let cfg = FuzzConfig::new(Pipeline::PpdaRoundtrip, 2);
    let seeds: Vec<u64> = (0..40).rev().collect();
    let got: Vec<u64> = run(&cfg, &seeds).unwrap().iter().map(|r| r.seed).collect();
    assert_eq!(got, seeds);
}

#[test]
fn pipeline_names_round_trip() {
    for p in Pipeline::ALL {
        assert_eq!(Pipeline::parse(p.name()), Some(p));
    }
    assert_eq!(Pipeline::parse("nope"), None);
}

fn limited(k: usize, determinism: Determinism, seed: u64) -> limaut::machine::LimitedAutomaton {
    let spec = RandomSpec { k, states: 1 + seed as usize % 3, ..RandomSpec::new(Kind::Limited, determinism, seed) };
    match random_machine(&spec).unwrap() {
        Machine::Limited(m) => m,
        Machine::Pda(_) => unreachable!(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // odd and even k, against direct evaluation of the source
    #[test]
    fn blank_skip_keeps_exact_probabilities(seed in 0u64..100_000, k in 2usize..=3) {
        let m = limited(k, Determinism::Det, seed);
        let n = to_blank_skipping(&m);
        prop_assume!(!matches!(n, Err(Error::TooLarge(_))));
        let n = n.unwrap();
        prop_assert!(is_blank_skipping(&n).holds());
        prop_assert!(Machine::Limited(n.clone()).validate().is_empty());
        let (a, b) = (Machine::Limited(m), Machine::Limited(n));
        for w in words_upto(2, 3) {
            let (ra, rb) = (evaluate(&a, &w, Caps::default()).unwrap(), evaluate(&b, &w, Caps::default()).unwrap());
            prop_assert_eq!((ra.p_acc, ra.p_rej), (rb.p_acc, rb.p_rej), "on {:?}", w);
        }
    }

    #[test]
    fn recognition_form_keeps_nondet_verdicts(seed in 0u64..100_000, k in 2usize..=3) {
        let m = limited(k, Determinism::Nondet, seed);
        let n = to_blank_skipping_recognition(&m);
        prop_assume!(!matches!(n, Err(Error::TooLarge(_))));
        let n = n.unwrap();
        prop_assert!(is_blank_skipping(&n).holds());
        let (a, b) = (Machine::Limited(m), Machine::Limited(n));
        for w in words_upto(2, 3) {
            let (ra, rb) = (evaluate(&a, &w, Caps::default()).unwrap(), evaluate(&b, &w, Caps::default()).unwrap());
            prop_assert_eq!(verdict(&ra, &Mode::Nondet), verdict(&rb, &Mode::Nondet), "on {:?}", w);
        }
    }
}
