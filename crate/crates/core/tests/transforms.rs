use limaut::machine::{is_blank_skipping, LimitedAutomaton, Machine};
use limaut::rational::{rat, Rational};
use limaut::semantics::{accepting_paths, PathCount, decide_language_upto, evaluate, words_upto, word_string, Caps, Mode, Verdict};
use limaut::transforms::*;
use limaut::zoo;

fn caps() -> Caps {
    Caps::default()
}

/// Exact p_acc and p_rej agree on every word up to `n`.
fn same_probs(a: &Machine, b: &Machine, n: usize) {
    let sigma = a.input_alphabet();
    assert_eq!(sigma, b.input_alphabet());
    for w in words_upto(sigma.len(), n) {
        let (ra, rb) = (evaluate(a, &w, caps()).unwrap(), evaluate(b, &w, caps()).unwrap());
        assert_eq!((&ra.p_acc, &ra.p_rej), (&rb.p_acc, &rb.p_rej), "on {:?}", word_string(&sigma, &w));
    }
}

#[test]
fn blank_skip_zoo_2lda() {
    let m = zoo::lp1_2lda();
    let n = to_blank_skipping(&m).unwrap();
    assert!(is_blank_skipping(&n).holds());
    assert!(Machine::Limited(n.clone()).validate().is_empty(), "{:?}", Machine::Limited(n.clone()).validate());
    same_probs(&Machine::Limited(m), &Machine::Limited(n), 6);
}

#[test]
fn blank_skip_zoo_2lna_keeps_path_counts() {
    let m = Machine::Limited(zoo::ab_2lna());
    let Machine::Limited(src) = &m else { unreachable!() };
    let n = Machine::Limited(to_blank_skipping(src).unwrap());
    assert!(n.validate().is_empty(), "{:?}", n.validate());
    let sigma = m.input_alphabet();
    for w in words_upto(2, 6) {
        let (a, b) = (accepting_paths(&m, &w, caps()).unwrap(), accepting_paths(&n, &w, caps()).unwrap());
        assert_eq!(a, b, "on {}", word_string(&sigma, &w));
    }
    let two = PathCount::Finite(2u32.into());
    assert_eq!(accepting_paths(&m, &[0, 1, 0, 1], caps()).unwrap(), two);
    assert_eq!(accepting_paths(&n, &[0, 1, 0, 1], caps()).unwrap(), two);
}

#[test]
fn pda_to_limited_and_back() {
    for p in [zoo::lp1_dpda(), zoo::lp2_dpda(), zoo::l2_ppda()] {
        let la = ppda_to_lpa2(&p).unwrap();
        assert_eq!(la.states.len(), p.states.len() * p.stack.len() + p.states.len());
        assert!(is_blank_skipping(&la).holds());
        let (pm, lm) = (Machine::Pda(p.clone()), Machine::Limited(la.clone()));
        assert!(lm.validate().is_empty(), "{:?}", lm.validate());
        same_probs(&pm, &lm, 6);
        let back = lpa2_to_1ppda(&la).unwrap();
        assert_eq!(back.states.len(), 2 * la.states.len());
        let bm = Machine::Pda(back);
        assert!(bm.validate().is_empty(), "{:?}", bm.validate());
        same_probs(&lm, &bm, 6);
    }
}

#[test]
fn amplified_l2() {
    let la = Machine::Limited(ppda_to_lpa2(&zoo::l2_ppda()).unwrap());
    assert_eq!(amplify_alpha(&rat(1, 2), &rat(1, 8)), rat(1, 4));
    let amp = amplify_one_sided(&la, &rat(1, 2), &rat(1, 8)).unwrap();
    let sigma = amp.input_alphabet();
    for w in words_upto(4, 6) {
        let r = evaluate(&amp, &w, caps()).unwrap();
        if zoo::oracle_l2(&word_string(&sigma, &w)) {
            assert_eq!(r.p_acc, rat(5, 8));
        } else {
            assert_eq!(r.p_rej, rat(3, 4));
        }
    }
}

#[test]
fn bounded_and_of_dcfl_witnesses() {
    let a = Machine::Limited(ppda_to_lpa2(&zoo::lp1_dpda()).unwrap());
    let b = Machine::Limited(ppda_to_lpa2(&zoo::lp2_dpda()).unwrap());
    let m = bounded_and(&a, &b, &Rational::from_integer(0.into())).unwrap();
    let sigma = m.input_alphabet();
    for d in decide_language_upto(&m, 6, &Mode::Bounded(rat(1, 3)), caps()).unwrap() {
        let x = word_string(&sigma, &d.word);
        let want = if zoo::oracle_anbncn(&x) { Verdict::Accept } else { Verdict::Reject };
        assert_eq!(d.verdict, want, "{x}");
        assert!(!d.margin_violation, "{x}");
    }
}

#[test]
fn regular_products() {
    let m: LimitedAutomaton = zoo::lp1_2lda();
    let d = zoo::dfa_no_c();
    let p = Machine::Limited(intersect_regular(&m, &d).unwrap());
    assert!(p.validate().is_empty(), "{:?}", p.validate());
    let sigma = p.input_alphabet();
    for dd in decide_language_upto(&p, 6, &Mode::Exact, caps()).unwrap() {
        let x = word_string(&sigma, &dd.word);
        assert_eq!(dd.verdict == Verdict::Accept, zoo::oracle_anbn(&x), "{x}");
    }
}
