//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p limaut --test acceptance`.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::Zero;

use limaut::decomposition::*;
use limaut::fuzz::{self, FuzzConfig, Outcome, Pipeline};
use limaut::machine::*;
use limaut::rational::{half, rat, Rational};
use limaut::semantics::*;
use limaut::transforms::*;
use limaut::zoo;

type Check = std::result::Result<String, String>;

fn caps() -> Caps {
    Caps::default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ev(m: &Machine, w: &[usize]) -> std::result::Result<ProbabilityReport, String> {
    evaluate(m, w, caps()).map_err(|e| e.to_string())
}

fn decide(m: &Machine, n: usize, mode: &Mode) -> std::result::Result<Vec<Decision>, String> {
    decide_language_upto(m, n, mode, caps()).map_err(|e| e.to_string())
}

// 1 ---------------------------------------------------------------------------

fn base_limited() -> LimitedAutomaton {
    let mut m = LimitedAutomaton::new(2);
    m.symbol("a", 0);
    m.symbol("A", 1);
    m.symbol("F", 2);
    m.state("s");
    m.state("acc");
    m.state("rej");
    m.accept.insert(1);
    m.reject.insert(2);
    m.rule("s", "|c", "s", "|c", Dir::Right, rat(1, 1));
    m.rule("s", "a", "s", "A", Dir::Right, rat(1, 1));
    m.rule("s", "$", "acc", "$", Dir::Left, rat(1, 1));
    m
}

fn ids(m: Machine) -> Vec<&'static str> {
    condition_ids(&m.validate())
}

fn criterion_1() -> Check {
    let mut cases: Vec<(&str, Machine, Vec<&str>)> = Vec::new();
    let lim = |f: fn(&mut LimitedAutomaton)| {
        let mut m = base_limited();
        f(&mut m);
        Machine::Limited(m)
    };
    cases.push(("valid 2-lda", lim(|_| {}), vec![]));
    cases.push(("LA weight", lim(|m| m.rules[1].prob = rat(1, 2)), vec!["STOCH"]));
    cases.push(("LA frozen rewrite", lim(|m| m.rule("s", "F", "s", "A", Dir::Right, rat(1, 1))), vec!["LIM1"]));
    cases.push(("LA even level, wrong", lim(|m| m.rules[1].write = 4), vec!["LIM2"]));
    cases.push(("LA odd level, wrong", lim(|m| m.rule("s", "A", "s", "A", Dir::Right, rat(1, 1))), vec!["LIM3"]));
    cases.push(("LA even level, right", lim(|m| {
        m.rules[1].write = 4;
        m.rules[1].dir = Dir::Left;
    }), vec![]));
    cases.push(("LA odd level, right", lim(|m| m.rule("s", "A", "s", "F", Dir::Right, rat(1, 1))), vec![]));
    cases.push(("LA endmarker", lim(|m| m.rules[0].dir = Dir::Left), vec!["ENDMARK"]));
    cases.push(("LA levels", lim(|m| m.levels[1].push(2)), vec!["LEVELS"]));
    cases.push(("LA states", lim(|m| {
        m.reject.insert(1);
    }), vec!["STATES"]));
    let pda = |f: fn(&mut PushdownAutomaton)| {
        let mut m = zoo::geometric_pda();
        f(&mut m);
        Machine::Pda(m)
    };
    cases.push(("valid PDA", pda(|_| {}), vec![]));
    cases.push(("PDA weight", pda(|m| m.rules[1].prob = rat(1, 4)), vec!["STOCH"]));
    cases.push(("PDA push size", pda(|m| {
        let a = m.stack_sym("A");
        m.rules[0].push = vec![a, BOTTOM];
    }), vec!["PUSHSIZE"]));
    cases.push(("PDA bottom", pda(|m| m.rules[0].push = vec![]), vec!["BOTTOM"]));
    cases.push(("PDA states", pda(|m| {
        m.reject.insert(1);
    }), vec!["STATES"]));
    let n = cases.len();
    for (name, m, want) in cases {
        let got = ids(m);
        ensure(got == want, || format!("{name}: expected {want:?}, got {got:?}"))?;
    }
    Ok(format!("{n} machines"))
}

// 2 ---------------------------------------------------------------------------

fn criterion_2() -> Check {
    let mut words = 0;
    let mut exact = 0;
    for e in zoo::entries() {
        let m = (e.build)();
        for w in words_upto(m.input_alphabet().len(), 5) {
            let r = ev(&m, &w)?;
            let o = enumerate_paths_oracle(&m, &w, 400);
            let within = |v: &Rational, (lo, hi): (Rational, Rational)| lo <= *v && *v <= hi;
            ensure(r.p_unresolved.is_zero(), || format!("{}: solver left mass unresolved", e.name))?;
            ensure(within(&r.p_acc, o.acc_interval()) && within(&r.p_rej, o.rej_interval()), || {
                format!("{} on {:?}: solver ({}, {}) outside oracle intervals", e.name, w, r.p_acc, r.p_rej)
            })?;
            if o.p_unresolved.is_zero() {
                exact += 1;
                ensure(r.p_acc == o.p_acc && r.p_rej == o.p_rej, || format!("{} on {:?}: exact mismatch", e.name, w))?;
            }
            words += 1;
        }
    }
    Ok(format!("{words} (machine, word) pairs, {exact} with a fully resolved oracle"))
}

// 3 ---------------------------------------------------------------------------

fn criterion_3() -> Check {
    let m = Machine::Pda(zoo::geometric_pda());
    let r = ev(&m, &[])?;
    ensure(r.p_acc == rat(1, 1), || format!("p_acc = {}", r.p_acc))?;
    ensure(r.expected_steps == Some(Steps::Finite(rat(2, 1))), || format!("expected steps {:?}", r.expected_steps))?;
    Ok("p_acc = 1, expected steps = 2".into())
}

// 4 ---------------------------------------------------------------------------

fn criterion_4() -> Check {
    let m = Machine::Pda(zoo::l2_ppda());
    let sigma = m.input_alphabet();
    let mut members = 0;
    let ds = decide(&m, 9, &Mode::OneSided(half()))?;
    for d in &ds {
        let x = word_string(&sigma, &d.word);
        if zoo::oracle_l2(&x) {
            members += 1;
            ensure(d.report.p_acc == half(), || format!("{x}: p_acc = {}", d.report.p_acc))?;
        } else {
            ensure(d.report.p_rej == rat(1, 1), || format!("{x}: p_rej = {}", d.report.p_rej))?;
        }
    }
    Ok(format!("{} words, {members} members", ds.len()))
}

// 5 ---------------------------------------------------------------------------

fn criterion_5() -> Check {
    let mut detail = Vec::new();
    for (name, src, mode) in [("Z_LP1_2LDA", zoo::lp1_2lda(), Mode::Exact), ("Z_AB_2LNA", zoo::ab_2lna(), Mode::Nondet)] {
        let n = to_blank_skipping(&src).map_err(|e| format!("{name}: {e}"))?;
        ensure(is_blank_skipping(&n).holds(), || format!("{name}: output is not blank-skipping"))?;
        let (a, b) = (Machine::Limited(src), Machine::Limited(n));
        ensure(b.validate().is_empty(), || format!("{name}: output fails validation"))?;
        let (da, db) = (decide(&a, 6, &mode)?, decide(&b, 6, &mode)?);
        let mut most = BigUint::zero();
        for (x, y) in da.iter().zip(&db) {
            ensure(x.verdict == y.verdict, || format!("{name} on {:?}: verdicts differ", x.word))?;
            if mode == Mode::Nondet {
                let pa = accepting_paths(&a, &x.word, caps()).map_err(|e| e.to_string())?;
                let pb = accepting_paths(&b, &x.word, caps()).map_err(|e| e.to_string())?;
                ensure(pa == pb, || format!("{name} on {:?}: paths {pa:?} vs {pb:?}", x.word))?;
                if let PathCount::Finite(c) = pa {
                    most = most.max(c);
                }
            }
        }
        detail.push(format!("{name} {} states", b.num_states()));
        if mode == Mode::Nondet {
            detail.push(format!("up to {most} accepting paths matched"));
        }
    }
    Ok(detail.join(", "))
}

// 6 ---------------------------------------------------------------------------

fn same_probs(a: &Machine, b: &Machine, n: usize) -> std::result::Result<(), String> {
    let (da, db) = (decide(a, n, &Mode::Exact)?, decide(b, n, &Mode::Exact)?);
    for (x, y) in da.iter().zip(&db) {
        ensure(x.report.p_acc == y.report.p_acc && x.report.p_rej == y.report.p_rej, || {
            format!("on {:?}: ({}, {}) vs ({}, {})", x.word, x.report.p_acc, x.report.p_rej, y.report.p_acc, y.report.p_rej)
        })?;
    }
    Ok(())
}

fn criterion_6() -> Check {
    let mut detail = Vec::new();
    for (name, p) in [("Z_LP1_DPDA", zoo::lp1_dpda()), ("Z_LP2_DPDA", zoo::lp2_dpda())] {
        let la = ppda_to_lpa2(&p).map_err(|e| e.to_string())?;
        let (n, l) = (p.states.len(), p.stack.len());
        ensure(la.states.len() == n * l + n, || format!("{name}: {} states, want {}", la.states.len(), n * l + n))?;
        same_probs(&Machine::Pda(p), &Machine::Limited(la.clone()), 6).map_err(|e| format!("{name} -> 2-lda {e}"))?;
        detail.push(format!("{name} {n}x{l}+{n}={}", la.states.len()));
        let back = lpa2_to_1ppda(&la).map_err(|e| e.to_string())?;
        ensure(back.states.len() == 2 * la.states.len(), || format!("{name}: round trip has {} states", back.states.len()))?;
        same_probs(&Machine::Limited(la), &Machine::Pda(back), 6).map_err(|e| format!("{name} -> 1ppda {e}"))?;
    }
    let bs = to_blank_skipping(&zoo::lp1_2lda()).map_err(|e| e.to_string())?;
    let p = lpa2_to_1ppda(&bs).map_err(|e| e.to_string())?;
    ensure(p.states.len() == 2 * bs.states.len(), || "blank-skipping Z_LP1_2LDA: state count".into())?;
    same_probs(&Machine::Limited(bs.clone()), &Machine::Pda(p), 6).map_err(|e| format!("Z_LP1_2LDA -> 1ppda {e}"))?;
    detail.push(format!("blank-skipping Z_LP1_2LDA {} -> {}", bs.states.len(), 2 * bs.states.len()));
    Ok(detail.join(", "))
}

// 7 ---------------------------------------------------------------------------

fn steps(r: &ProbabilityReport) -> std::result::Result<Rational, String> {
    match &r.expected_steps {
        Some(Steps::Finite(s)) => Ok(s.clone()),
        other => Err(format!("expected steps {other:?}")),
    }
}

fn criterion_7() -> Check {
    let mut worst = Rational::zero();
    for p in [zoo::lp1_dpda(), zoo::lp2_dpda(), zoo::l2_ppda()] {
        let la = Machine::Limited(ppda_to_lpa2(&p).map_err(|e| e.to_string())?);
        let pm = Machine::Pda(p);
        let (da, db) = (decide(&pm, 6, &Mode::Exact)?, decide(&la, 6, &Mode::Exact)?);
        for (x, y) in da.iter().zip(&db) {
            let n = x.word.len() as i64 + 2;
            let c = steps(&y.report)? / (steps(&x.report)? * rat(n * n, 1));
            worst = worst.max(c);
        }
    }
    ensure(worst <= rat(4, 1), || format!("C = {worst}"))?;
    Ok(format!("C = {worst}"))
}

// 8 ---------------------------------------------------------------------------

fn criterion_8() -> Check {
    let (eps, gap) = (half(), rat(1, 8));
    ensure(amplify_alpha(&eps, &gap) == rat(1, 4), || "alpha is not 1/4".into())?;
    let la = Machine::Limited(ppda_to_lpa2(&zoo::l2_ppda()).map_err(|e| e.to_string())?);
    let amp = amplify_one_sided(&la, &eps, &gap).map_err(|e| e.to_string())?;
    let sigma = amp.input_alphabet();
    let ds = decide(&amp, 8, &Mode::Exact)?;
    for d in &ds {
        let x = word_string(&sigma, &d.word);
        if zoo::oracle_l2(&x) {
            ensure(d.report.p_acc >= rat(5, 8), || format!("{x}: p_acc = {}", d.report.p_acc))?;
        } else {
            ensure(d.report.p_rej >= rat(3, 4), || format!("{x}: p_rej = {}", d.report.p_rej))?;
        }
    }
    Ok(format!("alpha = 1/4, {} words", ds.len()))
}

// 9 ---------------------------------------------------------------------------

fn criterion_9() -> Check {
    let a = Machine::Limited(ppda_to_lpa2(&zoo::lp1_dpda()).map_err(|e| e.to_string())?);
    let b = Machine::Limited(ppda_to_lpa2(&zoo::lp2_dpda()).map_err(|e| e.to_string())?);
    let m = bounded_and(&a, &b, &Rational::zero()).map_err(|e| e.to_string())?;
    let sigma = m.input_alphabet();
    let ds = decide(&m, 9, &Mode::Bounded(rat(1, 3)))?;
    let mut least = rat(1, 1);
    for d in &ds {
        let x = word_string(&sigma, &d.word);
        let right = if zoo::oracle_anbncn(&x) { &d.report.p_acc } else { &d.report.p_rej };
        let margin = right - half();
        ensure(margin >= rat(1, 6), || format!("{x}: margin {margin}"))?;
        least = least.min(margin);
    }
    Ok(format!("{} words, least margin {least}", ds.len()))
}

// 10 --------------------------------------------------------------------------

fn criterion_10() -> Check {
    let pairs = [
        ("Z_LP1_2LDA x no-c", zoo::lp1_2lda(), zoo::dfa_no_c(), Mode::Exact),
        ("Z_LP1_2LDA x even length", zoo::lp1_2lda(), zoo::dfa_even_length(&["a", "b", "c"]), Mode::Exact),
        ("Z_AB_2LNA x ends in b", zoo::ab_2lna(), zoo::dfa_ends_b(), Mode::Nondet),
    ];
    let mut total = 0;
    for (name, m, d, mode) in pairs {
        let p = Machine::Limited(intersect_regular(&m, &d).map_err(|e| format!("{name}: {e}"))?);
        ensure(p.validate().is_empty(), || format!("{name}: product fails validation"))?;
        let m = Machine::Limited(m);
        let (dm, dp) = (decide(&m, 8, &mode)?, decide(&p, 8, &mode)?);
        for (x, y) in dm.iter().zip(&dp) {
            let want = x.verdict == Verdict::Accept && d.accepts(&x.word);
            ensure((y.verdict == Verdict::Accept) == want, || format!("{name} on {:?}", x.word))?;
        }
        total += dm.len();
    }
    Ok(format!("3 pairs, {total} words"))
}

// 11 --------------------------------------------------------------------------

fn criterion_11() -> Check {
    let mut detail = Vec::new();
    for (name, l) in [("Z_ANBN_3LDA", zoo::anbn_3lda()), ("Z_DYCK_3LDA", zoo::dyck_3lda())] {
        let t = first_traverse_transducer(&l).map_err(|e| e.to_string())?;
        let n = residual_machine(&l).map_err(|e| e.to_string())?;
        ensure(validate_limited(&n).is_empty() && n.k == 2, || format!("{name}: residual machine is not a valid 2-limited machine"))?;
        let (src, n) = (Machine::Limited(l), Machine::Limited(n));
        for w in words_upto(src.input_alphabet().len(), 4) {
            let member = verdict(&ev(&src, &w)?, &Mode::Exact) == Verdict::Accept;
            let outs = evaluate_transducer(&t, &w);
            ensure(outs.keys().all(|y| y.len() == w.len() + 2), || format!("{name} on {w:?}: output length"))?;
            let says = match lfm_membership(&reverse_multiset(&outs), &n, &half(), caps()) {
                Ok(b) => b,
                Err(limaut::Error::EmptyOutput) => false,
                Err(e) => return Err(e.to_string()),
            };
            ensure(member == says, || format!("{name} on {w:?}: machine {member}, pipeline {says}"))?;
        }
        detail.push(format!("{name} {} cell states", t.output.len()));
    }
    Ok(detail.join(", "))
}

// 12 --------------------------------------------------------------------------

fn criterion_12() -> Check {
    let mut nonempty = 0;
    for i in 0..50u64 {
        let inner = zoo::random_transducer(3, 2, 2, 2 * i).map_err(|e| e.to_string())?;
        let outer = zoo::random_transducer(3, 2, 2, 2 * i + 1).map_err(|e| e.to_string())?;
        let c = compose_transducers(&outer, &inner).map_err(|e| e.to_string())?;
        for w in words_upto(2, 4) {
            let mut staged: OutputMultiset = BTreeMap::new();
            for (y, k) in evaluate_transducer(&inner, &w) {
                let mut yr = y.clone();
                yr.reverse();
                for (z, j) in evaluate_transducer(&outer, &yr) {
                    *staged.entry(z).or_insert_with(BigUint::zero) += &k * j;
                }
            }
            let got = reverse_multiset(&evaluate_transducer(&c, &w));
            ensure(got == staged, || format!("pair {i} on {w:?}"))?;
            if !got.is_empty() {
                nonempty += 1;
            }
        }
    }
    Ok(format!("50 pairs, {nonempty} nonempty multisets"))
}

// 13 --------------------------------------------------------------------------

fn criterion_13() -> Check {
    let seeds: Vec<u64> = (0..500).collect();
    let mut detail = Vec::new();
    for p in [Pipeline::BlankSkip, Pipeline::Lpa2Roundtrip, Pipeline::PpdaRoundtrip] {
        let mut cfg = FuzzConfig::new(p, 4);
        cfg.states = 5;
        let reports = fuzz::run(&cfg, &seeds).map_err(|e| e.to_string())?;
        let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &reports {
            let key = match &r.outcome {
                Outcome::Pass => "pass",
                Outcome::PassVerdicts => "verdicts only",
                Outcome::Skipped(_) => "skipped",
                Outcome::Counterexample { word, detail } => {
                    return Err(format!("{} seed {}: {word:?}: {detail}", p.name(), r.seed));
                }
            };
            *tally.entry(key).or_default() += 1;
        }
        let t: Vec<_> = tally.iter().map(|(k, v)| format!("{v} {k}")).collect();
        detail.push(format!("{}: {}", p.name(), t.join(" ")));
    }
    Ok(detail.join("; "))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 13] = [
        ("validator classes", criterion_1),
        ("solver agrees with path oracle", criterion_2),
        ("geometric loop", criterion_3),
        ("one-sided L2 machine", criterion_4),
        ("blank-skipping form", criterion_5),
        ("PDA / 2-limited conversions", criterion_6),
        ("runtime of the 2-limited image", criterion_7),
        ("amplification", criterion_8),
        ("bounded AND", criterion_9),
        ("regular products", criterion_10),
        ("decomposition pipeline", criterion_11),
        ("transducer composition", criterion_12),
        ("fuzzing", criterion_13),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != i + 1) {
            continue;
        }
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(d) => println!("PASS {:>2} {name} ({d}) [{secs:.1}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
