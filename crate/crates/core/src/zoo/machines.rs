//! Hand-built reference machines.

use crate::machine::{level_after, Dfa, Dir, LimitedAutomaton, PdaRead, PdaRule, PushdownAutomaton, LEFT_END, RIGHT_END};
use crate::rational::{half, one};

use Dir::{Left as L, Right as R};

/// Sends every missing (state, symbol) pair of a non-halting state to
/// `bad`, moving right and writing the first symbol of the right level.
/// `$` goes to `rej` instead.
fn complete(m: &mut LimitedAutomaton, bad: &str, rej: &str) {
    let bad = m.state(bad);
    let rej = m.state(rej);
    let levels = m.level_table();
    let table = m.rule_table();
    let ns = m.symbols.len();
    for q in 0..m.states.len() {
        if m.is_halting(q) {
            continue;
        }
        for s in 0..ns {
            if !table[q * ns + s].is_empty() {
                continue;
            }
            let Some(lvl) = levels[s] else { continue };
            if s == RIGHT_END {
                m.add_rule(q, s, rej, s, L, one());
            } else if s == LEFT_END || lvl == m.k {
                m.add_rule(q, s, bad, s, R, one());
            } else {
                let w = m.levels[level_after(lvl, R, m.k)][0];
                m.add_rule(q, s, bad, w, R, one());
            }
        }
    }
}

fn frozen_pass(m: &mut LimitedAutomaton, q: &str, frozen: &[&str], d: Dir) {
    for f in frozen {
        m.rule(q, f, q, f, d, one());
    }
}

/// Deterministic 2-limited automaton for `a^n b^n c^m`. Each `b` walks left
/// to the nearest unmatched `a`; the first `c` or `$` checks that none is
/// left.
pub fn lp1_2lda() -> LimitedAutomaton {
    let mut m = LimitedAutomaton::new(2);
    for a in ["a", "b", "c"] {
        m.symbol(a, 0);
    }
    for s in ["A", "C"] {
        m.symbol(s, 1);
    }
    for s in ["Y", "Z", "F"] {
        m.symbol(s, 2);
    }
    for q in ["ra", "rb", "l", "v", "rc", "v2", "acc", "rej"] {
        m.state(q);
    }
    let h = m.state("acc");
    m.accept.insert(h);
    let h = m.state("rej");
    m.reject.insert(h);
    let frozen = ["Y", "Z", "F"];
    m.rule("ra", "|c", "ra", "|c", R, one());
    m.rule("ra", "a", "ra", "A", R, one());
    for q in ["ra", "rb"] {
        m.rule(q, "b", "l", "Y", L, one());
        m.rule(q, "c", "v", "F", L, one());
        m.rule(q, "$", "v2", "$", L, one());
    }
    frozen_pass(&mut m, "rb", &frozen, R);
    frozen_pass(&mut m, "l", &frozen, L);
    m.rule("l", "A", "rb", "Z", R, one());
    frozen_pass(&mut m, "v", &frozen, L);
    m.rule("v", "|c", "rc", "|c", R, one());
    frozen_pass(&mut m, "rc", &frozen, R);
    m.rule("rc", "c", "rc", "C", R, one());
    m.rule("rc", "$", "acc", "$", L, one());
    frozen_pass(&mut m, "v2", &frozen, L);
    m.rule("v2", "|c", "acc", "|c", R, one());
    complete(&mut m, "rej", "rej");
    m
}

/// Nondeterministic 2-limited automaton for words containing `ab`. It guesses
/// the `a`, turns on the following `b` to freeze both cells, and sweeps to
/// `$` and back before accepting. One accepting path per occurrence.
pub fn ab_2lna() -> LimitedAutomaton {
    let mut m = LimitedAutomaton::new(2);
    m.symbol("a", 0);
    m.symbol("b", 0);
    m.symbol("x", 1);
    m.symbol("G", 1);
    for s in ["Gf", "Bf", "F"] {
        m.symbol(s, 2);
    }
    for q in ["s", "t", "u", "w", "z", "acc", "rej"] {
        m.state(q);
    }
    let h = m.state("acc");
    m.accept.insert(h);
    let h = m.state("rej");
    m.reject.insert(h);
    m.claims_unambiguous = false;
    m.rule("s", "|c", "s", "|c", R, one());
    m.rule("s", "a", "s", "x", R, one());
    m.rule("s", "a", "t", "G", R, one());
    m.rule("s", "b", "s", "x", R, one());
    m.rule("t", "b", "u", "Bf", L, one());
    m.rule("u", "G", "w", "Gf", R, one());
    m.rule("w", "Bf", "w", "Bf", R, one());
    m.rule("w", "a", "w", "x", R, one());
    m.rule("w", "b", "w", "x", R, one());
    m.rule("w", "$", "z", "$", L, one());
    m.rule("z", "x", "z", "F", L, one());
    frozen_pass(&mut m, "z", &["Gf", "Bf", "F"], L);
    m.rule("z", "|c", "acc", "|c", R, one());
    complete(&mut m, "rej", "rej");
    m
}

/// Deterministic 3-limited automaton for `a^n b^n` (or for balanced words
/// when `dyck` is set) that halts only on `$`. A `b` walks left to the
/// nearest unmatched `a` and back; at `$` a sweep to `|c` looks for an
/// unmatched `a` and a sweep back to `$` reports it. Malformed input is
/// carried to `$` by the state `bad`.
fn matching_3lda(dyck: bool) -> LimitedAutomaton {
    let mut m = LimitedAutomaton::new(3);
    m.symbol("a", 0);
    m.symbol("b", 0);
    m.symbol("a1", 1);
    m.symbol("_1", 1);
    m.symbol("X2", 2);
    m.symbol("a2", 2);
    for s in ["F3", "X3", "A3"] {
        m.symbol(s, 3);
    }
    for q in ["scan", "scanb", "find", "back", "ver", "verbad", "retok", "retbad", "bad", "acc", "rej"] {
        m.state(q);
    }
    let h = m.state("acc");
    m.accept.insert(h);
    let h = m.state("rej");
    m.reject.insert(h);
    let frozen = ["F3", "X3", "A3"];
    m.rule("scan", "|c", "scan", "|c", R, one());
    m.rule("scan", "a", "scan", "a1", R, one());
    if dyck {
        m.rule("scanb", "a", "scan", "a1", R, one());
    } else {
        m.rule("scanb", "a", "bad", "_1", R, one());
    }
    for q in ["scan", "scanb"] {
        m.rule(q, "b", "find", "X2", L, one());
        m.rule(q, "$", "ver", "$", L, one());
    }
    frozen_pass(&mut m, "find", &frozen, L);
    m.rule("find", "a1", "back", "A3", R, one());
    m.rule("find", "|c", "bad", "|c", R, one());
    frozen_pass(&mut m, "back", &frozen, R);
    m.rule("back", "X2", "scanb", "X3", R, one());
    frozen_pass(&mut m, "ver", &frozen, L);
    m.rule("ver", "a1", "verbad", "a2", L, one());
    m.rule("ver", "|c", "retok", "|c", R, one());
    frozen_pass(&mut m, "verbad", &frozen, L);
    m.rule("verbad", "a1", "verbad", "a2", L, one());
    m.rule("verbad", "|c", "retbad", "|c", R, one());
    frozen_pass(&mut m, "retok", &frozen, R);
    m.rule("retok", "$", "acc", "$", L, one());
    frozen_pass(&mut m, "retbad", &frozen, R);
    m.rule("retbad", "a2", "retbad", "F3", R, one());
    m.rule("retbad", "$", "rej", "$", L, one());
    frozen_pass(&mut m, "bad", &frozen, R);
    m.rule("bad", "a", "bad", "_1", R, one());
    m.rule("bad", "b", "bad", "_1", R, one());
    for s in ["a1", "_1", "X2", "a2"] {
        m.rule("bad", s, "bad", "F3", R, one());
    }
    m.rule("bad", "$", "rej", "$", L, one());
    complete(&mut m, "bad", "rej");
    m
}

pub fn anbn_3lda() -> LimitedAutomaton {
    matching_3lda(false)
}

pub fn dyck_3lda() -> LimitedAutomaton {
    matching_3lda(true)
}

/// Sends every missing (state, read, top) triple of a non-halting state to
/// `rej` without touching the stack.
fn complete_pda(m: &mut PushdownAutomaton, rej: &str) {
    let rej = m.state(rej);
    let index = m.rule_index();
    for q in 0..m.states.len() {
        if m.is_halting(q) || q == rej {
            continue;
        }
        for a in 0..m.stack.len() {
            if index.contains_key(&(q, PdaRead::Lambda, a)) {
                continue;
            }
            for r in m.tape_reads() {
                if r == PdaRead::Left && q != m.initial {
                    continue;
                }
                if !index.contains_key(&(q, r, a)) {
                    m.rules.push(PdaRule { from: q, read: r, top: a, to: rej, push: vec![a], prob: one() });
                }
            }
        }
    }
}

/// One-way PDA for `a^n b^n c | a^n b^2n d`: a fair coin picks which half
/// to check, and the check is deterministic. Members are accepted with
/// probability 1/2, everything else is rejected with certainty.
pub fn l2_ppda() -> PushdownAutomaton {
    let mut m = PushdownAutomaton::new(&["a", "b", "c", "d"], 2);
    for q in ["s", "ca", "cb", "da", "db1", "db2", "e", "acc", "rej"] {
        m.state(q);
    }
    m.stack_sym("A");
    let h = m.state("acc");
    m.accept.insert(h);
    let h = m.state("rej");
    m.reject.insert(h);
    m.rule("s", "|c", "⊥", "ca", &["⊥"], half());
    m.rule("s", "|c", "⊥", "da", &["⊥"], half());
    for q in ["ca", "da"] {
        m.rule(q, "a", "⊥", q, &["A", "⊥"], one());
        m.rule(q, "a", "A", q, &["A", "A"], one());
    }
    // c-branch
    m.rule("ca", "b", "A", "cb", &[], one());
    m.rule("ca", "c", "⊥", "e", &["⊥"], one());
    m.rule("cb", "b", "A", "cb", &[], one());
    m.rule("cb", "c", "⊥", "e", &["⊥"], one());
    // d-branch: one A per two b's
    m.rule("da", "b", "A", "db1", &["A"], one());
    m.rule("db1", "b", "A", "db2", &[], one());
    m.rule("db2", "b", "A", "db1", &["A"], one());
    m.rule("da", "d", "⊥", "e", &["⊥"], one());
    m.rule("db2", "d", "⊥", "e", &["⊥"], one());
    m.rule("e", "$", "⊥", "acc", &["⊥"], one());
    complete_pda(&mut m, "rej");
    m
}

/// Deterministic one-way PDA for `a^n b^n c^m`.
pub fn lp1_dpda() -> PushdownAutomaton {
    let mut m = PushdownAutomaton::new(&["a", "b", "c"], 2);
    for q in ["s", "pa", "pb", "pc", "acc", "rej"] {
        m.state(q);
    }
    m.stack_sym("A");
    let h = m.state("acc");
    m.accept.insert(h);
    let h = m.state("rej");
    m.reject.insert(h);
    m.rule("s", "|c", "⊥", "pa", &["⊥"], one());
    m.rule("pa", "a", "⊥", "pa", &["A", "⊥"], one());
    m.rule("pa", "a", "A", "pa", &["A", "A"], one());
    for q in ["pa", "pb"] {
        m.rule(q, "b", "A", "pb", &[], one());
        m.rule(q, "c", "⊥", "pc", &["⊥"], one());
        m.rule(q, "$", "⊥", "acc", &["⊥"], one());
    }
    m.rule("pc", "c", "⊥", "pc", &["⊥"], one());
    m.rule("pc", "$", "⊥", "acc", &["⊥"], one());
    complete_pda(&mut m, "rej");
    m
}

/// Deterministic one-way PDA for `a^n b^m c^m`.
pub fn lp2_dpda() -> PushdownAutomaton {
    let mut m = PushdownAutomaton::new(&["a", "b", "c"], 2);
    for q in ["s", "qa", "qb", "qc", "acc", "rej"] {
        m.state(q);
    }
    m.stack_sym("B");
    let h = m.state("acc");
    m.accept.insert(h);
    let h = m.state("rej");
    m.reject.insert(h);
    m.rule("s", "|c", "⊥", "qa", &["⊥"], one());
    m.rule("qa", "a", "⊥", "qa", &["⊥"], one());
    m.rule("qa", "$", "⊥", "acc", &["⊥"], one());
    m.rule("qa", "b", "⊥", "qb", &["B", "⊥"], one());
    m.rule("qb", "b", "B", "qb", &["B", "B"], one());
    m.rule("qb", "c", "B", "qc", &[], one());
    m.rule("qc", "c", "B", "qc", &[], one());
    m.rule("qc", "$", "⊥", "acc", &["⊥"], one());
    complete_pda(&mut m, "rej");
    m
}

/// Before reading anything, stays put or accepts with probability 1/2 each.
pub fn geometric_pda() -> PushdownAutomaton {
    let mut m = PushdownAutomaton::new(&["a"], 1);
    m.state("loop");
    m.state("acc");
    m.accept.insert(1);
    m.rule("loop", "λ", "⊥", "loop", &["⊥"], half());
    m.rule("loop", "λ", "⊥", "acc", &["⊥"], half());
    m
}

pub fn dfa_no_c() -> Dfa {
    Dfa::from_fn(&["a", "b", "c"], 2, 0, &[0], |q, a| if a == 2 { 1 } else { q })
}

pub fn dfa_even_length(alphabet: &[&str]) -> Dfa {
    Dfa::from_fn(alphabet, 2, 0, &[0], |q, _| 1 - q)
}

/// Words over `{a, b}` ending in `b`.
pub fn dfa_ends_b() -> Dfa {
    Dfa::from_fn(&["a", "b"], 2, 0, &[1], |_, a| a)
}
