//! Closure constructions on probabilistic machines.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::machine::{
    level_after, Dfa, Dir, LaRule, LimitedAutomaton, Machine, PdaRead, PdaRule, PushdownAutomaton, StateId, SymId,
    BOTTOM, LEFT_END, RIGHT_END,
};
use crate::rational::{fmt_rational, rat, Rational};

fn fresh(names: &[String], base: &str) -> String {
    let mut s = base.to_string();
    while names.contains(&s) {
        s.push('\'');
    }
    s
}

/// Sends weight `alpha` of every move into a rejecting state to a fresh
/// accepting state and the rest to a fresh rejecting state.
fn split_rejects(m: &Machine, alpha: &Rational) -> Machine {
    let rest = Rational::one() - alpha;
    match m {
        Machine::Limited(m) => {
            let mut n = m.clone();
            let acc = n.push_state(fresh(&m.states, "acc*"));
            let rej = n.push_state(fresh(&n.states, "rej*"));
            n.accept.insert(acc);
            n.reject.insert(rej);
            n.rules.clear();
            for r in &m.rules {
                if m.reject.contains(&r.to) {
                    for (to, w) in [(acc, alpha), (rej, &rest)] {
                        if !w.is_zero() {
                            n.rules.push(LaRule { to, prob: &r.prob * w, ..r.clone() });
                        }
                    }
                } else {
                    n.rules.push(r.clone());
                }
            }
            Machine::Limited(n)
        }
        Machine::Pda(m) => {
            let mut n = m.clone();
            n.states.push(fresh(&m.states, "acc*"));
            let acc = n.states.len() - 1;
            n.states.push(fresh(&n.states, "rej*"));
            let rej = n.states.len() - 1;
            n.accept.insert(acc);
            n.reject.insert(rej);
            n.rules.clear();
            for r in &m.rules {
                if m.reject.contains(&r.to) {
                    for (to, w) in [(acc, alpha), (rej, &rest)] {
                        if !w.is_zero() {
                            n.rules.push(PdaRule { to, prob: &r.prob * w, ..r.clone() });
                        }
                    }
                } else {
                    n.rules.push(r.clone());
                }
            }
            Machine::Pda(n)
        }
    }
}

/// Turns a one-sided machine with error `eps` into one with error at most
/// `1/2 - gap` on both sides.
pub fn amplify_one_sided(m: &Machine, eps: &Rational, gap: &Rational) -> Result<Machine> {
    let half = rat(1, 2);
    if *eps < half || *eps >= Rational::one() {
        return Err(Error::GapOutOfRange(format!("error bound {} outside [1/2, 1)", fmt_rational(eps))));
    }
    let bound = (Rational::one() - eps) / (rat(2, 1) * (Rational::one() + eps));
    if *gap <= Rational::zero() || *gap >= bound {
        return Err(Error::GapOutOfRange(format!(
            "gap {} not in (0, {})",
            fmt_rational(gap),
            fmt_rational(&bound)
        )));
    }
    Ok(split_rejects(m, &amplify_alpha(eps, gap)))
}

/// Weight moved from rejection to acceptance by [`amplify_one_sided`].
pub fn amplify_alpha(eps: &Rational, gap: &Rational) -> Rational {
    Rational::one() - (Rational::one() - rat(2, 1) * gap) / (rat(2, 1) * eps)
}

pub fn complement_swap(m: &Machine) -> Machine {
    let mut n = m.clone();
    match &mut n {
        Machine::Limited(x) => std::mem::swap(&mut x.accept, &mut x.reject),
        Machine::Pda(x) => std::mem::swap(&mut x.accept, &mut x.reject),
    }
    n
}

/// Disjoint union started by a uniform choice of component.
pub fn union_one_sided(ms: &[Machine]) -> Result<Machine> {
    if ms.len() < 2 {
        return Err(Error::Invalid("a union needs at least two machines".into()));
    }
    let alpha = ms[0].input_alphabet();
    if ms.iter().any(|m| m.input_alphabet() != alpha) {
        return Err(Error::AlphabetMismatch("components have different input alphabets".into()));
    }
    let w = rat(1, ms.len() as i64);
    if let Some(las) = ms.iter().map(|m| if let Machine::Limited(x) = m { Some(x) } else { None }).collect::<Option<Vec<_>>>() {
        return union_limited(&las, &w).map(Machine::Limited);
    }
    if let Some(pdas) = ms.iter().map(|m| if let Machine::Pda(x) = m { Some(x) } else { None }).collect::<Option<Vec<_>>>() {
        return Ok(Machine::Pda(union_pda(&pdas, &w)));
    }
    Err(Error::Invalid("cannot mix limited automata and pushdown automata".into()))
}

fn union_limited(ms: &[&LimitedAutomaton], w: &Rational) -> Result<LimitedAutomaton> {
    let k = ms[0].k;
    if let Some(m) = ms.iter().find(|m| m.k != k) {
        return Err(Error::WrongK { expected: k, found: m.k });
    }
    let mut n = LimitedAutomaton::new(k);
    let start = n.push_state("start".into());
    n.initial = start;
    for &a in &ms[0].levels[0] {
        n.push_symbol(ms[0].symbols[a].clone(), 0);
    }
    for (i, m) in ms.iter().enumerate() {
        let soff = n.states.len();
        n.states.extend(m.states.iter().map(|q| format!("{}.{q}", i + 1)));
        n.accept.extend(m.accept.iter().map(|q| q + soff));
        n.reject.extend(m.reject.iter().map(|q| q + soff));
        let mut map: Vec<SymId> = vec![0; m.symbols.len()];
        map[LEFT_END] = LEFT_END;
        map[RIGHT_END] = RIGHT_END;
        for (lvl, syms) in m.levels.iter().enumerate() {
            for (j, &s) in syms.iter().enumerate() {
                map[s] = if lvl == 0 {
                    n.levels[0][j]
                } else {
                    n.push_symbol(format!("{}.{}", i + 1, m.symbols[s]), lvl)
                };
            }
        }
        for r in &m.rules {
            let lifted = LaRule {
                from: r.from + soff,
                read: map[r.read],
                to: r.to + soff,
                write: map[r.write],
                dir: r.dir,
                prob: r.prob.clone(),
            };
            if r.from == m.initial && r.read == LEFT_END {
                n.rules.push(LaRule { from: start, prob: &r.prob * w, ..lifted.clone() });
            }
            n.rules.push(lifted);
        }
    }
    Ok(n)
}

fn union_pda(ms: &[&PushdownAutomaton], w: &Rational) -> PushdownAutomaton {
    let names: Vec<&str> = ms[0].input.iter().map(String::as_str).collect();
    let mut n = PushdownAutomaton::new(&names, ms.iter().map(|m| m.push_size).max().unwrap_or(0));
    n.states.push("start".into());
    n.initial = 0;
    for (i, m) in ms.iter().enumerate() {
        let soff = n.states.len();
        n.states.extend(m.states.iter().map(|q| format!("{}.{q}", i + 1)));
        n.accept.extend(m.accept.iter().map(|q| q + soff));
        n.reject.extend(m.reject.iter().map(|q| q + soff));
        let mut map = vec![BOTTOM; m.stack.len()];
        for (a, name) in m.stack.iter().enumerate().skip(1) {
            n.stack.push(format!("{}.{name}", i + 1));
            map[a] = n.stack.len() - 1;
        }
        for r in &m.rules {
            let lifted = PdaRule {
                from: r.from + soff,
                read: r.read,
                top: map[r.top],
                to: r.to + soff,
                push: r.push.iter().map(|&a| map[a]).collect(),
                prob: r.prob.clone(),
            };
            let at_start = r.from == m.initial && r.top == BOTTOM && matches!(r.read, PdaRead::Left | PdaRead::Lambda);
            if at_start {
                n.rules.push(PdaRule { from: 0, prob: &r.prob * w, ..lifted.clone() });
            }
            n.rules.push(lifted);
        }
    }
    n
}

/// Fair choice between two bounded-error machines, where a rejection is
/// turned into acceptance with probability 1/3.
pub fn bounded_or(m1: &Machine, m2: &Machine, eps: &Rational) -> Result<Machine> {
    if *eps >= rat(1, 6) {
        return Err(Error::EpsilonTooLarge(format!("{} is not below 1/6", fmt_rational(eps))));
    }
    let u = union_one_sided(&[m1.clone(), m2.clone()])?;
    Ok(split_rejects(&u, &rat(1, 3)))
}

pub fn bounded_and(m1: &Machine, m2: &Machine, eps: &Rational) -> Result<Machine> {
    Ok(complement_swap(&bounded_or(&complement_swap(m1), &complement_swap(m2), eps)?))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Combine {
    And,
    Or,
}

/// Runs `m` while feeding every first-visited input letter to `d`. When `m`
/// halts, the head sweeps to `$` to feed the rest of the input, then the two
/// verdicts are combined.
fn product(m: &LimitedAutomaton, d: &Dfa, how: Combine) -> Result<LimitedAutomaton> {
    if m.input_alphabet() != d.alphabet {
        return Err(Error::AlphabetMismatch("DFA alphabet differs from the machine's input alphabet".into()));
    }
    let k = m.k;
    let nd = d.num_states();
    let levels = m.level_table();
    let mut n = LimitedAutomaton::new(k);
    n.symbols = m.symbols.clone();
    n.levels = m.levels.clone();
    n.blank = m.blank;
    n.claims_unambiguous = m.claims_unambiguous;
    // filler written while sweeping, one per level 1..k-1
    let fill: Vec<SymId> = (1..k).map(|l| n.push_symbol(fresh(&m.symbols, &format!("#{l}")), l)).collect();
    let frozen = frozen_filler(&mut n, &m.symbols);
    for q in &m.states {
        for s in 0..nd {
            n.states.push(format!("({q},d{s})"));
        }
    }
    let pair = |q: StateId, s: usize| q * nd + s;
    let sweep_base = n.states.len();
    for v in ["acc", "rej"] {
        for s in 0..nd {
            n.states.push(format!("sweep-{v},d{s}"));
        }
    }
    let sweep = |accepted: bool, s: usize| sweep_base + if accepted { 0 } else { nd } + s;
    let acc = n.push_state("acc".into());
    let rej = n.push_state("rej".into());
    n.accept.insert(acc);
    n.reject.insert(rej);
    n.initial = pair(m.initial, d.start);

    let sigma_index = |s: SymId| m.levels[0].iter().position(|&x| x == s);
    for r in &m.rules {
        for s in 0..nd {
            let s2 = match sigma_index(r.read) {
                Some(i) => d.step(s, i),
                None => s,
            };
            let to = if m.accept.contains(&r.to) {
                sweep(true, s2)
            } else if m.reject.contains(&r.to) {
                sweep(false, s2)
            } else {
                pair(r.to, s2)
            };
            n.rules.push(LaRule { from: pair(r.from, s), to, ..r.clone() });
        }
    }
    let one = Rational::one();
    for v in [true, false] {
        for s in 0..nd {
            let from = sweep(v, s);
            for (sym, lvl) in levels.iter().enumerate() {
                let Some(lvl) = *lvl else { continue };
                if sym == LEFT_END {
                    continue;
                }
                if sym == RIGHT_END {
                    let dfa = d.accept.contains(&s);
                    let ok = match how {
                        Combine::And => v && dfa,
                        Combine::Or => v || dfa,
                    };
                    n.add_rule(from, RIGHT_END, if ok { acc } else { rej }, RIGHT_END, Dir::Left, one.clone());
                    continue;
                }
                let to = match sigma_index(sym) {
                    Some(i) if lvl == 0 => sweep(v, d.step(s, i)),
                    _ => from,
                };
                let next = level_after(lvl, Dir::Right, k);
                let write = if lvl == k {
                    sym
                } else if next == k {
                    frozen
                } else {
                    fill[next - 1]
                };
                n.add_rule(from, sym, to, write, Dir::Right, one.clone());
            }
        }
    }
    Ok(n)
}

/// A frozen symbol to write when the sweep freezes a cell.
fn frozen_filler(n: &mut LimitedAutomaton, taken: &[String]) -> SymId {
    let name = fresh(taken, &format!("#{}", n.k));
    match n.sym_id(&name) {
        Some(id) => id,
        None => n.push_symbol(name, n.k),
    }
}

/// Product with a DFA accepting the intersection of the two languages.
pub fn intersect_regular(m: &LimitedAutomaton, d: &Dfa) -> Result<LimitedAutomaton> {
    product(m, d, Combine::And)
}

/// Product with a DFA accepting the union, on inputs where `m` halts.
pub fn union_regular(m: &LimitedAutomaton, d: &Dfa) -> Result<LimitedAutomaton> {
    product(m, d, Combine::Or)
}

