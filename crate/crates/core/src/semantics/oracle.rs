//! Brute-force path enumeration. Deliberately independent of the graph
//! builder and the solver: it walks computation paths one by one.

use num_traits::{One, Zero};

use super::ProbabilityReport;
use crate::machine::{Dir, LimitedAutomaton, Machine, PdaRead, PushdownAutomaton};
use crate::rational::Rational;

/// Hard limit on visited path prefixes; anything left over counts as unresolved.
pub const ORACLE_BUDGET: usize = 4_000_000;

#[derive(Default)]
struct Tally {
    acc: Rational,
    rej: Rational,
    stuck: Rational,
    cut: Rational,
    visited: usize,
}

pub fn enumerate_paths_oracle(m: &Machine, word: &[usize], step_cap: usize) -> ProbabilityReport {
    let mut t = Tally::default();
    match m {
        Machine::Limited(m) => walk_limited(m, word, step_cap, &mut t),
        Machine::Pda(m) => walk_pda(m, word, step_cap, &mut t),
    }
    ProbabilityReport {
        p_acc: t.acc,
        p_rej: t.rej,
        p_nonhalt: t.stuck,
        p_unresolved: t.cut,
        expected_steps: None,
        nodes: t.visited,
        edges: 0,
    }
}

fn walk_limited(m: &LimitedAutomaton, word: &[usize], cap: usize, t: &mut Tally) {
    let mut tape = vec![0usize];
    for &a in word {
        tape.push(m.levels[0][a]);
    }
    tape.push(1);
    let last = tape.len() - 1;
    // (state, head, tape, probability, steps)
    let mut stack = vec![(m.initial, 0usize, tape, Rational::one(), 0usize)];
    while let Some((q, pos, tape, p, steps)) = stack.pop() {
        t.visited += 1;
        if m.accept.contains(&q) {
            t.acc += p;
            continue;
        }
        if m.reject.contains(&q) {
            t.rej += p;
            continue;
        }
        if steps >= cap || t.visited > ORACLE_BUDGET {
            t.cut += p;
            continue;
        }
        let here = tape[pos];
        let live: Vec<_> = m.rules.iter().filter(|r| r.from == q && r.read == here && !r.prob.is_zero()).collect();
        let total = live.iter().fold(Rational::zero(), |a, r| a + &r.prob);
        let scale = if total > Rational::one() { total.clone() } else { Rational::one() };
        let mut branches = Vec::new();
        for r in live {
            let w = &p * &r.prob / &scale;
            let np = match r.dir {
                Dir::Left if pos > 0 => pos - 1,
                Dir::Right if pos < last => pos + 1,
                _ => {
                    t.stuck += w;
                    continue;
                }
            };
            let mut nt = tape.clone();
            nt[pos] = r.write;
            branches.push((r.to, np, nt, w, steps + 1));
        }
        if total < Rational::one() {
            t.stuck += &p * (Rational::one() - total);
        }
        // reversed so the lowest rule id is explored first
        stack.extend(branches.into_iter().rev());
    }
}

fn walk_pda(m: &PushdownAutomaton, word: &[usize], cap: usize, t: &mut Tally) {
    let n = word.len();
    let cell = |i: usize| -> Option<PdaRead> {
        if i == 0 {
            Some(PdaRead::Left)
        } else if i <= n {
            Some(PdaRead::Sym(word[i - 1]))
        } else if i == n + 1 {
            Some(PdaRead::Right)
        } else {
            None
        }
    };
    let height = m.push_size * (n + 2) + 16;
    // stack content bottom first
    let mut stack = vec![(m.initial, 0usize, vec![0usize], Rational::one(), 0usize)];
    while let Some((q, pos, content, p, steps)) = stack.pop() {
        t.visited += 1;
        if m.accept.contains(&q) {
            t.acc += p;
            continue;
        }
        if m.reject.contains(&q) {
            t.rej += p;
            continue;
        }
        if steps >= cap || content.len() > height || t.visited > ORACLE_BUDGET {
            t.cut += p;
            continue;
        }
        let Some(&top) = content.last() else {
            t.stuck += p;
            continue;
        };
        let here = cell(pos);
        let mut total = Rational::zero();
        let mut branches = Vec::new();
        for r in &m.rules {
            if r.from != q || r.top != top || r.prob.is_zero() {
                continue;
            }
            let np = if r.read == PdaRead::Lambda {
                pos
            } else if Some(r.read) == here {
                pos + 1
            } else {
                continue;
            };
            total += &r.prob;
            let mut nc = content.clone();
            nc.pop();
            nc.extend(r.push.iter().rev());
            branches.push((r.to, np, nc, &p * &r.prob, steps + 1));
        }
        if total > Rational::one() {
            for b in branches.iter_mut() {
                b.3 = &b.3 / &total;
            }
        }
        if total < Rational::one() {
            t.stuck += &p * (Rational::one() - total);
        }
        stack.extend(branches.into_iter().rev());
    }
}
