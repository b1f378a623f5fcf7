//! Seeded generators for fuzzing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomposition::{RtTransducer, TRead, TRule};
use crate::error::{Error, Result};
use crate::machine::{
    level_after, Dir, LimitedAutomaton, Machine, PdaRead, PdaRule, PushdownAutomaton, StateId, BOTTOM, LEFT_END,
    RIGHT_END,
};
use crate::rational::{one, rat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Limited,
    /// 2-limited, blank-skipping, with one skip direction per state.
    BlankSkipping,
    /// Ideal-shape one-way PDA.
    Pda,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Determinism {
    Det,
    Nondet,
    Prob,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RandomSpec {
    pub kind: Kind,
    pub k: usize,
    /// Non-halting states; `acc` and `rej` are added.
    pub states: usize,
    pub input: usize,
    /// Work symbols per level (limited) or stack symbols besides `⊥` (PDA).
    pub work: usize,
    pub determinism: Determinism,
    pub seed: u64,
}

impl RandomSpec {
    pub fn new(kind: Kind, determinism: Determinism, seed: u64) -> Self {
        RandomSpec { kind, k: 2, states: 3, input: 2, work: 2, determinism, seed }
    }

    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InconsistentSpec(m.into()));
        if self.states == 0 {
            return bad("need at least one state");
        }
        if self.input == 0 || self.input > 26 {
            return bad("input alphabet size must be in 1..=26");
        }
        if self.work == 0 {
            return bad("need at least one work symbol");
        }
        match self.kind {
            Kind::Limited if self.k == 0 => bad("k must be at least 1"),
            Kind::BlankSkipping if self.k != 2 => bad("blank-skipping machines are generated with k = 2"),
            _ => Ok(()),
        }
    }
}

fn letters(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// Weights of the moves at one choice point with total `total`.
fn split(rng: &mut ChaCha8Rng, det: Determinism, total: &Rational) -> Vec<Rational> {
    match det {
        Determinism::Det => vec![total.clone()],
        Determinism::Nondet => vec![one(); rng.gen_range(1..=2)],
        Determinism::Prob => match rng.gen_range(0..3) {
            0 => vec![total.clone()],
            1 => vec![total * rat(1, 2), total * rat(1, 2)],
            _ => vec![total * rat(1, 4), total * rat(3, 4)],
        },
    }
}

pub fn random_machine(spec: &RandomSpec) -> Result<Machine> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(match spec.kind {
        Kind::Limited => Machine::Limited(random_limited(spec, &mut rng)),
        Kind::BlankSkipping => Machine::Limited(random_blank_skipping(spec, &mut rng)),
        Kind::Pda => Machine::Pda(random_pda(spec, &mut rng)),
    })
}

fn limited_skeleton(spec: &RandomSpec, k: usize) -> (LimitedAutomaton, StateId, StateId) {
    let mut m = LimitedAutomaton::new(k);
    for a in letters(spec.input) {
        m.symbol(&a, 0);
    }
    for q in 0..spec.states {
        m.push_state(format!("q{q}"));
    }
    let acc = m.push_state("acc".into());
    let rej = m.push_state("rej".into());
    m.accept.insert(acc);
    m.reject.insert(rej);
    (m, acc, rej)
}

fn random_limited(spec: &RandomSpec, rng: &mut ChaCha8Rng) -> LimitedAutomaton {
    let k = spec.k;
    let (mut m, acc, rej) = limited_skeleton(spec, k);
    for l in 1..=k {
        for i in 0..spec.work {
            m.push_symbol(format!("x{l}{i}"), l);
        }
    }
    let target = |rng: &mut ChaCha8Rng| {
        if rng.gen_ratio(1, 4) {
            *[acc, rej].choose(rng).unwrap()
        } else {
            rng.gen_range(0..spec.states)
        }
    };
    let levels = m.level_table();
    for q in 0..spec.states {
        for (s, lvl) in levels.iter().enumerate() {
            let lvl = lvl.unwrap();
            for w in split(rng, spec.determinism, &one()) {
                let (to, write, dir) = if s == LEFT_END {
                    (target(rng), s, Dir::Right)
                } else if s == RIGHT_END {
                    (*[acc, rej].choose(rng).unwrap(), s, Dir::Left)
                } else {
                    let dir = if rng.gen_bool(0.5) { Dir::Right } else { Dir::Left };
                    let write = if lvl == k { s } else { *m.levels[level_after(lvl, dir, k)].choose(rng).unwrap() };
                    (target(rng), write, dir)
                };
                m.add_rule(q, s, to, write, dir, w);
            }
        }
    }
    m
}

fn random_blank_skipping(spec: &RandomSpec, rng: &mut ChaCha8Rng) -> LimitedAutomaton {
    let (mut m, acc, rej) = limited_skeleton(spec, 2);
    for i in 0..spec.work {
        m.push_symbol(format!("x{i}"), 1);
    }
    let b = m.set_blank("B");
    // skip direction of each state; the initial one moves right
    let side: Vec<Dir> = (0..spec.states)
        .map(|q| if q == 0 || rng.gen_bool(0.5) { Dir::Right } else { Dir::Left })
        .collect();
    let target = |rng: &mut ChaCha8Rng, want: Option<Dir>| -> StateId {
        let pool: Vec<StateId> = (0..spec.states).filter(|&q| want.is_none_or(|d| side[q] == d)).collect();
        if pool.is_empty() || rng.gen_ratio(1, 4) {
            *[acc, rej].choose(rng).unwrap()
        } else {
            *pool.choose(rng).unwrap()
        }
    };
    let work = m.levels[1].clone();
    let inputs = m.levels[0].clone();
    for q in 0..spec.states {
        m.add_rule(q, b, q, b, side[q], one());
        for w in split(rng, spec.determinism, &one()) {
            let to = target(rng, Some(Dir::Right));
            m.add_rule(q, LEFT_END, to, LEFT_END, Dir::Right, w);
        }
        for w in split(rng, spec.determinism, &one()) {
            let to = *[acc, rej].choose(rng).unwrap();
            m.add_rule(q, RIGHT_END, to, RIGHT_END, Dir::Left, w);
        }
        for &s in inputs.iter().chain(&work) {
            for w in split(rng, spec.determinism, &one()) {
                let to = target(rng, None);
                let dir = if to < spec.states {
                    side[to]
                } else if rng.gen_bool(0.5) {
                    Dir::Right
                } else {
                    Dir::Left
                };
                let write = if dir == Dir::Right && inputs.contains(&s) { *work.choose(rng).unwrap() } else { b };
                m.add_rule(q, s, to, write, dir, w);
            }
        }
    }
    m
}

fn random_pda(spec: &RandomSpec, rng: &mut ChaCha8Rng) -> PushdownAutomaton {
    let names = letters(spec.input);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut m = PushdownAutomaton::new(&refs, 2);
    for q in 0..spec.states {
        m.states.push(format!("q{q}"));
    }
    let acc = m.state("acc");
    let rej = m.state("rej");
    m.accept.insert(acc);
    m.reject.insert(rej);
    for i in 0..spec.work {
        m.stack.push(format!("Z{i}"));
    }
    let g = m.stack.len();
    // readers never move on λ, so pushes may enter them
    let reader: Vec<bool> = (0..spec.states).map(|q| q == 0 || rng.gen_bool(0.5)).collect();
    let readers: Vec<StateId> = (0..spec.states).filter(|&q| reader[q]).collect();
    let any = |rng: &mut ChaCha8Rng| -> StateId {
        if rng.gen_ratio(1, 4) {
            *[acc, rej].choose(rng).unwrap()
        } else {
            rng.gen_range(0..spec.states)
        }
    };
    let to_reader = |rng: &mut ChaCha8Rng| -> StateId {
        if rng.gen_ratio(1, 4) {
            *[acc, rej].choose(rng).unwrap()
        } else {
            *readers.choose(rng).unwrap()
        }
    };
    let mut rules = Vec::new();
    for (q, &reads_input) in reader.iter().enumerate().take(spec.states) {
        for a in 0..g {
            let lambda = if reads_input || a == BOTTOM {
                Rational::from_integer(0.into())
            } else {
                match (spec.determinism, rng.gen_range(0..3)) {
                    (_, 0) => Rational::from_integer(0.into()),
                    (Determinism::Prob, 1) => rat(1, 2),
                    _ => one(),
                }
            };
            if lambda > Rational::from_integer(0.into()) {
                for w in split(rng, spec.determinism, &lambda) {
                    rules.push(PdaRule { from: q, read: PdaRead::Lambda, top: a, to: any(rng), push: vec![], prob: w });
                }
            }
            let rest = one() - &lambda;
            let reads_too = spec.determinism == Determinism::Nondet && rng.gen_bool(0.5);
            if rest == Rational::from_integer(0.into()) && !reads_too {
                continue;
            }
            let rest = if rest == Rational::from_integer(0.into()) { one() } else { rest };
            let mut reads: Vec<PdaRead> = (0..spec.input).map(PdaRead::Sym).collect();
            reads.push(PdaRead::Right);
            reads.push(PdaRead::Left);
            let start = q == 0 && a == BOTTOM;
            for r in reads {
                if r == PdaRead::Left && !start {
                    // never used, but keeps every read's weights complete
                    rules.push(PdaRule { from: q, read: r, top: a, to: rej, push: vec![a], prob: rest.clone() });
                    continue;
                }
                for w in split(rng, spec.determinism, &rest) {
                    let (to, push) = match r {
                        PdaRead::Right => (*[acc, rej].choose(rng).unwrap(), vec![a]),
                        PdaRead::Left => match rng.gen_range(0..2) {
                            0 => (to_reader(rng), vec![BOTTOM]),
                            _ => (to_reader(rng), vec![rng.gen_range(1..g), BOTTOM]),
                        },
                        _ => match rng.gen_range(0..3) {
                            0 if a != BOTTOM => (any(rng), vec![]),
                            1 => (to_reader(rng), vec![rng.gen_range(1..g), a]),
                            _ => (to_reader(rng), vec![a]),
                        },
                    };
                    rules.push(PdaRule { from: q, read: r, top: a, to, push, prob: w });
                }
            }
        }
    }
    m.rules = rules;
    m
}

/// Random real-time transducer that writes only on letters.
pub fn random_transducer(states: usize, input: usize, output: usize, seed: u64) -> Result<RtTransducer> {
    if states == 0 || input == 0 || output == 0 {
        return Err(Error::InconsistentSpec("transducers need states and nonempty alphabets".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = RtTransducer {
        states: (0..states).map(|q| format!("t{q}")).chain(["fin".to_string()]).collect(),
        input: letters(input),
        output: letters(output),
        initial: 0,
        accept: states,
        rules: Vec::new(),
    };
    for _ in 0..rng.gen_range(1..=2) {
        t.rules.push(TRule { from: 0, read: TRead::Left, to: rng.gen_range(0..states), write: None });
    }
    for q in 0..states {
        for a in 0..input {
            for _ in 0..rng.gen_range(0..=2) {
                t.rules.push(TRule {
                    from: q,
                    read: TRead::Sym(a),
                    to: rng.gen_range(0..states),
                    write: Some(rng.gen_range(0..output)),
                });
            }
        }
        if rng.gen_ratio(2, 3) {
            t.rules.push(TRule { from: q, read: TRead::Right, to: states, write: None });
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{is_blank_skipping, is_ideal_shape};

    fn spec(kind: Kind, det: Determinism, seed: u64) -> RandomSpec {
        RandomSpec { k: if kind == Kind::Limited { 1 + (seed as usize % 3) } else { 2 }, ..RandomSpec::new(kind, det, seed) }
    }

    #[test]
    fn same_seed_same_machine() {
        let s = RandomSpec::new(Kind::Limited, Determinism::Prob, 7);
        assert_eq!(random_machine(&s).unwrap(), random_machine(&s).unwrap());
        assert_eq!(random_transducer(3, 2, 2, 5).unwrap(), random_transducer(3, 2, 2, 5).unwrap());
    }

    #[test]
    fn generated_machines_validate() {
        for seed in 0..1000 {
            for det in [Determinism::Det, Determinism::Nondet, Determinism::Prob] {
                for kind in [Kind::Limited, Kind::BlankSkipping, Kind::Pda] {
                    let m = random_machine(&spec(kind, det, seed)).unwrap();
                    assert!(m.validate().is_empty(), "{kind:?} {det:?} seed {seed}: {:?}", m.validate());
                    let c = m.classify();
                    if det == Determinism::Det {
                        assert!(c.deterministic);
                    }
                    match &m {
                        Machine::Limited(l) if kind == Kind::BlankSkipping => assert!(is_blank_skipping(l).holds()),
                        Machine::Pda(p) => assert!(is_ideal_shape(p).holds(), "seed {seed}"),
                        _ => {}
                    }
                }
            }
        }
    }

    #[test]
    fn bad_specs() {
        let mut s = RandomSpec::new(Kind::Limited, Determinism::Det, 0);
        s.k = 0;
        assert_eq!(random_machine(&s).unwrap_err().code(), "INCONSISTENT_SPEC");
        s.kind = Kind::BlankSkipping;
        s.k = 3;
        assert_eq!(random_machine(&s).unwrap_err().code(), "INCONSISTENT_SPEC");
        assert!(random_transducer(0, 1, 1, 0).is_err());
    }
}
