use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::{intern, violation, Condition, StateId, Violation};
use crate::rational::{fmt_rational, is_probability, Rational};

/// Stack id of the bottom marker.
pub const BOTTOM: usize = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PdaRead {
    /// Index into the input alphabet.
    Sym(usize),
    Left,
    Right,
    Lambda,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdaRule {
    pub from: StateId,
    pub read: PdaRead,
    pub top: usize,
    pub to: StateId,
    /// Replacement for the popped top, topmost symbol first.
    pub push: Vec<usize>,
    pub prob: Rational,
}

/// One-way PDA reading `|c x $`. The stack starts as `⊥`; every move pops the
/// top and pushes `push` in its place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PushdownAutomaton {
    pub states: Vec<String>,
    pub input: Vec<String>,
    /// Stack alphabet; entry 0 is the bottom marker.
    pub stack: Vec<String>,
    pub push_size: usize,
    pub initial: StateId,
    pub accept: BTreeSet<StateId>,
    pub reject: BTreeSet<StateId>,
    pub rules: Vec<PdaRule>,
    pub claims_unambiguous: bool,
}

impl PushdownAutomaton {
    pub fn new(input: &[&str], push_size: usize) -> Self {
        PushdownAutomaton {
            states: Vec::new(),
            input: input.iter().map(|s| s.to_string()).collect(),
            stack: vec!["⊥".into()],
            push_size,
            initial: 0,
            accept: BTreeSet::new(),
            reject: BTreeSet::new(),
            rules: Vec::new(),
            claims_unambiguous: false,
        }
    }

    pub fn state(&mut self, name: &str) -> StateId {
        intern(&mut self.states, name)
    }

    pub fn stack_sym(&mut self, name: &str) -> usize {
        intern(&mut self.stack, name)
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn stack_id(&self, name: &str) -> Option<usize> {
        self.stack.iter().position(|s| s == name)
    }

    pub fn read_of(&self, name: &str) -> Option<PdaRead> {
        match name {
            "λ" | "" => Some(PdaRead::Lambda),
            "|c" => Some(PdaRead::Left),
            "$" => Some(PdaRead::Right),
            _ => self.input.iter().position(|s| s == name).map(PdaRead::Sym),
        }
    }

    pub fn read_name(&self, r: PdaRead) -> &str {
        match r {
            PdaRead::Sym(i) => &self.input[i],
            PdaRead::Left => "|c",
            PdaRead::Right => "$",
            PdaRead::Lambda => "λ",
        }
    }

    /// Name-based rule insertion; stack symbols are interned on the fly.
    /// Panics on an unknown input symbol.
    pub fn rule(&mut self, from: &str, read: &str, top: &str, to: &str, push: &[&str], prob: Rational) {
        let f = self.state(from);
        let t = self.state(to);
        let r = self.read_of(read).unwrap_or_else(|| panic!("unknown input symbol {read}"));
        let a = self.stack_sym(top);
        let u = push.iter().map(|s| self.stack_sym(s)).collect();
        self.rules.push(PdaRule { from: f, read: r, top: a, to: t, push: u, prob });
    }

    pub fn is_halting(&self, q: StateId) -> bool {
        self.accept.contains(&q) || self.reject.contains(&q)
    }

    pub fn push_string(&self, u: &[usize]) -> String {
        if u.is_empty() {
            return String::new();
        }
        let sep = if self.stack.iter().all(|s| s.chars().count() == 1) { "" } else { " " };
        u.iter().map(|&s| self.stack[s].as_str()).collect::<Vec<_>>().join(sep)
    }

    /// Splits on whitespace, then tokenizes each piece by longest match.
    pub fn parse_push(&self, s: &str) -> Option<Vec<usize>> {
        let mut out = Vec::new();
        for piece in s.split_whitespace() {
            let mut rest = piece;
            while !rest.is_empty() {
                let best = self
                    .stack
                    .iter()
                    .enumerate()
                    .filter(|(_, n)| !n.is_empty() && rest.starts_with(n.as_str()))
                    .max_by_key(|(_, n)| n.len())?;
                out.push(best.0);
                rest = &rest[best.1.len()..];
            }
        }
        Some(out)
    }

    /// Reads usable at a tape position, by kind.
    pub fn tape_reads(&self) -> Vec<PdaRead> {
        let mut v: Vec<_> = (0..self.input.len()).map(PdaRead::Sym).collect();
        v.push(PdaRead::Left);
        v.push(PdaRead::Right);
        v
    }

    /// Positive-weight rules indexed by (state, read, top).
    pub fn rule_index(&self) -> BTreeMap<(StateId, PdaRead, usize), Vec<usize>> {
        let mut t: BTreeMap<_, Vec<usize>> = BTreeMap::new();
        for (i, r) in self.rules.iter().enumerate() {
            if r.prob > Rational::zero() {
                t.entry((r.from, r.read, r.top)).or_default().push(i);
            }
        }
        t
    }

    /// Total weight of moves from `q` reading `r` with top `a`.
    pub fn weight(&self, q: StateId, r: PdaRead, a: usize) -> Rational {
        self.rules
            .iter()
            .filter(|x| x.from == q && x.read == r && x.top == a)
            .fold(Rational::zero(), |acc, x| acc + &x.prob)
    }
}

pub fn validate_pda(m: &PushdownAutomaton) -> Vec<Violation> {
    let mut out = Vec::new();
    if m.states.is_empty() || m.initial >= m.states.len() {
        out.push(violation(Condition::States, None, "missing initial state"));
    }
    if let Some(q) = m.accept.intersection(&m.reject).next() {
        out.push(violation(Condition::States, None, format!("state {} both accepting and rejecting", m.states[*q])));
    }
    if m.accept.iter().chain(&m.reject).any(|&q| q >= m.states.len()) {
        out.push(violation(Condition::States, None, "halting set names an unknown state"));
    }
    if m.input.iter().any(|s| s == "|c" || s == "$" || s == "λ") {
        out.push(violation(Condition::States, None, "input alphabet redeclares a reserved symbol"));
    }
    let mut sums: BTreeMap<(StateId, PdaRead, usize), Rational> = BTreeMap::new();
    for (i, r) in m.rules.iter().enumerate() {
        if r.from >= m.states.len() || r.to >= m.states.len() {
            out.push(violation(Condition::States, Some(i), "rule names an unknown state"));
            continue;
        }
        if r.top >= m.stack.len() || r.push.iter().any(|&s| s >= m.stack.len()) {
            out.push(violation(Condition::Bottom, Some(i), "rule names an unknown stack symbol"));
            continue;
        }
        if matches!(r.read, PdaRead::Sym(s) if s >= m.input.len()) {
            out.push(violation(Condition::States, Some(i), "rule reads an unknown input symbol"));
            continue;
        }
        if !is_probability(&r.prob) {
            out.push(violation(Condition::Stoch, Some(i), format!("weight {} outside [0,1]", fmt_rational(&r.prob))));
        }
        *sums.entry((r.from, r.read, r.top)).or_insert_with(Rational::zero) += &r.prob;
        if r.prob.is_zero() {
            continue;
        }
        if m.is_halting(r.from) {
            out.push(violation(Condition::States, Some(i), format!("rule leaves halting state {}", m.states[r.from])));
        }
        if r.push.len() > m.push_size {
            out.push(violation(
                Condition::PushSize,
                Some(i),
                format!("pushes {} symbols with push size {}", r.push.len(), m.push_size),
            ));
        }
        let bottoms = r.push.iter().filter(|&&s| s == BOTTOM).count();
        if r.top == BOTTOM {
            if r.push.last() != Some(&BOTTOM) || bottoms != 1 {
                out.push(violation(Condition::Bottom, Some(i), "bottom marker must stay at the bottom"));
            }
        } else if bottoms > 0 {
            out.push(violation(Condition::Bottom, Some(i), "bottom marker pushed above the bottom"));
        }
    }
    let zero = Rational::zero();
    let nondet = m.rules.iter().all(|r| r.prob.is_zero() || r.prob.is_one());
    for q in 0..m.states.len() {
        if m.is_halting(q) {
            continue;
        }
        for a in 0..m.stack.len() {
            let lam = sums.get(&(q, PdaRead::Lambda, a)).unwrap_or(&zero);
            for r in m.tape_reads() {
                let s = sums.get(&(q, r, a)).unwrap_or(&zero);
                let total = s + lam;
                if !total.is_zero() && !total.is_one() && !(nondet && total > Rational::one()) {
                    out.push(violation(
                        Condition::Stoch,
                        None,
                        format!(
                            "δ[{},{},{}] + δ[{},λ,{}] = {}",
                            m.states[q],
                            m.read_name(r),
                            m.stack[a],
                            m.states[q],
                            m.stack[a],
                            fmt_rational(&total)
                        ),
                    ));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdealShape {
    Yes,
    No { rule: usize, condition: &'static str, reason: String },
}

impl IdealShape {
    pub fn holds(&self) -> bool {
        matches!(self, IdealShape::Yes)
    }
}

pub fn is_ideal_shape(m: &PushdownAutomaton) -> IdealShape {
    let mut lam: BTreeMap<(StateId, usize), Rational> = BTreeMap::new();
    for r in &m.rules {
        if r.read == PdaRead::Lambda {
            *lam.entry((r.from, r.top)).or_insert_with(Rational::zero) += &r.prob;
        }
    }
    let has_lambda = |p: StateId, b: usize| lam.get(&(p, b)).is_some_and(|w| !w.is_zero());
    for (i, r) in m.rules.iter().enumerate() {
        if r.prob.is_zero() {
            continue;
        }
        if r.read == PdaRead::Lambda {
            if !r.push.is_empty() {
                return IdealShape::No { rule: i, condition: "i", reason: "λ-move does not pop".into() };
            }
            continue;
        }
        match r.push.as_slice() {
            [] => {}
            [a] if *a == r.top => {
                if has_lambda(r.to, r.top) {
                    return IdealShape::No {
                        rule: i,
                        condition: "iv",
                        reason: format!("stationary move into {} which has a λ-move on {}", m.states[r.to], m.stack[r.top]),
                    };
                }
            }
            [b, a] if *a == r.top && *b != BOTTOM => {
                if has_lambda(r.to, *b) {
                    return IdealShape::No {
                        rule: i,
                        condition: "iii",
                        reason: format!("push into {} which has a λ-move on {}", m.states[r.to], m.stack[*b]),
                    };
                }
            }
            _ => {
                return IdealShape::No {
                    rule: i,
                    condition: "ii",
                    reason: "move is not a pop, a single push or stationary".into(),
                }
            }
        }
    }
    IdealShape::Yes
}
