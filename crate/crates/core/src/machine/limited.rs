use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{intern, violation, Condition, StateId, Violation};
use crate::rational::{fmt_rational, is_probability, Rational};

pub type SymId = usize;

pub const LEFT_END: SymId = 0;
pub const RIGHT_END: SymId = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    Left,
    Right,
}

impl Dir {
    pub fn delta(self) -> isize {
        match self {
            Dir::Left => -1,
            Dir::Right => 1,
        }
    }

    pub fn flip(self) -> Dir {
        match self {
            Dir::Left => Dir::Right,
            Dir::Right => Dir::Left,
        }
    }

    pub fn sign(self) -> &'static str {
        match self {
            Dir::Left => "-1",
            Dir::Right => "+1",
        }
    }

    pub fn from_delta(d: i64) -> Option<Dir> {
        match d {
            -1 => Some(Dir::Left),
            1 => Some(Dir::Right),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaRule {
    pub from: StateId,
    pub read: SymId,
    pub to: StateId,
    pub write: SymId,
    pub dir: Dir,
    pub prob: Rational,
}

/// A k-limited automaton over the tape `|c x $`.
///
/// Symbol 0 is the left endmarker and symbol 1 the right endmarker; both
/// belong to level k implicitly and are never listed in `levels`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitedAutomaton {
    pub k: usize,
    pub states: Vec<String>,
    pub symbols: Vec<String>,
    /// `levels[0]` is the input alphabet in its canonical order.
    pub levels: Vec<Vec<SymId>>,
    pub blank: Option<SymId>,
    pub initial: StateId,
    pub accept: BTreeSet<StateId>,
    pub reject: BTreeSet<StateId>,
    pub rules: Vec<LaRule>,
    pub claims_unambiguous: bool,
}

/// Level a cell moves to when a symbol of level `i` is left in direction `d`.
///
/// A turn counts as two visits. Counts past `k` saturate at `k`, so a turn on a
/// level `k-1` cell freezes it.
pub fn level_after(i: usize, d: Dir, k: usize) -> usize {
    let step = match (i.is_multiple_of(2), d) {
        (true, Dir::Right) | (false, Dir::Left) => 1,
        _ => 2,
    };
    (i + step).min(k)
}

impl LimitedAutomaton {
    pub fn new(k: usize) -> Self {
        LimitedAutomaton {
            k,
            states: Vec::new(),
            symbols: vec!["|c".into(), "$".into()],
            levels: vec![Vec::new(); k + 1],
            blank: None,
            initial: 0,
            accept: BTreeSet::new(),
            reject: BTreeSet::new(),
            rules: Vec::new(),
            claims_unambiguous: false,
        }
    }

    /// Interns a state by name.
    pub fn state(&mut self, name: &str) -> StateId {
        intern(&mut self.states, name)
    }

    /// Appends a state without looking for an existing one of the same name.
    pub fn push_state(&mut self, name: String) -> StateId {
        self.states.push(name);
        self.states.len() - 1
    }

    /// Interns a symbol and files it under `level` if it is new.
    pub fn symbol(&mut self, name: &str, level: usize) -> SymId {
        if let Some(id) = self.sym_id(name) {
            return id;
        }
        self.push_symbol(name.to_string(), level)
    }

    pub fn push_symbol(&mut self, name: String, level: usize) -> SymId {
        self.symbols.push(name);
        let id = self.symbols.len() - 1;
        self.levels[level].push(id);
        id
    }

    pub fn set_blank(&mut self, name: &str) -> SymId {
        let id = self.symbol(name, self.k);
        self.blank = Some(id);
        id
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn sym_id(&self, name: &str) -> Option<SymId> {
        self.symbols.iter().position(|s| s == name)
    }

    pub fn add_rule(&mut self, from: StateId, read: SymId, to: StateId, write: SymId, dir: Dir, prob: Rational) {
        self.rules.push(LaRule { from, read, to, write, dir, prob });
    }

    /// Name-based rule insertion for hand-built machines. Panics on unknown names.
    pub fn rule(&mut self, from: &str, read: &str, to: &str, write: &str, dir: Dir, prob: Rational) {
        let f = self.state(from);
        let t = self.state(to);
        let r = self.sym_id(read).unwrap_or_else(|| panic!("unknown symbol {read}"));
        let w = self.sym_id(write).unwrap_or_else(|| panic!("unknown symbol {write}"));
        self.add_rule(f, r, t, w, dir, prob);
    }

    pub fn input_alphabet(&self) -> Vec<String> {
        self.levels[0].iter().map(|&s| self.symbols[s].clone()).collect()
    }

    pub fn is_halting(&self, q: StateId) -> bool {
        self.accept.contains(&q) || self.reject.contains(&q)
    }

    pub fn is_endmarker(&self, s: SymId) -> bool {
        s == LEFT_END || s == RIGHT_END
    }

    /// Level of every symbol, `None` for symbols filed under no level.
    /// Endmarkers report level `k`.
    pub fn level_table(&self) -> Vec<Option<usize>> {
        let mut t = vec![None; self.symbols.len()];
        for (lvl, syms) in self.levels.iter().enumerate() {
            for &s in syms {
                if s < t.len() && t[s].is_none() {
                    t[s] = Some(lvl);
                }
            }
        }
        t[LEFT_END] = Some(self.k);
        t[RIGHT_END] = Some(self.k);
        t
    }

    /// Rule ids with positive weight, indexed by `from * |symbols| + read`,
    /// each list in rule-id order.
    pub fn rule_table(&self) -> Vec<Vec<usize>> {
        let n = self.symbols.len();
        let mut t = vec![Vec::new(); self.states.len() * n];
        for (i, r) in self.rules.iter().enumerate() {
            if r.prob > Rational::zero() && r.from < self.states.len() && r.read < n {
                t[r.from * n + r.read].push(i);
            }
        }
        t
    }

    /// Symbols of level k other than the endmarkers.
    pub fn frozen_symbols(&self) -> Vec<SymId> {
        self.levels.get(self.k).cloned().unwrap_or_default()
    }

    /// Maps input-alphabet indices to tape symbols.
    pub fn tape_for(&self, word: &[usize]) -> Vec<SymId> {
        let mut tape = Vec::with_capacity(word.len() + 2);
        tape.push(LEFT_END);
        tape.extend(word.iter().map(|&i| self.levels[0][i]));
        tape.push(RIGHT_END);
        tape
    }
}

pub fn validate_limited(m: &LimitedAutomaton) -> Vec<Violation> {
    let mut out = Vec::new();
    let k = m.k;
    if k == 0 || m.levels.len() != k + 1 {
        out.push(violation(Condition::Levels, None, format!("k = {k} with {} level sets", m.levels.len())));
        return out;
    }
    let mut seen: BTreeMap<SymId, usize> = BTreeMap::new();
    for (lvl, syms) in m.levels.iter().enumerate() {
        for &s in syms {
            if s >= m.symbols.len() {
                out.push(violation(Condition::Levels, None, format!("level {lvl} lists unknown symbol id {s}")));
                continue;
            }
            if m.is_endmarker(s) {
                out.push(violation(
                    Condition::Levels,
                    None,
                    format!("endmarker {} redeclared in level {lvl}", m.symbols[s]),
                ));
            } else if let Some(prev) = seen.insert(s, lvl) {
                out.push(violation(
                    Condition::Levels,
                    None,
                    format!("symbol {} appears in levels {prev} and {lvl}", m.symbols[s]),
                ));
            }
        }
    }
    for s in 2..m.symbols.len() {
        if !seen.contains_key(&s) {
            out.push(violation(Condition::Levels, None, format!("symbol {} has no level", m.symbols[s])));
        }
    }
    if let Some(b) = m.blank {
        if seen.get(&b) != Some(&k) {
            out.push(violation(Condition::Levels, None, "blank symbol is not in the top level"));
        }
    }
    if m.states.is_empty() || m.initial >= m.states.len() {
        out.push(violation(Condition::States, None, "missing initial state"));
    }
    if let Some(q) = m.accept.intersection(&m.reject).next() {
        out.push(violation(Condition::States, None, format!("state {} both accepting and rejecting", m.states[*q])));
    }
    if m.accept.iter().chain(&m.reject).any(|&q| q >= m.states.len()) {
        out.push(violation(Condition::States, None, "halting set names an unknown state"));
    }

    let levels = m.level_table();
    let mut sums: BTreeMap<(StateId, SymId), Rational> = BTreeMap::new();
    for (i, r) in m.rules.iter().enumerate() {
        if r.from >= m.states.len() || r.to >= m.states.len() {
            out.push(violation(Condition::States, Some(i), "rule names an unknown state"));
            continue;
        }
        if r.read >= m.symbols.len() || r.write >= m.symbols.len() {
            out.push(violation(Condition::Levels, Some(i), "rule names an unknown symbol"));
            continue;
        }
        if !is_probability(&r.prob) {
            out.push(violation(Condition::Stoch, Some(i), format!("weight {} outside [0,1]", fmt_rational(&r.prob))));
        }
        if m.is_halting(r.from) && r.prob > Rational::zero() {
            out.push(violation(Condition::States, Some(i), format!("rule leaves halting state {}", m.states[r.from])));
        }
        *sums.entry((r.from, r.read)).or_insert_with(Rational::zero) += &r.prob;
        if r.prob.is_zero() {
            continue;
        }
        let desc = || {
            format!(
                "({}, {} | {}, {}, {})",
                m.states[r.from],
                m.symbols[r.read],
                m.states[r.to],
                m.symbols[r.write],
                r.dir.sign()
            )
        };
        if m.is_endmarker(r.read) {
            if r.write != r.read {
                out.push(violation(Condition::Endmark, Some(i), format!("endmarker rewritten in {}", desc())));
            }
            let off = (r.read == LEFT_END && r.dir == Dir::Left) || (r.read == RIGHT_END && r.dir == Dir::Right);
            if off {
                out.push(violation(Condition::Endmark, Some(i), format!("head leaves the tape in {}", desc())));
            }
            continue;
        }
        if m.is_endmarker(r.write) {
            out.push(violation(Condition::Endmark, Some(i), format!("endmarker written in {}", desc())));
            continue;
        }
        let (Some(li), Some(lj)) = (levels[r.read], levels[r.write]) else {
            continue;
        };
        if li == k {
            if r.write != r.read {
                out.push(violation(Condition::Lim1, Some(i), format!("frozen symbol rewritten in {}", desc())));
            }
            continue;
        }
        let want = level_after(li, r.dir, k);
        if lj != want {
            let cond = if li % 2 == 0 { Condition::Lim2 } else { Condition::Lim3 };
            out.push(violation(cond, Some(i), format!("level {li} -> {lj}, expected {want} in {}", desc())));
        }
    }
    // pure 0/1 weights denote nondeterministic choice, so sums may exceed 1
    let nondet = m.rules.iter().all(|r| r.prob.is_zero() || r.prob.is_one());
    for ((q, s), total) in sums {
        if !total.is_zero() && !total.is_one() && !(nondet && total > Rational::one()) {
            out.push(violation(
                Condition::Stoch,
                None,
                format!("weights at ({}, {}) sum to {}", m.states[q], m.symbols[s], fmt_rational(&total)),
            ));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlankSkipping {
    Yes { plus: Vec<StateId>, minus: Vec<StateId> },
    No { rule: Option<usize>, reason: String },
}

impl BlankSkipping {
    pub fn holds(&self) -> bool {
        matches!(self, BlankSkipping::Yes { .. })
    }
}

pub fn is_blank_skipping(m: &LimitedAutomaton) -> BlankSkipping {
    let Some(b) = m.blank else {
        return BlankSkipping::No { rule: None, reason: "no blank symbol".into() };
    };
    let top = m.levels.get(m.k).cloned().unwrap_or_default();
    if top != [b] {
        return BlankSkipping::No {
            rule: None,
            reason: format!("top level has {} symbols besides the endmarkers", top.len()),
        };
    }
    let mut side: BTreeMap<StateId, Dir> = BTreeMap::new();
    for (i, r) in m.rules.iter().enumerate() {
        if r.read != b || r.prob.is_zero() {
            continue;
        }
        if r.to != r.from || r.write != b || !r.prob.is_one() {
            return BlankSkipping::No { rule: Some(i), reason: "blank move changes state or is not certain".into() };
        }
        if let Some(prev) = side.insert(r.from, r.dir) {
            if prev != r.dir {
                return BlankSkipping::No { rule: Some(i), reason: "state skips blanks in both directions".into() };
            }
        }
    }
    let plus = side.iter().filter(|(_, d)| **d == Dir::Right).map(|(q, _)| *q).collect();
    let minus = side.iter().filter(|(_, d)| **d == Dir::Left).map(|(q, _)| *q).collect();
    BlankSkipping::Yes { plus, minus }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_steps() {
        assert_eq!(level_after(0, Dir::Right, 2), 1);
        assert_eq!(level_after(0, Dir::Left, 2), 2);
        assert_eq!(level_after(1, Dir::Left, 2), 2);
        assert_eq!(level_after(1, Dir::Right, 2), 2);
        assert_eq!(level_after(1, Dir::Right, 3), 3);
        assert_eq!(level_after(2, Dir::Left, 5), 4);
    }
}
