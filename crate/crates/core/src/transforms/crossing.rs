use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::machine::{Dir, LimitedAutomaton, StateId, SymId};
use crate::rational::Rational;
use num_traits::Zero;

/// Index of a (state, direction) pair in a crossing matrix.
pub fn qd_index(q: StateId, d: Dir) -> usize {
    2 * q + usize::from(d == Dir::Right)
}

pub fn qd_pair(i: usize) -> (StateId, Dir) {
    (i / 2, if i % 2 == 1 { Dir::Right } else { Dir::Left })
}

/// Boolean crossing relation of a frozen region. Entry `((q,d),(p,e))` is set
/// when a head entering the region in state `q` moving `d` can leave it in
/// state `p` moving `e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CrossingMatrix {
    pub states: usize,
    bits: Vec<bool>,
}

impl CrossingMatrix {
    pub fn empty(states: usize) -> Self {
        CrossingMatrix { states, bits: vec![false; 4 * states * states] }
    }

    pub fn dim(&self) -> usize {
        2 * self.states
    }

    pub fn get(&self, from: (StateId, Dir), to: (StateId, Dir)) -> bool {
        self.bits[qd_index(from.0, from.1) * self.dim() + qd_index(to.0, to.1)]
    }

    pub fn set(&mut self, from: (StateId, Dir), to: (StateId, Dir), v: bool) {
        let dim = self.dim();
        self.bits[qd_index(from.0, from.1) * dim + qd_index(to.0, to.1)] = v;
    }

    pub fn row(&self, from: (StateId, Dir)) -> impl Iterator<Item = (StateId, Dir)> + '_ {
        let dim = self.dim();
        let base = qd_index(from.0, from.1) * dim;
        (0..dim).filter(move |&j| self.bits[base + j]).map(qd_pair)
    }

    /// Region that every head crosses unchanged.
    pub fn pass_through(states: usize) -> Self {
        let mut t = CrossingMatrix::empty(states);
        for q in 0..states {
            for d in [Dir::Left, Dir::Right] {
                t.set((q, d), (q, d), true);
            }
        }
        t
    }
}

/// Lifts every state to `(q, d)`, `d` being the direction of the last move.
pub fn annotate_directions(m: &LimitedAutomaton) -> LimitedAutomaton {
    let mut n = m.clone();
    n.states.clear();
    n.rules.clear();
    n.accept.clear();
    n.reject.clear();
    let id = |q: StateId, d: Dir| qd_index(q, d);
    for q in &m.states {
        n.states.push(format!("({q},-1)"));
        n.states.push(format!("({q},+1)"));
    }
    for &q in &m.accept {
        n.accept.extend([id(q, Dir::Left), id(q, Dir::Right)]);
    }
    for &q in &m.reject {
        n.reject.extend([id(q, Dir::Left), id(q, Dir::Right)]);
    }
    n.initial = id(m.initial, Dir::Right);
    for d in [Dir::Left, Dir::Right] {
        for r in &m.rules {
            n.add_rule(id(r.from, d), r.read, id(r.to, r.dir), r.write, r.dir, r.prob.clone());
        }
    }
    n
}

/// Crossing relation of the one-cell region holding `f`.
pub fn crossing_matrix(m: &LimitedAutomaton, f: SymId) -> Result<CrossingMatrix> {
    if !m.frozen_symbols().contains(&f) {
        let name = m.symbols.get(f).cloned().unwrap_or_else(|| format!("#{f}"));
        return Err(Error::NotFrozen(name));
    }
    let mut t = CrossingMatrix::empty(m.states.len());
    for r in m.rules.iter().filter(|r| r.read == f && r.prob > Rational::zero()) {
        for d in [Dir::Left, Dir::Right] {
            t.set((r.from, d), (r.to, r.dir), true);
        }
    }
    Ok(t)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Side {
    U,
    V,
}

/// Exits of the region `uv` reachable from `start`, a head about to enter one
/// half. Leaving `u` rightwards enters `v`; leaving `v` leftwards enters `u`.
fn bounce(tu: &CrossingMatrix, tv: &CrossingMatrix, start: (Side, StateId, Dir)) -> BTreeSet<(StateId, Dir)> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![start];
    let mut exits = BTreeSet::new();
    while let Some(node) = stack.pop() {
        if !seen.insert(node) {
            continue;
        }
        let (side, q, d) = node;
        let t = if side == Side::U { tu } else { tv };
        for (p, e) in t.row((q, d)) {
            match (side, e) {
                (Side::U, Dir::Left) | (Side::V, Dir::Right) => {
                    exits.insert((p, e));
                }
                (Side::U, Dir::Right) => stack.push((Side::V, p, e)),
                (Side::V, Dir::Left) => stack.push((Side::U, p, e)),
            }
        }
    }
    exits
}

/// Crossing relation of the concatenated region `uv`.
pub fn compose_crossing(tu: &CrossingMatrix, tv: &CrossingMatrix) -> Result<CrossingMatrix> {
    if tu.states != tv.states {
        return Err(Error::DimMismatch(tu.dim(), tv.dim()));
    }
    let mut t = CrossingMatrix::empty(tu.states);
    for q in 0..tu.states {
        for d in [Dir::Left, Dir::Right] {
            let start = if d == Dir::Right { (Side::U, q, d) } else { (Side::V, q, d) };
            for exit in bounce(tu, tv, start) {
                t.set((q, d), exit, true);
            }
        }
    }
    Ok(t)
}

/// Exits of `uv` for a head standing on the boundary between `u` and `v` in
/// state `q` and moving `d`: rightwards it enters `v`, leftwards `u`. Empty
/// when the head is trapped.
pub fn d_delta(tu: &CrossingMatrix, q: StateId, d: Dir, tv: &CrossingMatrix) -> Result<BTreeSet<(StateId, Dir)>> {
    if tu.states != tv.states {
        return Err(Error::DimMismatch(tu.dim(), tv.dim()));
    }
    let start = if d == Dir::Right { (Side::V, q, d) } else { (Side::U, q, d) };
    Ok(bounce(tu, tv, start))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_through_is_idempotent() {
        let t = CrossingMatrix::pass_through(3);
        assert_eq!(compose_crossing(&t, &t).unwrap(), t);
        let exits = d_delta(&t, 1, Dir::Right, &t).unwrap();
        assert_eq!(exits.into_iter().collect::<Vec<_>>(), vec![(1, Dir::Right)]);
    }

    #[test]
    fn closed_bounce_loop_traps() {
        // u always turns right, v always turns left
        let mut u = CrossingMatrix::empty(1);
        let mut v = CrossingMatrix::empty(1);
        for d in [Dir::Left, Dir::Right] {
            u.set((0, d), (0, Dir::Right), true);
            v.set((0, d), (0, Dir::Left), true);
        }
        assert!(d_delta(&u, 0, Dir::Right, &v).unwrap().is_empty());
        assert!(d_delta(&u, 0, Dir::Left, &v).unwrap().is_empty());
    }

    #[test]
    fn dimension_mismatch() {
        let e = compose_crossing(&CrossingMatrix::empty(1), &CrossingMatrix::empty(2)).unwrap_err();
        assert_eq!(e.code(), "DIM_MISMATCH");
    }
}
