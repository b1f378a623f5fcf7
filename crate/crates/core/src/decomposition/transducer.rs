use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::machine::StateId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TRead {
    Sym(usize),
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TRule {
    pub from: StateId,
    pub read: TRead,
    pub to: StateId,
    /// One output letter per input letter; endmarker moves may write nothing.
    pub write: Option<usize>,
}

/// Real-time nondeterministic transducer on `|c x $` with a write-once
/// output tape. A run yields its output iff it reads `$` into `accept`.
/// Each rule is a distinct choice, so duplicated rules give distinct paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RtTransducer {
    pub states: Vec<String>,
    pub input: Vec<String>,
    pub output: Vec<String>,
    pub initial: StateId,
    pub accept: StateId,
    pub rules: Vec<TRule>,
}

/// Output strings with the number of accepting paths producing each.
pub type OutputMultiset = BTreeMap<Vec<usize>, BigUint>;

impl RtTransducer {
    /// Structural problems, as messages.
    pub fn check(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.states.len();
        if self.initial >= n || self.accept >= n {
            out.push("initial or accepting state out of range".into());
        }
        for (i, r) in self.rules.iter().enumerate() {
            if r.from >= n || r.to >= n {
                out.push(format!("rule #{i} names an unknown state"));
                continue;
            }
            if r.from == self.accept {
                out.push(format!("rule #{i} leaves the accepting state"));
            }
            if r.to == self.accept && r.read != TRead::Right {
                out.push(format!("rule #{i} enters the accepting state before $"));
            }
            match (r.read, r.write) {
                (TRead::Sym(a), _) if a >= self.input.len() => out.push(format!("rule #{i} reads an unknown letter")),
                (TRead::Sym(_), None) => out.push(format!("rule #{i} consumes a letter without output")),
                (_, Some(b)) if b >= self.output.len() => out.push(format!("rule #{i} writes an unknown letter")),
                _ => {}
            }
        }
        out
    }

    pub fn rules_from(&self) -> HashMap<(StateId, TRead), Vec<usize>> {
        let mut t: HashMap<_, Vec<usize>> = HashMap::new();
        for (i, r) in self.rules.iter().enumerate() {
            t.entry((r.from, r.read)).or_default().push(i);
        }
        t
    }

    /// Whether any endmarker move writes output.
    pub fn writes_on_endmarkers(&self) -> bool {
        self.rules.iter().any(|r| !matches!(r.read, TRead::Sym(_)) && r.write.is_some())
    }
}

pub fn evaluate_transducer(t: &RtTransducer, word: &[usize]) -> OutputMultiset {
    let index = t.rules_from();
    let mut layer: HashMap<(StateId, Vec<usize>), BigUint> = HashMap::new();
    layer.insert((t.initial, Vec::new()), BigUint::one());
    let cells = std::iter::once(TRead::Left)
        .chain(word.iter().map(|&a| TRead::Sym(a)))
        .chain(std::iter::once(TRead::Right));
    for cell in cells {
        let mut next: HashMap<(StateId, Vec<usize>), BigUint> = HashMap::new();
        for ((q, out), c) in layer {
            if q == t.accept {
                continue;
            }
            for &ri in index.get(&(q, cell)).map(Vec::as_slice).unwrap_or(&[]) {
                let r = &t.rules[ri];
                let mut o = out.clone();
                o.extend(r.write);
                *next.entry((r.to, o)).or_insert_with(BigUint::zero) += &c;
            }
        }
        layer = next;
    }
    let mut result = OutputMultiset::new();
    for ((q, out), c) in layer {
        if q == t.accept {
            *result.entry(out).or_insert_with(BigUint::zero) += c;
        }
    }
    result
}

pub fn multiset_size(m: &OutputMultiset) -> BigUint {
    m.values().fold(BigUint::zero(), |a, c| a + c)
}

/// Reverses every string, keeping multiplicities.
pub fn reverse_multiset(m: &OutputMultiset) -> OutputMultiset {
    let mut out = OutputMultiset::new();
    for (y, c) in m {
        let mut r = y.clone();
        r.reverse();
        *out.entry(r).or_insert_with(BigUint::zero) += c;
    }
    out
}

/// Runs `outer` backwards alongside `inner`. On input `x` the result emits,
/// for every output `y` of `inner` and every output `z` of `outer` on `y^R`,
/// the string `z^R`, one accepting path per pair of accepting paths.
///
/// A real-time machine emits in input order, so `z` comes out reversed;
/// reversing the result's strings gives `{ outer(y^R) : y in inner(x) }`.
pub fn compose_transducers(outer: &RtTransducer, inner: &RtTransducer) -> Result<RtTransducer> {
    if inner.output != outer.input {
        return Err(Error::AlphabetMismatch("inner output alphabet differs from outer input alphabet".into()));
    }
    if inner.rules.iter().any(|r| !matches!(r.read, TRead::Sym(_)) && r.write.is_some()) {
        return Err(Error::NotSupported("inner transducer writes on an endmarker".into()));
    }
    let mut n = RtTransducer {
        states: vec!["init".into(), "acc".into()],
        input: inner.input.clone(),
        output: outer.output.clone(),
        initial: 0,
        accept: 1,
        rules: Vec::new(),
    };
    // memory (inner state, outer state after the current letter in its own order)
    let mut ids: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut todo: Vec<(StateId, StateId)> = Vec::new();
    type Key = (StateId, StateId);
    let intern = |n: &mut RtTransducer, ids: &mut HashMap<Key, StateId>, key: Key, todo: &mut Vec<Key>| -> StateId {
        *ids.entry(key).or_insert_with(|| {
            n.states.push(format!("({},{})", inner.states[key.0], outer.states[key.1]));
            todo.push(key);
            n.states.len() - 1
        })
    };
    let inner_on = |q: StateId, r: TRead| inner.rules.iter().filter(move |x| x.from == q && x.read == r);

    for gi in inner_on(inner.initial, TRead::Left) {
        if gi.to == inner.accept {
            continue;
        }
        for fo in outer.rules.iter().filter(|x| x.read == TRead::Right && x.to == outer.accept) {
            let to = intern(&mut n, &mut ids, (gi.to, fo.from), &mut todo);
            n.rules.push(TRule { from: 0, read: TRead::Left, to, write: fo.write });
        }
    }
    while let Some((q1, r2)) = todo.pop() {
        let from = ids[&(q1, r2)];
        for a in 0..inner.input.len() {
            for gi in inner_on(q1, TRead::Sym(a)) {
                let Some(tau) = gi.write else { continue };
                if gi.to == inner.accept {
                    continue;
                }
                for fo in outer.rules.iter().filter(|x| x.read == TRead::Sym(tau) && x.to == r2) {
                    let Some(xi) = fo.write else { continue };
                    let to = intern(&mut n, &mut ids, (gi.to, fo.from), &mut todo);
                    n.rules.push(TRule { from, read: TRead::Sym(a), to, write: Some(xi) });
                }
            }
        }
        for gi in inner_on(q1, TRead::Right) {
            if gi.to != inner.accept {
                continue;
            }
            for fo in outer.rules.iter().filter(|x| x.from == outer.initial && x.read == TRead::Left && x.to == r2) {
                n.rules.push(TRule { from, read: TRead::Right, to: 1, write: fo.write });
            }
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(alpha: &[&str]) -> RtTransducer {
        let mut rules = vec![TRule { from: 0, read: TRead::Left, to: 1, write: None }];
        for a in 0..alpha.len() {
            rules.push(TRule { from: 1, read: TRead::Sym(a), to: 1, write: Some(a) });
        }
        rules.push(TRule { from: 1, read: TRead::Right, to: 2, write: None });
        let names: Vec<String> = alpha.iter().map(|s| s.to_string()).collect();
        RtTransducer {
            states: vec!["s".into(), "m".into(), "f".into()],
            input: names.clone(),
            output: names,
            initial: 0,
            accept: 2,
            rules,
        }
    }

    #[test]
    fn identity_evaluates_to_input() {
        let t = identity(&["a", "b"]);
        assert!(t.check().is_empty());
        let out = evaluate_transducer(&t, &[0, 1, 1]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[&vec![0, 1, 1]], BigUint::one());
    }

    #[test]
    fn identity_composition() {
        let t = identity(&["a", "b"]);
        let c = compose_transducers(&t, &t).unwrap();
        let out = evaluate_transducer(&c, &[0, 0, 1]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[&vec![0, 0, 1]], BigUint::one());
    }
}
