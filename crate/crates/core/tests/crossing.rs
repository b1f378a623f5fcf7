use std::collections::BTreeSet;

use num_traits::Zero;
use proptest::prelude::*;

use limaut::machine::{Dir, LimitedAutomaton, StateId, SymId};
use limaut::transforms::{compose_crossing, crossing_matrix, CrossingMatrix};
use limaut::zoo;

fn matrix(states: usize, bits: &[bool]) -> CrossingMatrix {
    let mut t = CrossingMatrix::empty(states);
    let dirs = [Dir::Left, Dir::Right];
    let mut i = 0;
    for q in 0..states {
        for &d in &dirs {
            for p in 0..states {
                for &e in &dirs {
                    t.set((q, d), (p, e), bits[i % bits.len()]);
                    i += 1;
                }
            }
        }
    }
    t
}

fn arb_matrix(states: usize) -> impl Strategy<Value = CrossingMatrix> {
    prop::collection::vec(prop::bool::weighted(0.3), 4 * states * states).prop_map(move |b| matrix(states, &b))
}

proptest! {
    #[test]
    fn composition_is_associative(
        (a, b, c) in (1usize..4).prop_flat_map(|n| (arb_matrix(n), arb_matrix(n), arb_matrix(n)))
    ) {
        let left = compose_crossing(&compose_crossing(&a, &b).unwrap(), &c).unwrap();
        let right = compose_crossing(&a, &compose_crossing(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn pass_through_is_a_unit(a in (1usize..4).prop_flat_map(arb_matrix)) {
        let id = CrossingMatrix::pass_through(a.states);
        prop_assert_eq!(&compose_crossing(&id, &a).unwrap(), &a);
        prop_assert_eq!(&compose_crossing(&a, &id).unwrap(), &a);
    }
}

/// Exits of a frozen region found by walking the head over it cell by cell.
fn walk(m: &LimitedAutomaton, w: &[SymId], q: StateId, d: Dir) -> BTreeSet<(StateId, Dir)> {
    let start = if d == Dir::Right { 0 } else { w.len() as isize - 1 };
    let mut seen = BTreeSet::new();
    let mut stack = vec![(start, q)];
    let mut exits = BTreeSet::new();
    while let Some((pos, q)) = stack.pop() {
        if !seen.insert((pos, q)) {
            continue;
        }
        for r in m.rules.iter().filter(|r| r.from == q && r.read == w[pos as usize] && !r.prob.is_zero()) {
            let next = pos + r.dir.delta();
            if next < 0 || next >= w.len() as isize {
                exits.insert((r.to, r.dir));
            } else {
                stack.push((next, r.to));
            }
        }
    }
    exits
}

fn strings(alphabet: &[SymId], upto: usize) -> Vec<Vec<SymId>> {
    let mut out: Vec<Vec<SymId>> = vec![vec![]];
    let mut layer = out.clone();
    for _ in 0..upto {
        layer = layer.iter().flat_map(|w| alphabet.iter().map(move |&a| [w.clone(), vec![a]].concat())).collect();
        out.extend(layer.iter().cloned());
    }
    out.retain(|w| !w.is_empty());
    out
}

#[test]
fn composed_matrices_match_direct_walks() {
    for m in [zoo::lp1_2lda(), zoo::ab_2lna(), zoo::anbn_3lda(), zoo::dyck_3lda()] {
        let frozen = m.frozen_symbols();
        for w in strings(&frozen, 3) {
            let mut t = crossing_matrix(&m, w[0]).unwrap();
            for &f in &w[1..] {
                t = compose_crossing(&t, &crossing_matrix(&m, f).unwrap()).unwrap();
            }
            for q in 0..m.states.len() {
                for d in [Dir::Left, Dir::Right] {
                    let got: BTreeSet<_> = t.row((q, d)).collect();
                    assert_eq!(got, walk(&m, &w, q, d), "{:?} from {} {:?}", w, m.states[q], d);
                }
            }
        }
    }
}
