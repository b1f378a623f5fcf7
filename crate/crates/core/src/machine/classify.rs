use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{is_blank_skipping, is_ideal_shape, LimitedAutomaton, PdaRead, PushdownAutomaton};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MachineClass {
    pub deterministic: bool,
    /// Every weight is 0 or 1.
    pub nondeterministic: bool,
    pub claims_unambiguous: bool,
    pub blank_skipping: bool,
    pub ideal_shape: bool,
}

pub fn classify_limited(m: &LimitedAutomaton) -> MachineClass {
    let nondet = m.rules.iter().all(|r| r.prob.is_zero() || r.prob.is_one());
    let mut support: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for r in m.rules.iter().filter(|r| !r.prob.is_zero()) {
        *support.entry((r.from, r.read)).or_default() += 1;
    }
    MachineClass {
        deterministic: nondet && support.values().all(|&c| c == 1),
        nondeterministic: nondet,
        claims_unambiguous: m.claims_unambiguous,
        blank_skipping: is_blank_skipping(m).holds(),
        ideal_shape: false,
    }
}

pub fn classify_pda(m: &PushdownAutomaton) -> MachineClass {
    let nondet = m.rules.iter().all(|r| r.prob.is_zero() || r.prob.is_one());
    let mut support: BTreeMap<(usize, PdaRead, usize), usize> = BTreeMap::new();
    for r in m.rules.iter().filter(|r| !r.prob.is_zero()) {
        *support.entry((r.from, r.read, r.top)).or_default() += 1;
    }
    let lambda = |q, a| support.get(&(q, PdaRead::Lambda, a)).copied().unwrap_or(0);
    let det = support.iter().all(|(&(q, r, a), &c)| match r {
        PdaRead::Lambda => c == 1,
        _ => c + lambda(q, a) == 1,
    });
    MachineClass {
        deterministic: nondet && det,
        nondeterministic: nondet,
        claims_unambiguous: m.claims_unambiguous,
        blank_skipping: false,
        ideal_shape: is_ideal_shape(m).holds(),
    }
}
