//! Splitting a (k+1)-limited machine into a real-time transducer that records
//! its first traverse and a k-limited machine that replays the rest.

mod cells;
mod transducer;

pub use cells::{cell_alphabet, first_traverse_transducer, residual_machine, CellState, Entry};
pub use transducer::{
    compose_transducers, evaluate_transducer, multiset_size, reverse_multiset, OutputMultiset, RtTransducer, TRead,
    TRule,
};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::machine::Machine;
use crate::rational::Rational;
use crate::semantics::{evaluate, Caps};

/// Whether `sum_y mult(y) * p_acc(m, y) > threshold * sum_y mult(y)`.
pub fn lfm_membership(outputs: &OutputMultiset, m: &Machine, threshold: &Rational, caps: Caps) -> Result<bool> {
    if outputs.is_empty() {
        return Err(Error::EmptyOutput);
    }
    let mut mass = Rational::zero();
    for (y, c) in outputs {
        let r = evaluate(m, y, caps)?;
        mass += r.p_acc * Rational::from_integer(BigInt::from(c.clone()));
    }
    let total = Rational::from_integer(BigInt::from(multiset_size(outputs)));
    Ok(mass > threshold * total)
}
