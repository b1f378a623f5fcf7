//! Limited automata and one-way probabilistic pushdown automata with exact
//! rational semantics and machine-to-machine constructions.

pub mod decomposition;
pub mod error;
pub mod format;
pub mod fuzz;
pub mod machine;
pub mod semantics;
pub mod rational;
pub mod transforms;
pub mod zoo;

pub use error::{Error, Result};
pub use rational::Rational;
