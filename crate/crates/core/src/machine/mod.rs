//! Machine kinds and their structural validators.

mod classify;
mod dfa;
mod limited;
mod pda;

pub use classify::{classify_limited, classify_pda, MachineClass};
pub use dfa::Dfa;
pub use limited::{
    is_blank_skipping, level_after, validate_limited, BlankSkipping, Dir, LaRule, LimitedAutomaton,
    SymId, LEFT_END, RIGHT_END,
};
pub use pda::{is_ideal_shape, validate_pda, IdealShape, PdaRead, PdaRule, PushdownAutomaton, BOTTOM};

use std::fmt;

pub type StateId = usize;

/// Condition identifiers attached to validation findings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    Stoch,
    Lim1,
    Lim2,
    Lim3,
    Endmark,
    Levels,
    States,
    PushSize,
    Bottom,
}

impl Condition {
    pub fn id(self) -> &'static str {
        match self {
            Condition::Stoch => "STOCH",
            Condition::Lim1 => "LIM1",
            Condition::Lim2 => "LIM2",
            Condition::Lim3 => "LIM3",
            Condition::Endmark => "ENDMARK",
            Condition::Levels => "LEVELS",
            Condition::States => "STATES",
            Condition::PushSize => "PUSHSIZE",
            Condition::Bottom => "BOTTOM",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    /// Index into the machine's rule list, when a single rule is at fault.
    pub rule: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rule {
            Some(r) => write!(f, "{} (rule #{r}): {}", self.condition, self.message),
            None => write!(f, "{}: {}", self.condition, self.message),
        }
    }
}

pub(crate) fn violation(condition: Condition, rule: Option<usize>, message: impl Into<String>) -> Violation {
    Violation { condition, rule, message: message.into() }
}

/// Returns the ids of a report, sorted and deduplicated.
pub fn condition_ids(report: &[Violation]) -> Vec<&'static str> {
    let mut ids: Vec<_> = report.iter().map(|v| v.condition.id()).collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

pub(crate) fn intern(names: &mut Vec<String>, name: &str) -> usize {
    match names.iter().position(|n| n == name) {
        Some(i) => i,
        None => {
            names.push(name.to_string());
            names.len() - 1
        }
    }
}

/// A machine that can be run on an input word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Machine {
    Limited(LimitedAutomaton),
    Pda(PushdownAutomaton),
}

impl Machine {
    pub fn input_alphabet(&self) -> Vec<String> {
        match self {
            Machine::Limited(m) => m.input_alphabet(),
            Machine::Pda(m) => m.input.clone(),
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        match self {
            Machine::Limited(m) => validate_limited(m),
            Machine::Pda(m) => validate_pda(m),
        }
    }

    pub fn classify(&self) -> MachineClass {
        match self {
            Machine::Limited(m) => classify_limited(m),
            Machine::Pda(m) => classify_pda(m),
        }
    }

    pub fn num_states(&self) -> usize {
        match self {
            Machine::Limited(m) => m.states.len(),
            Machine::Pda(m) => m.states.len(),
        }
    }

    pub fn claims_unambiguous(&self) -> bool {
        match self {
            Machine::Limited(m) => m.claims_unambiguous,
            Machine::Pda(m) => m.claims_unambiguous,
        }
    }
}

impl From<LimitedAutomaton> for Machine {
    fn from(m: LimitedAutomaton) -> Self {
        Machine::Limited(m)
    }
}

impl From<PushdownAutomaton> for Machine {
    fn from(m: PushdownAutomaton) -> Self {
        Machine::Pda(m)
    }
}
