//! Exact evaluation on concrete inputs.

mod graph;
mod oracle;
mod solve;

pub use graph::{build_config_graph, build_limited_graph, build_pda_graph, Caps, ConfigGraph, NodeKind};
pub use oracle::{enumerate_paths_oracle, ORACLE_BUDGET};
pub use solve::{
    absorption, accepting_path_count, bounded_path_count, co_reachable, expected_steps_all, sccs, solve_system,
    Absorption, PathCount,
};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::machine::Machine;
use crate::rational::{fmt_rational, half, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Steps {
    Finite(Rational),
    Infinite,
}

impl Steps {
    pub fn to_json(&self) -> Value {
        match self {
            Steps::Finite(r) => json!(fmt_rational(r)),
            Steps::Infinite => json!("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbabilityReport {
    /// Lower ends; the upper ends add `p_unresolved`.
    pub p_acc: Rational,
    pub p_rej: Rational,
    pub p_nonhalt: Rational,
    pub p_unresolved: Rational,
    /// `None` when unresolved mass makes it unknown.
    pub expected_steps: Option<Steps>,
    pub nodes: usize,
    pub edges: usize,
}

impl ProbabilityReport {
    pub fn acc_interval(&self) -> (Rational, Rational) {
        (self.p_acc.clone(), &self.p_acc + &self.p_unresolved)
    }

    pub fn rej_interval(&self) -> (Rational, Rational) {
        (self.p_rej.clone(), &self.p_rej + &self.p_unresolved)
    }

    pub fn total(&self) -> Rational {
        &self.p_acc + &self.p_rej + &self.p_nonhalt + &self.p_unresolved
    }

    pub fn is_exact(&self) -> bool {
        self.p_unresolved.is_zero()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p_acc": fmt_rational(&self.p_acc),
            "p_rej": fmt_rational(&self.p_rej),
            "p_nonhalt": fmt_rational(&self.p_nonhalt),
            "p_unresolved": fmt_rational(&self.p_unresolved),
            "expected_steps": self.expected_steps.as_ref().map(Steps::to_json).unwrap_or(Value::Null),
            "nodes": self.nodes,
            "edges": self.edges,
        })
    }
}

pub fn acceptance_probability(g: &ConfigGraph) -> ProbabilityReport {
    let a = absorption(g);
    let expected_steps = if a.unres[0].is_zero() {
        Some(match expected_steps_all(g, &a).swap_remove(0) {
            Some(t) => Steps::Finite(t),
            None => Steps::Infinite,
        })
    } else {
        None
    };
    let p_nonhalt = Rational::one() - &a.acc[0] - &a.rej[0] - &a.unres[0];
    ProbabilityReport {
        p_acc: a.acc[0].clone(),
        p_rej: a.rej[0].clone(),
        p_nonhalt,
        p_unresolved: a.unres[0].clone(),
        expected_steps,
        nodes: g.node_count(),
        edges: g.edge_count(),
    }
}

pub fn expected_steps(g: &ConfigGraph) -> Result<Steps> {
    let a = absorption(g);
    if !a.unres[0].is_zero() {
        return Err(Error::UnresolvedMass(fmt_rational(&a.unres[0])));
    }
    Ok(match expected_steps_all(g, &a).swap_remove(0) {
        Some(t) => Steps::Finite(t),
        None => Steps::Infinite,
    })
}

pub fn evaluate(m: &Machine, word: &[usize], caps: Caps) -> Result<ProbabilityReport> {
    Ok(acceptance_probability(&build_config_graph(m, word, caps)?))
}

fn require_nondet(m: &Machine) -> Result<()> {
    if m.classify().nondeterministic {
        Ok(())
    } else {
        Err(Error::NotNondet("machine has fractional weights".into()))
    }
}

/// Accepting paths of length at most `step_cap`, plus a flag telling whether
/// some path was still running at the cap.
pub fn count_accepting_paths(m: &Machine, word: &[usize], step_cap: usize, caps: Caps) -> Result<(BigUint, bool)> {
    require_nondet(m)?;
    Ok(bounded_path_count(&build_config_graph(m, word, caps)?, step_cap))
}

/// Exact number of accepting paths, or `Infinite` when an accepting cycle is live.
pub fn accepting_paths(m: &Machine, word: &[usize], caps: Caps) -> Result<PathCount> {
    require_nondet(m)?;
    Ok(accepting_path_count(&build_config_graph(m, word, caps)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Accept iff `p_acc > 1/2`, reject iff `p_rej >= 1/2`.
    Exact,
    /// Accept iff `p_acc >= 1 - eps`, reject iff `p_rej = 1`.
    OneSided(Rational),
    /// Exact thresholds, plus a margin check against `1 - eps`.
    Bounded(Rational),
    /// Some accepting path exists. Branching is split uniformly, so this is
    /// `p_acc > 0`.
    Nondet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Accept,
    Reject,
    Unresolved,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
            Verdict::Unresolved => "unresolved",
        }
    }
}

/// A verdict only stands if it holds across the whole unresolved interval.
pub fn verdict(r: &ProbabilityReport, mode: &Mode) -> Verdict {
    let (acc, rej) = (&r.p_acc, &r.p_rej);
    let accepts = match mode {
        Mode::Exact | Mode::Bounded(_) => *acc > half(),
        Mode::OneSided(eps) => *acc >= Rational::one() - eps,
        Mode::Nondet => !acc.is_zero(),
    };
    let rejects = match mode {
        Mode::Exact | Mode::Bounded(_) => *rej >= half(),
        Mode::OneSided(_) => rej.is_one(),
        Mode::Nondet => r.p_unresolved.is_zero(),
    };
    if accepts {
        Verdict::Accept
    } else if rejects {
        Verdict::Reject
    } else {
        Verdict::Unresolved
    }
}

/// In bounded mode: true when neither probability reaches `1 - eps`.
pub fn margin_violation(r: &ProbabilityReport, mode: &Mode) -> bool {
    match mode {
        Mode::Bounded(eps) => {
            let need = Rational::one() - eps;
            r.p_acc < need && r.p_rej < need
        }
        _ => false,
    }
}

#[derive(Clone, Debug)]
pub struct Decision {
    pub word: Vec<usize>,
    pub verdict: Verdict,
    pub margin_violation: bool,
    pub report: ProbabilityReport,
}

/// All words over `sigma` letters of length at most `n`, shortest first, then
/// lexicographic.
pub fn words_upto(sigma: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(layer.len() * sigma);
        for w in &layer {
            for a in 0..sigma {
                let mut v: Vec<usize> = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn word_string(alphabet: &[String], word: &[usize]) -> String {
    let sep = if alphabet.iter().all(|s| s.chars().count() == 1) { "" } else { " " };
    word.iter().map(|&a| alphabet[a].as_str()).collect::<Vec<_>>().join(sep)
}

/// Parses a word over `alphabet`: space separated, or one character per
/// letter when every letter is a single character.
pub fn parse_word(alphabet: &[String], s: &str) -> Result<Vec<usize>> {
    let find = |t: &str| {
        alphabet
            .iter()
            .position(|a| a == t)
            .ok_or_else(|| Error::AlphabetMismatch(format!("letter {t:?} not in the input alphabet")))
    };
    if s.contains(char::is_whitespace) || !alphabet.iter().all(|a| a.chars().count() == 1) {
        s.split_whitespace().map(find).collect()
    } else {
        s.chars().map(|c| find(&c.to_string())).collect()
    }
}

pub fn decide_language_upto(m: &Machine, n: usize, mode: &Mode, caps: Caps) -> Result<Vec<Decision>> {
    let sigma = m.input_alphabet().len();
    let words = words_upto(sigma, n);
    let run = |w: &Vec<usize>| -> Result<Decision> {
        let report = evaluate(m, w, caps)?;
        Ok(Decision {
            word: w.clone(),
            verdict: verdict(&report, mode),
            margin_violation: margin_violation(&report, mode),
            report,
        })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        words.par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        words.iter().map(run).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_in_order() {
        let w = words_upto(2, 2);
        assert_eq!(w, vec![vec![], vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn word_parsing() {
        let ab = vec!["a".to_string(), "b".to_string()];
        assert_eq!(parse_word(&ab, "abba").unwrap(), vec![0, 1, 1, 0]);
        assert_eq!(parse_word(&ab, "a b").unwrap(), vec![0, 1]);
        assert!(parse_word(&ab, "ac").is_err());
        assert_eq!(word_string(&ab, &[1, 0]), "ba");
    }
}
