use std::collections::BTreeSet;

/// Complete DFA over an indexed alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    pub alphabet: Vec<String>,
    /// `delta[q][a]`
    pub delta: Vec<Vec<usize>>,
    pub start: usize,
    pub accept: BTreeSet<usize>,
}

impl Dfa {
    pub fn from_fn(alphabet: &[&str], states: usize, start: usize, accept: &[usize], f: impl Fn(usize, usize) -> usize) -> Dfa {
        let delta = (0..states).map(|q| (0..alphabet.len()).map(|a| f(q, a)).collect()).collect();
        Dfa {
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            delta,
            start,
            accept: accept.iter().copied().collect(),
        }
    }

    pub fn universal(alphabet: &[&str]) -> Dfa {
        Dfa::from_fn(alphabet, 1, 0, &[0], |_, _| 0)
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn step(&self, q: usize, a: usize) -> usize {
        self.delta[q][a]
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        let q = word.iter().fold(self.start, |q, &a| self.step(q, a));
        self.accept.contains(&q)
    }

    pub fn complement(&self) -> Dfa {
        let accept = (0..self.num_states()).filter(|q| !self.accept.contains(q)).collect();
        Dfa { accept, ..self.clone() }
    }

    /// Problems with totality or ranges, as messages.
    pub fn check(&self) -> Vec<String> {
        let n = self.num_states();
        let mut out = Vec::new();
        if self.start >= n {
            out.push("start state out of range".to_string());
        }
        for (q, row) in self.delta.iter().enumerate() {
            if row.len() != self.alphabet.len() {
                out.push(format!("state {q} has {} transitions for {} symbols", row.len(), self.alphabet.len()));
            }
            if row.iter().any(|&p| p >= n) {
                out.push(format!("state {q} has a target out of range"));
            }
        }
        if self.accept.iter().any(|&q| q >= n) {
            out.push("accepting state out of range".to_string());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_star() {
        let d = Dfa::from_fn(&["a", "b"], 2, 0, &[0], |q, a| if q == 0 && a == 0 { 0 } else { 1 });
        assert!(d.accepts(&[0, 0]));
        assert!(!d.accepts(&[0, 1]));
        assert!(d.complement().accepts(&[1]));
        assert!(d.check().is_empty());
    }
}
