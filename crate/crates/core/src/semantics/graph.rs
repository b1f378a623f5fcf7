use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::machine::{LimitedAutomaton, Machine, PdaRead, PushdownAutomaton, BOTTOM};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Transient,
    Accept,
    Reject,
    /// A configuration with no move, or missing transition mass.
    Hang,
    /// Beyond a cap; its mass is unknown.
    Unresolved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_nodes: usize,
    /// `None` picks `e * (|x| + 2) + 16`.
    pub max_stack_height: Option<usize>,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_nodes: 2_000_000, max_stack_height: None }
    }
}

/// Reachable configurations of one machine on one input. Node 0 is initial.
/// Edges keep one entry per transition, so parallel edges are possible.
#[derive(Clone, Debug, Default)]
pub struct ConfigGraph {
    pub kinds: Vec<NodeKind>,
    pub edges: Vec<Vec<(usize, Rational)>>,
    /// Rule id behind each edge; `usize::MAX` marks synthetic edges.
    pub edge_rules: Vec<Vec<usize>>,
}

impl ConfigGraph {
    pub fn node_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    fn add(&mut self, kind: NodeKind) -> usize {
        self.kinds.push(kind);
        self.edges.push(Vec::new());
        self.edge_rules.push(Vec::new());
        self.kinds.len() - 1
    }

    /// True when some accepting node is reachable from the initial node.
    pub fn accept_reachable(&self) -> bool {
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            if self.kinds[v] == NodeKind::Accept {
                return true;
            }
            for &(w, _) in &self.edges[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        false
    }
}

pub fn build_config_graph(m: &Machine, word: &[usize], caps: Caps) -> Result<ConfigGraph> {
    match m {
        Machine::Limited(m) => build_limited_graph(m, word, caps),
        Machine::Pda(m) => Ok(build_pda_graph(m, word, caps)),
    }
}

fn check_word(n: usize, word: &[usize]) -> Result<()> {
    match word.iter().find(|&&a| a >= n) {
        Some(a) => Err(Error::AlphabetMismatch(format!("input letter {a} outside an alphabet of size {n}"))),
        None => Ok(()),
    }
}

/// Limited automata have finitely many configurations; hitting `max_nodes`
/// is an error rather than unresolved mass.
pub fn build_limited_graph(m: &LimitedAutomaton, word: &[usize], caps: Caps) -> Result<ConfigGraph> {
    check_word(m.levels[0].len(), word)?;
    let table = m.rule_table();
    let nsym = m.symbols.len();
    let last = word.len() + 1;
    let mut g = ConfigGraph::default();
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut queue: Vec<Vec<u32>> = Vec::new();

    let mut start = vec![m.initial as u32, 0];
    start.extend(m.tape_for(word).iter().map(|&s| s as u32));

    let kind_of = |q: usize| {
        if m.accept.contains(&q) {
            NodeKind::Accept
        } else if m.reject.contains(&q) {
            NodeKind::Reject
        } else {
            NodeKind::Transient
        }
    };
    let mut hang: Option<usize> = None;

    g.add(kind_of(m.initial));
    index.insert(start.clone(), 0);
    queue.push(start);
    let mut head = 0;
    while head < queue.len() {
        let key = queue[head].clone();
        let v = head;
        head += 1;
        if g.kinds[v] != NodeKind::Transient || key.is_empty() {
            continue;
        }
        let q = key[0] as usize;
        let pos = key[1] as usize;
        let sym = key[2 + pos] as usize;
        let rules = &table[q * nsym + sym];
        if rules.is_empty() {
            g.kinds[v] = NodeKind::Hang;
            continue;
        }
        let mut total = Rational::zero();
        for &ri in rules {
            let r = &m.rules[ri];
            total += &r.prob;
            let np = pos as isize + r.dir.delta();
            let target = if np < 0 || np as usize > last {
                *hang.get_or_insert_with(|| {
                    queue.push(Vec::new());
                    g.add(NodeKind::Hang)
                })
            } else {
                let mut next = key.clone();
                next[0] = r.to as u32;
                next[1] = np as u32;
                next[2 + pos] = r.write as u32;
                match index.get(&next) {
                    Some(&w) => w,
                    None => {
                        if g.node_count() >= caps.max_nodes {
                            return Err(Error::NodeLimit(caps.max_nodes));
                        }
                        let w = g.add(kind_of(r.to));
                        index.insert(next.clone(), w);
                        queue.push(next);
                        w
                    }
                }
            };
            g.edges[v].push((target, r.prob.clone()));
            g.edge_rules[v].push(ri);
        }
        if total > Rational::one() {
            // nondeterministic branching: split uniformly over the support
            for e in g.edges[v].iter_mut() {
                e.1 = &e.1 / &total;
            }
        }
        if total < Rational::one() {
            let h = *hang.get_or_insert_with(|| {
                queue.push(Vec::new());
                g.add(NodeKind::Hang)
            });
            g.edges[v].push((h, Rational::one() - total));
            g.edge_rules[v].push(usize::MAX);
        }
    }
    Ok(g)
}

/// Stack height past the cap and node overflow both become unresolved nodes.
pub fn build_pda_graph(m: &PushdownAutomaton, word: &[usize], caps: Caps) -> ConfigGraph {
    let height_cap = caps.max_stack_height.unwrap_or(m.push_size * (word.len() + 2) + 16);
    let index_rules = m.rule_index();
    let empty = Vec::new();
    let rules_for = |q: usize, r: PdaRead, a: usize| index_rules.get(&(q, r, a)).unwrap_or(&empty);
    let read_at = |pos: usize| -> Option<PdaRead> {
        match pos {
            0 => Some(PdaRead::Left),
            p if p <= word.len() => Some(PdaRead::Sym(word[p - 1])),
            p if p == word.len() + 1 => Some(PdaRead::Right),
            _ => None,
        }
    };
    let kind_of = |q: usize| {
        if m.accept.contains(&q) {
            NodeKind::Accept
        } else if m.reject.contains(&q) {
            NodeKind::Reject
        } else {
            NodeKind::Transient
        }
    };

    let mut g = ConfigGraph::default();
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut keys: Vec<Vec<u32>> = Vec::new();
    let mut hang: Option<usize> = None;
    let mut overflow: Option<usize> = None;

    let start = vec![m.initial as u32, 0, BOTTOM as u32];
    g.add(kind_of(m.initial));
    index.insert(start.clone(), 0);
    keys.push(start);

    let mut v = 0;
    while v < g.node_count() {
        if g.kinds[v] != NodeKind::Transient || keys[v].is_empty() {
            v += 1;
            continue;
        }
        let key = keys[v].clone();
        let q = key[0] as usize;
        let pos = key[1] as usize;
        let top = *key.last().expect("stack never empties") as usize;
        let mut moves: Vec<(usize, usize)> = Vec::new();
        if let Some(r) = read_at(pos) {
            moves.extend(rules_for(q, r, top).iter().map(|&ri| (ri, pos + 1)));
        }
        moves.extend(rules_for(q, PdaRead::Lambda, top).iter().map(|&ri| (ri, pos)));
        if moves.is_empty() {
            g.kinds[v] = NodeKind::Hang;
            v += 1;
            continue;
        }
        let mut total = Rational::zero();
        for (ri, np) in moves {
            let r = &m.rules[ri];
            total += &r.prob;
            let mut next = key.clone();
            next[0] = r.to as u32;
            next[1] = np as u32;
            next.pop();
            next.extend(r.push.iter().rev().map(|&s| s as u32));
            let target = if next.len() <= 2 {
                *hang.get_or_insert_with(|| {
                    keys.push(Vec::new());
                    g.add(NodeKind::Hang)
                })
            } else if next.len() - 2 > height_cap {
                *overflow.get_or_insert_with(|| {
                    keys.push(Vec::new());
                    g.add(NodeKind::Unresolved)
                })
            } else {
                match index.get(&next) {
                    Some(&w) => w,
                    None => {
                        let kind = if g.node_count() >= caps.max_nodes { NodeKind::Unresolved } else { kind_of(r.to) };
                        let w = g.add(kind);
                        index.insert(next.clone(), w);
                        keys.push(next);
                        w
                    }
                }
            };
            g.edges[v].push((target, r.prob.clone()));
            g.edge_rules[v].push(ri);
        }
        if total > Rational::one() {
            // nondeterministic branching: split uniformly over the support
            for e in g.edges[v].iter_mut() {
                e.1 = &e.1 / &total;
            }
        }
        if total < Rational::one() {
            let h = *hang.get_or_insert_with(|| {
                keys.push(Vec::new());
                g.add(NodeKind::Hang)
            });
            g.edges[v].push((h, Rational::one() - total));
            g.edge_rules[v].push(usize::MAX);
        }
        v += 1;
    }
    g
}
