use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::graph::{ConfigGraph, NodeKind};
use crate::rational::Rational;

/// Absorption probabilities from every node.
#[derive(Clone, Debug)]
pub struct Absorption {
    pub acc: Vec<Rational>,
    pub rej: Vec<Rational>,
    pub unres: Vec<Rational>,
}

/// Nodes that can reach a node satisfying `target`.
pub fn co_reachable(g: &ConfigGraph, target: impl Fn(NodeKind) -> bool) -> Vec<bool> {
    let n = g.node_count();
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, es) in g.edges.iter().enumerate() {
        for &(w, _) in es {
            rev[w].push(v);
        }
    }
    let mut mark = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| target(g.kinds[v])).collect();
    for &v in &stack {
        mark[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &u in &rev[v] {
            if !mark[u] {
                mark[u] = true;
                stack.push(u);
            }
        }
    }
    mark
}

/// Strongly connected components of the subgraph induced by `active`, sinks
/// first. Iterative Tarjan.
pub fn sccs(g: &ConfigGraph, active: &[bool]) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next = 0;
    for root in 0..n {
        if !active[root] || index[root] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut ei)) = work.last_mut() {
            if *ei < g.edges[v].len() {
                let w = g.edges[v][*ei].0;
                *ei += 1;
                if !active[w] {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(u, _)) = work.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.reverse();
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// Solves `x_v = c_v + sum_w P(v,w) x_w` for every active node, where
/// inactive nodes take `fixed`. Each `x` has `cols` columns.
///
/// The system restricted to each component must be nonsingular, which holds
/// whenever every active node can leave its component.
pub fn solve_system(
    g: &ConfigGraph,
    active: &[bool],
    cols: usize,
    constant: impl Fn(usize) -> Vec<Rational>,
    fixed: impl Fn(usize) -> Vec<Rational>,
) -> Vec<Vec<Rational>> {
    let n = g.node_count();
    let mut x: Vec<Option<Vec<Rational>>> = vec![None; n];
    for v in 0..n {
        if !active[v] {
            x[v] = Some(fixed(v));
        }
    }
    for comp in sccs(g, active) {
        let local: BTreeMap<usize, usize> = comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let cyclic = comp.len() > 1 || g.edges[comp[0]].iter().any(|&(w, _)| w == comp[0]);
        // rhs_v = c_v + contributions of already-solved successors
        let mut rhs: Vec<Vec<Rational>> = Vec::with_capacity(comp.len());
        let mut rows: Vec<BTreeMap<usize, Rational>> = Vec::with_capacity(comp.len());
        for &v in &comp {
            let mut b = constant(v);
            let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
            row.insert(local[&v], Rational::one());
            for (w, p) in &g.edges[v] {
                match local.get(w) {
                    Some(&j) => {
                        let e = row.entry(j).or_insert_with(Rational::zero);
                        *e -= p;
                    }
                    None => {
                        let xw = x[*w].as_ref().expect("successor solved first");
                        for c in 0..cols {
                            b[c] += p * &xw[c];
                        }
                    }
                }
            }
            row.retain(|_, a| !a.is_zero());
            rhs.push(b);
            rows.push(row);
        }
        if !cyclic {
            x[comp[0]] = Some(rhs.pop().expect("one row"));
            continue;
        }
        let sol = eliminate(rows, rhs, cols);
        for (i, v) in comp.into_iter().enumerate() {
            x[v] = Some(sol[i].clone());
        }
    }
    x.into_iter().map(|v| v.expect("every node assigned")).collect()
}

/// Sparse Gaussian elimination without pivoting, in row order. Pivots of a
/// nonsingular M-matrix stay positive, so no row swaps are needed.
fn eliminate(mut rows: Vec<BTreeMap<usize, Rational>>, mut rhs: Vec<Vec<Rational>>, cols: usize) -> Vec<Vec<Rational>> {
    let s = rows.len();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); s];
    for (r, row) in rows.iter().enumerate() {
        for &c in row.keys() {
            col_rows[c].insert(r);
        }
    }
    for i in 0..s {
        let pivot = rows[i].get(&i).cloned().expect("singular system");
        assert!(!pivot.is_zero(), "singular system");
        let targets: Vec<usize> = col_rows[i].range(i + 1..).copied().collect();
        let prow: Vec<(usize, Rational)> = rows[i].range(i..).map(|(c, a)| (*c, a.clone())).collect();
        let pb = rhs[i].clone();
        for r in targets {
            let f = rows[r].remove(&i).expect("column entry") / &pivot;
            col_rows[i].remove(&r);
            for (c, a) in prow.iter().skip(1) {
                let e = rows[r].entry(*c).or_insert_with(Rational::zero);
                *e -= &f * a;
                if e.is_zero() {
                    rows[r].remove(c);
                    col_rows[*c].remove(&r);
                } else {
                    col_rows[*c].insert(r);
                }
            }
            for c in 0..cols {
                let d = &f * &pb[c];
                rhs[r][c] -= d;
            }
        }
    }
    let mut x: Vec<Vec<Rational>> = vec![Vec::new(); s];
    for i in (0..s).rev() {
        let mut b = rhs[i].clone();
        for (c, a) in rows[i].range(i + 1..) {
            for k in 0..cols {
                b[k] -= a * &x[*c][k];
            }
        }
        let pivot = &rows[i][&i];
        x[i] = b.into_iter().map(|v| v / pivot).collect();
    }
    x
}

pub fn absorption(g: &ConfigGraph) -> Absorption {
    let useful = co_reachable(g, |k| matches!(k, NodeKind::Accept | NodeKind::Reject | NodeKind::Unresolved));
    let active: Vec<bool> = (0..g.node_count()).map(|v| g.kinds[v] == NodeKind::Transient && useful[v]).collect();
    let z = Rational::zero;
    let sol = solve_system(
        g,
        &active,
        3,
        |_| vec![z(), z(), z()],
        |v| match g.kinds[v] {
            NodeKind::Accept => vec![Rational::one(), z(), z()],
            NodeKind::Reject => vec![z(), Rational::one(), z()],
            NodeKind::Unresolved => vec![z(), z(), Rational::one()],
            _ => vec![z(), z(), z()],
        },
    );
    let mut a = Absorption { acc: Vec::new(), rej: Vec::new(), unres: Vec::new() };
    for mut v in sol {
        a.unres.push(v.pop().expect("col"));
        a.rej.push(v.pop().expect("col"));
        a.acc.push(v.pop().expect("col"));
    }
    a
}

/// Expected number of steps to halt from every node; `None` where the
/// halting probability is below 1. Assumes no unresolved mass.
pub fn expected_steps_all(g: &ConfigGraph, abs: &Absorption) -> Vec<Option<Rational>> {
    let n = g.node_count();
    let halts: Vec<bool> = (0..n).map(|v| (&abs.acc[v] + &abs.rej[v]).is_one()).collect();
    let active: Vec<bool> = (0..n).map(|v| g.kinds[v] == NodeKind::Transient && halts[v]).collect();
    let sol = solve_system(g, &active, 1, |_| vec![Rational::one()], |_| vec![Rational::zero()]);
    sol.into_iter()
        .enumerate()
        .map(|(v, mut t)| if halts[v] { t.pop() } else { None })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathCount {
    Finite(BigUint),
    Infinite,
}

/// Number of distinct accepting paths from the initial node, counting
/// parallel edges separately.
pub fn accepting_path_count(g: &ConfigGraph) -> PathCount {
    let n = g.node_count();
    let useful = co_reachable(g, |k| k == NodeKind::Accept);
    let active: Vec<bool> = (0..n).map(|v| g.kinds[v] == NodeKind::Transient && useful[v]).collect();
    let mut count: Vec<BigUint> = (0..n)
        .map(|v| if g.kinds[v] == NodeKind::Accept { BigUint::one() } else { BigUint::zero() })
        .collect();
    for comp in sccs(g, &active) {
        let v = comp[0];
        if comp.len() > 1 || g.edges[v].iter().any(|&(w, _)| w == v) {
            // every node was discovered from the root, so the cycle is live
            return PathCount::Infinite;
        }
        let mut c = BigUint::zero();
        for &(w, _) in &g.edges[v] {
            c += &count[w];
        }
        count[v] = c;
    }
    PathCount::Finite(count[0].clone())
}

/// Accepting paths of length at most `step_cap`, and whether some path was
/// still running at the cap.
pub fn bounded_path_count(g: &ConfigGraph, step_cap: usize) -> (BigUint, bool) {
    let mut layer: BTreeMap<usize, BigUint> = BTreeMap::new();
    layer.insert(0, BigUint::one());
    let mut accepted = BigUint::zero();
    for step in 0..=step_cap {
        let mut next: BTreeMap<usize, BigUint> = BTreeMap::new();
        let mut running = false;
        for (v, c) in layer {
            match g.kinds[v] {
                NodeKind::Accept => accepted += c,
                NodeKind::Transient if step < step_cap => {
                    for &(w, _) in &g.edges[v] {
                        *next.entry(w).or_insert_with(BigUint::zero) += &c;
                    }
                }
                NodeKind::Transient => running = true,
                _ => {}
            }
        }
        if running {
            return (accepted, true);
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    (accepted, false)
}
