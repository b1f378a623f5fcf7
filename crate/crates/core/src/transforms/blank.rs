//! Normal form in which frozen cells are replaced by one blank symbol that is
//! crossed in a fixed state and direction.
//!
//! Every maximal run of frozen cells is summarized by how many computation
//! paths lead from each (state, direction) entry to each exit, halt or trap.
//! The summary of a run is kept on the visible cells next to it and in the
//! state of a head crossing it. When the head uses a run it must come from one
//! of its edges, so the copy it consults is never stale. A head bounced back by
//! a run is handled without leaving the cell: the new machine performs the
//! whole excursion in one step and may therefore lag behind the source's visit
//! count, which is why a source-frozen cell can stay visible for a while.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::machine::{level_after, Dir, LimitedAutomaton, StateId, SymId, LEFT_END, RIGHT_END};
use crate::rational::Rational;

use super::crossing::qd_index;

/// More duplicate rules than this for one move is refused.
const MAX_MULTIPLICITY: u64 = 4096;
const MAX_PAIRS: usize = 400_000;
const MAX_SUMMARIES: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Out {
    Exit(StateId, Dir),
    Acc,
    Rej,
    Trap,
}

/// Path counts per entry `qd_index(q, d)`, rows sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Summary(Vec<Vec<(Out, u64)>>);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum NState {
    Plain(StateId),
    Skip(usize, StateId, Dir),
    Acc,
    Rej,
    Sink,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum NSym {
    LeftEnd,
    RightEnd,
    Blank,
    /// Source symbol, own level, summaries of the runs to the left and right.
    Cell { a: SymId, j: usize, l: Option<usize>, r: Option<usize> },
}

/// How a composite step ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Fin {
    Go(StateId),
    Cross(usize, StateId),
    Acc,
    Rej,
    Trap,
}

fn add(map: &mut BTreeMap<(Fin, SymId, Dir), u64>, key: (Fin, SymId, Dir), c: u64) -> Result<()> {
    let e = map.entry(key).or_insert(0);
    *e = e.checked_add(c).ok_or_else(|| Error::TooLarge("path count overflow".into()))?;
    Ok(())
}

fn mul(a: u64, b: u64) -> Result<u64> {
    a.checked_mul(b).ok_or_else(|| Error::TooLarge("path count overflow".into()))
}

struct Builder<'a> {
    m: &'a LimitedAutomaton,
    table: Vec<Vec<usize>>,
    levels: Vec<Option<usize>>,
    sums: Vec<Summary>,
    sum_ids: HashMap<Summary, usize>,
    cell_sum: HashMap<SymId, usize>,
    composed: HashMap<(usize, usize), usize>,
    n: LimitedAutomaton,
    states: Vec<NState>,
    state_ids: HashMap<NState, StateId>,
    syms: Vec<NSym>,
    sym_ids: HashMap<NSym, SymId>,
    blank_name: String,
    /// Keep path counts; otherwise every count is 0 or 1 and only
    /// recognition is preserved.
    counting: bool,
}

impl<'a> Builder<'a> {
    fn rules_at(&self, q: StateId, a: SymId) -> &[usize] {
        &self.table[q * self.m.symbols.len() + a]
    }

    fn outcome_of(&self, to: StateId, d: Dir) -> Out {
        if self.m.accept.contains(&to) {
            Out::Acc
        } else if self.m.reject.contains(&to) {
            Out::Rej
        } else {
            Out::Exit(to, d)
        }
    }

    fn intern_sum(&mut self, s: Summary) -> usize {
        if let Some(&id) = self.sum_ids.get(&s) {
            return id;
        }
        self.sums.push(s.clone());
        self.sum_ids.insert(s, self.sums.len() - 1);
        self.sums.len() - 1
    }

    fn cell_summary(&mut self, f: SymId) -> usize {
        if let Some(&id) = self.cell_sum.get(&f) {
            return id;
        }
        let nq = self.m.states.len();
        let mut rows = vec![Vec::new(); 2 * nq];
        for q in 0..nq {
            let mut row: BTreeMap<Out, u64> = BTreeMap::new();
            for &ri in self.rules_at(q, f) {
                let r = &self.m.rules[ri];
                *row.entry(self.outcome_of(r.to, r.dir)).or_default() += 1;
            }
            if row.is_empty() && !self.m.is_halting(q) {
                row.insert(Out::Trap, 1);
            }
            let row: Vec<_> = row.into_iter().map(|(o, k)| (o, self.count(k))).collect();
            rows[qd_index(q, Dir::Left)] = row.clone();
            rows[qd_index(q, Dir::Right)] = row;
        }
        let id = self.intern_sum(Summary(rows));
        self.cell_sum.insert(f, id);
        id
    }

    fn count(&self, k: u64) -> u64 {
        if self.counting {
            k
        } else {
            k.min(1)
        }
    }

    /// Summary of run `u` followed by run `v`.
    fn compose(&mut self, u: usize, v: usize) -> Result<usize> {
        if let Some(&id) = self.composed.get(&(u, v)) {
            return Ok(id);
        }
        let nq = self.m.states.len();
        let mut rows = vec![Vec::new(); 2 * nq];
        for q in 0..nq {
            for d in [Dir::Left, Dir::Right] {
                let mut acc: BTreeMap<Out, u64> = BTreeMap::new();
                let start = if d == Dir::Right { (false, q, d) } else { (true, q, d) };
                let mut path = Vec::new();
                let mut seen = HashSet::new();
                self.walk_runs(u, v, start, 1, &mut path, &mut seen, &mut acc)?;
                rows[qd_index(q, d)] = acc.into_iter().map(|(o, k)| (o, self.count(k))).collect();
            }
        }
        if rows.iter().flatten().any(|&(_, k)| k > MAX_MULTIPLICITY) {
            return Err(Error::TooLarge("a frozen region has too many paths through it".into()));
        }
        let id = self.intern_sum(Summary(rows));
        if self.sums.len() > MAX_SUMMARIES {
            return Err(Error::TooLarge(format!("more than {MAX_SUMMARIES} region summaries")));
        }
        self.composed.insert((u, v), id);
        Ok(id)
    }

    /// Depth-first walk of the bounces between runs `u` (false) and `v` (true).
    /// Without counting, every node is expanded once.
    #[allow(clippy::too_many_arguments)]
    fn walk_runs(
        &self,
        u: usize,
        v: usize,
        node: (bool, StateId, Dir),
        c: u64,
        path: &mut Vec<((bool, StateId, Dir), usize)>,
        seen: &mut HashSet<(bool, StateId, Dir)>,
        acc: &mut BTreeMap<Out, u64>,
    ) -> Result<()> {
        let (in_v, q, d) = node;
        let row = &self.sums[if in_v { v } else { u }].0[qd_index(q, d)];
        if !self.counting && !seen.insert(node) {
            return Ok(());
        }
        if let Some(pos) = path.iter().position(|(n, _)| *n == node) {
            if path[pos..].iter().all(|&(_, branching)| branching == 1) {
                let e = acc.entry(Out::Trap).or_insert(0);
                *e = e.checked_add(c).ok_or_else(|| Error::TooLarge("path count overflow".into()))?;
                return Ok(());
            }
            return Err(Error::NotSupported("infinitely many paths through a frozen region".into()));
        }
        let branching: u64 = row.iter().map(|(_, k)| *k).sum();
        path.push((node, branching as usize));
        for &(out, k) in row {
            let ck = mul(c, k)?;
            match out {
                Out::Exit(p, e) if !in_v && e == Dir::Right => self.walk_runs(u, v, (true, p, e), ck, path, seen, acc)?,
                Out::Exit(p, e) if in_v && e == Dir::Left => self.walk_runs(u, v, (false, p, e), ck, path, seen, acc)?,
                other => {
                    let e = acc.entry(other).or_insert(0);
                    *e = e.checked_add(ck).ok_or_else(|| Error::TooLarge("path count overflow".into()))?;
                }
            }
        }
        path.pop();
        Ok(())
    }

    fn state(&mut self, s: NState) -> StateId {
        if let Some(&id) = self.state_ids.get(&s) {
            return id;
        }
        let name = match s {
            NState::Plain(q) => self.m.states[q].clone(),
            NState::Skip(t, q, d) => format!("[T{t},{},{}]", self.m.states[q], d.sign()),
            NState::Acc => "acc".into(),
            NState::Rej => "rej".into(),
            NState::Sink => "sink".into(),
        };
        let id = self.n.push_state(name);
        match s {
            NState::Acc => {
                self.n.accept.insert(id);
            }
            NState::Rej => {
                self.n.reject.insert(id);
            }
            _ => {}
        }
        self.states.push(s);
        self.state_ids.insert(s, id);
        id
    }

    fn sym(&mut self, s: NSym) -> SymId {
        if let Some(&id) = self.sym_ids.get(&s) {
            return id;
        }
        let id = match s {
            NSym::LeftEnd => LEFT_END,
            NSym::RightEnd => RIGHT_END,
            NSym::Blank => self.n.set_blank(&self.blank_name.clone()),
            NSym::Cell { a, j: 0, .. } => self.n.push_symbol(self.m.symbols[a].clone(), 0),
            NSym::Cell { a, j, l, r } => {
                let side = |t: Option<usize>| t.map_or("-".to_string(), |t| format!("T{t}"));
                let name = format!("[{},{},{}]{j}", side(l), self.m.symbols[a], side(r));
                self.n.push_symbol(name, j)
            }
        };
        if id >= self.syms.len() {
            self.syms.resize(id + 1, NSym::Blank);
        }
        self.syms[id] = s;
        self.sym_ids.insert(s, id);
        id
    }

    /// The source machine's excursions from one visible cell, starting in
    /// state `q`, until it leaves for good.
    fn composite(
        &self,
        q: StateId,
        a: SymId,
        l: Option<usize>,
        r: Option<usize>,
    ) -> Result<BTreeMap<(Fin, SymId, Dir), u64>> {
        let mut out = BTreeMap::new();
        let mut path = Vec::new();
        let mut seen = HashSet::new();
        self.visit(q, a, l, r, 1, &mut path, &mut seen, &mut out, None)?;
        if !self.counting {
            out.values_mut().for_each(|k| *k = 1);
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn visit(
        &self,
        q: StateId,
        a: SymId,
        l: Option<usize>,
        r: Option<usize>,
        c: u64,
        path: &mut Vec<((StateId, SymId), u64)>,
        seen: &mut HashSet<(StateId, SymId)>,
        out: &mut BTreeMap<(Fin, SymId, Dir), u64>,
        via: Option<Dir>,
    ) -> Result<()> {
        if !self.counting && !seen.insert((q, a)) {
            return Ok(());
        }
        if let Some(pos) = path.iter().position(|(n, _)| *n == (q, a)) {
            if path[pos..].iter().all(|&(_, b)| b == 1) {
                return add(out, (Fin::Trap, a, via.unwrap_or(Dir::Right)), c);
            }
            return Err(Error::NotSupported("infinitely many paths bouncing off a frozen region".into()));
        }
        let rules = self.rules_at(q, a);
        let mut branching = 0u64;
        for &ri in rules {
            let rule = &self.m.rules[ri];
            let side = if rule.dir == Dir::Left { l } else { r };
            branching += match (self.m.is_halting(rule.to), side) {
                (false, Some(t)) => self.sums[t].0[qd_index(rule.to, rule.dir)].iter().map(|(_, k)| *k).sum(),
                _ => 1,
            };
        }
        path.push(((q, a), branching));
        for &ri in rules {
            let rule = &self.m.rules[ri];
            let (p, b, d) = (rule.to, rule.write, rule.dir);
            if self.m.accept.contains(&p) {
                add(out, (Fin::Acc, b, d), c)?;
                continue;
            }
            if self.m.reject.contains(&p) {
                add(out, (Fin::Rej, b, d), c)?;
                continue;
            }
            let side = if d == Dir::Left { l } else { r };
            let Some(t) = side else {
                add(out, (Fin::Go(p), b, d), c)?;
                continue;
            };
            for &(o, k) in &self.sums[t].0[qd_index(p, d)] {
                let ck = mul(c, k)?;
                match o {
                    Out::Exit(s, e) if e == d => add(out, (Fin::Cross(t, s), b, d), ck)?,
                    Out::Exit(s, _) => self.visit(s, b, l, r, ck, path, seen, out, Some(d))?,
                    Out::Acc => add(out, (Fin::Acc, b, d), ck)?,
                    Out::Rej => add(out, (Fin::Rej, b, d), ck)?,
                    Out::Trap => add(out, (Fin::Trap, b, d), ck)?,
                }
            }
        }
        path.pop();
        Ok(())
    }

    fn target(&mut self, fin: Fin, d: Dir, merged: Option<usize>) -> StateId {
        let s = match (fin, merged) {
            (Fin::Go(p), None) => NState::Plain(p),
            (Fin::Go(p), Some(t)) => NState::Skip(t, p, d),
            (Fin::Cross(t, s), None) => NState::Skip(t, s, d),
            (Fin::Cross(_, s), Some(t)) => NState::Skip(t, s, d),
            (Fin::Acc, _) => NState::Acc,
            (Fin::Rej, _) => NState::Rej,
            (Fin::Trap, _) => NState::Sink,
        };
        self.state(s)
    }

    fn process(&mut self, sid: StateId, yid: SymId) -> Result<()> {
        let st = self.states[sid];
        let sy = self.syms[yid];
        let (q, arrival) = match st {
            NState::Plain(q) => (q, None),
            NState::Skip(t, q, d) => {
                if sy == NSym::Blank {
                    self.n.add_rule(sid, yid, sid, yid, d, Rational::one());
                    return Ok(());
                }
                (q, Some((t, d)))
            }
            _ => return Ok(()),
        };
        let (a, j, mut l, mut r) = match sy {
            NSym::Blank => return Ok(()),
            NSym::LeftEnd => (LEFT_END, None, None, None),
            NSym::RightEnd => (RIGHT_END, None, None, None),
            NSym::Cell { a, j, l, r } => (a, Some(j), l, r),
        };
        match arrival {
            Some((t, Dir::Right)) => {
                if sy == NSym::LeftEnd {
                    return Ok(());
                }
                l = Some(t);
            }
            Some((t, Dir::Left)) => {
                if sy == NSym::RightEnd || j == Some(0) {
                    return Ok(());
                }
                r = Some(t);
            }
            None => {}
        }
        let fins = self.composite(q, a, l, r)?;
        for ((fin, b, d), count) in fins {
            if count > MAX_MULTIPLICITY {
                return Err(Error::TooLarge(format!("{count} paths for a single move")));
            }
            let (write, merged) = match j {
                None => (yid, None),
                Some(j) => {
                    let j2 = level_after(j, d, self.n.k);
                    if j2 < self.n.k {
                        (self.sym(NSym::Cell { a: b, j: j2, l, r }), None)
                    } else {
                        if self.levels[b] != Some(self.m.k) {
                            return Err(Error::Invalid("visible cell outran its source level".into()));
                        }
                        let mut t = self.cell_summary(b);
                        if let Some(lt) = l {
                            t = self.compose(lt, t)?;
                        }
                        if let Some(rt) = r {
                            t = self.compose(t, rt)?;
                        }
                        (self.sym(NSym::Blank), Some(t))
                    }
                }
            };
            let to = self.target(fin, d, merged);
            for _ in 0..count {
                self.n.add_rule(sid, yid, to, write, d, Rational::one());
            }
        }
        Ok(())
    }
}

/// Blank-skipping machine with the same language and, for every input, the
/// same number of accepting paths.
///
/// Refused with `NotSupported` or `TooLarge` when some frozen region admits
/// unboundedly many paths through it; a blank-skipping machine crosses such
/// a region in one deterministic sweep and cannot reproduce those counts.
pub fn to_blank_skipping(m: &LimitedAutomaton) -> Result<LimitedAutomaton> {
    build(m, true)
}

/// Blank-skipping machine with the same language. Path counts are not kept,
/// so this works for every nondeterministic machine.
pub fn to_blank_skipping_recognition(m: &LimitedAutomaton) -> Result<LimitedAutomaton> {
    build(m, false)
}

fn build(m: &LimitedAutomaton, counting: bool) -> Result<LimitedAutomaton> {
    if !m.rules.iter().all(|r| r.prob.is_zero() || r.prob.is_one()) {
        return Err(Error::NotNondet("blank-skipping needs 0/1 weights".into()));
    }
    if m.k < 2 {
        return Err(Error::WrongK { expected: 2, found: m.k });
    }
    let mut blank_name = "B".to_string();
    while m.symbols.contains(&blank_name) {
        blank_name.push('\'');
    }
    let mut b = Builder {
        m,
        table: m.rule_table(),
        levels: m.level_table(),
        sums: Vec::new(),
        sum_ids: HashMap::new(),
        cell_sum: HashMap::new(),
        composed: HashMap::new(),
        n: LimitedAutomaton::new(m.k),
        states: Vec::new(),
        state_ids: HashMap::new(),
        syms: Vec::new(),
        sym_ids: HashMap::new(),
        blank_name,
        counting,
    };
    b.n.claims_unambiguous = m.claims_unambiguous;
    b.sym(NSym::LeftEnd);
    b.sym(NSym::RightEnd);
    for &a in &m.levels[0] {
        b.sym(NSym::Cell { a, j: 0, l: None, r: None });
    }
    b.sym(NSym::Blank);
    let init = if m.accept.contains(&m.initial) {
        NState::Acc
    } else if m.reject.contains(&m.initial) {
        NState::Rej
    } else {
        NState::Plain(m.initial)
    };
    b.n.initial = b.state(init);

    // every (state, symbol) pair, including those created along the way
    let (mut done_s, mut done_y) = (0, 0);
    while done_s < b.states.len() || done_y < b.syms.len() {
        let (ns, ny) = (b.states.len(), b.syms.len());
        if ns * ny > MAX_PAIRS {
            return Err(Error::TooLarge(format!("{ns} states x {ny} symbols")));
        }
        for s in 0..ns {
            let from = if s < done_s { done_y } else { 0 };
            for y in from..ny {
                b.process(s, y)?;
            }
        }
        done_s = ns;
        done_y = ny;
    }
    Ok(b.n)
}
