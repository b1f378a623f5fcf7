use std::collections::{HashMap, HashSet, VecDeque};

use num_traits::{One, Zero};

use super::transducer::{RtTransducer, TRead, TRule};
use crate::error::{Error, Result};
use crate::machine::{level_after, Dir, LimitedAutomaton, StateId, SymId, LEFT_END, RIGHT_END};
use crate::rational::{rat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entry {
    L,
    R,
    N,
}

/// What happened at one cell during the first left-to-right traverse.
/// `h = (t, r, a)` is the guessed visit that first leaves the cell to the
/// right after a left turn: state `t` there, then state `r` after writing `a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellState {
    pub d: Entry,
    pub q: StateId,
    pub sigma: SymId,
    pub tau: SymId,
    pub p: StateId,
    pub e: Dir,
    pub h: Option<(StateId, StateId, SymId)>,
}

impl CellState {
    pub fn display(&self, m: &LimitedAutomaton) -> String {
        let d = match self.d {
            Entry::L => "L",
            Entry::R => "R",
            Entry::N => "N",
        };
        let e = match self.e {
            Dir::Left => "L",
            Dir::Right => "R",
        };
        let h = match self.h {
            None => "λ".to_string(),
            Some((t, r, a)) => format!("{},{},{}", m.states[t], m.states[r], m.symbols[a]),
        };
        format!(
            "({d},{},{}|{},{},{e}|{h})",
            m.states[self.q], m.symbols[self.sigma], m.symbols[self.tau], m.states[self.p]
        )
    }
}

fn require_nondet(m: &LimitedAutomaton) -> Result<()> {
    if m.rules.iter().all(|r| r.prob.is_zero() || r.prob.is_one()) {
        Ok(())
    } else {
        Err(Error::NotSupported("fractional transition weights".into()))
    }
}

/// Every cell state the first traverse of `m` can write, sorted.
pub fn cell_alphabet(m: &LimitedAutomaton) -> Vec<CellState> {
    let live: Vec<_> = m.rules.iter().filter(|r| r.prob.is_one()).collect();
    let mut out = std::collections::BTreeSet::new();
    for r in &live {
        if r.read == LEFT_END {
            if r.from == m.initial && r.dir == Dir::Right && !m.is_halting(r.to) {
                out.insert(CellState { d: Entry::N, q: r.from, sigma: LEFT_END, tau: LEFT_END, p: r.to, e: Dir::Right, h: None });
            }
        } else if r.read == RIGHT_END {
            if m.is_halting(r.to) || r.dir == Dir::Left {
                out.insert(CellState { d: Entry::L, q: r.from, sigma: RIGHT_END, tau: RIGHT_END, p: r.to, e: r.dir, h: None });
            }
        } else if m.levels[0].contains(&r.read) && !m.is_halting(r.to) {
            out.extend(first_visits(m, &live, r.from, r.read, r.to, r.write, r.dir));
        }
    }
    out.into_iter().collect()
}

fn first_visits(
    m: &LimitedAutomaton,
    live: &[&crate::machine::LaRule],
    q: StateId,
    sigma: SymId,
    p: StateId,
    tau: SymId,
    e: Dir,
) -> Vec<CellState> {
    let base = CellState { d: Entry::L, q, sigma, tau, p, e, h: None };
    // The excursion after a left turn may come back to the cell several
    // times before leaving it to the right, so the exit may read any symbol
    // the cell can hold by then, not only `tau`.
    let lv = m.level_table();
    let from_level = lv[tau].unwrap_or(0);
    match e {
        Dir::Right => vec![base],
        Dir::Left => live
            .iter()
            .filter(|x| {
                x.dir == Dir::Right
                    && !m.is_halting(x.to)
                    && !m.is_endmarker(x.read)
                    && lv[x.read].is_some_and(|l| l >= from_level)
            })
            .map(|x| (x.from, x.to, x.write))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .map(|h| CellState { h: Some(h), ..base.clone() })
            .collect(),
    }
}

/// The transducer that writes one cell state per tape cell while following
/// the first traverse of `m`, guessing how each left turn is resolved.
/// Paths on which `m` halts before reaching `$` produce nothing.
pub fn first_traverse_transducer(m: &LimitedAutomaton) -> Result<RtTransducer> {
    require_nondet(m)?;
    let alpha = cell_alphabet(m);
    let index: HashMap<&CellState, usize> = alpha.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let nq = m.states.len();
    let mut t = RtTransducer {
        states: std::iter::once("start".to_string())
            .chain(m.states.iter().map(|q| format!("[{q}]")))
            .chain(std::iter::once("acc".to_string()))
            .collect(),
        input: m.input_alphabet(),
        output: alpha.iter().map(|c| c.display(m)).collect(),
        initial: 0,
        accept: nq + 1,
        rules: Vec::new(),
    };
    let mem = |q: StateId| q + 1;
    let live: Vec<_> = m.rules.iter().filter(|r| r.prob.is_one()).collect();
    for r in &live {
        if r.read == LEFT_END {
            if r.from != m.initial || r.dir != Dir::Right || m.is_halting(r.to) {
                continue;
            }
            let c = CellState { d: Entry::N, q: r.from, sigma: LEFT_END, tau: LEFT_END, p: r.to, e: Dir::Right, h: None };
            t.rules.push(TRule { from: 0, read: TRead::Left, to: mem(r.to), write: Some(index[&c]) });
        } else if r.read == RIGHT_END {
            if !(m.is_halting(r.to) || r.dir == Dir::Left) {
                continue;
            }
            let c = CellState { d: Entry::L, q: r.from, sigma: RIGHT_END, tau: RIGHT_END, p: r.to, e: r.dir, h: None };
            t.rules.push(TRule { from: mem(r.from), read: TRead::Right, to: t.accept, write: Some(index[&c]) });
        } else if let Some(a) = m.levels[0].iter().position(|&s| s == r.read) {
            if m.is_halting(r.to) {
                continue;
            }
            for c in first_visits(m, &live, r.from, r.read, r.to, r.write, r.dir) {
                let next = c.h.map_or(c.p, |(_, r2, _)| r2);
                t.rules.push(TRule { from: mem(r.from), read: TRead::Sym(a), to: mem(next), write: Some(index[&c]) });
            }
        }
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// residual machine

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Cont {
    Move(StateId, SymId),
    Verify(bool),
}

/// Content of a residual tape cell, in terms of the source machine.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Track {
    /// Ordinary cell holding a source symbol.
    Plain(SymId),
    /// Left-turn cell whose postponed excursion has not been replayed yet.
    Pending { cell: usize, x: SymId },
    /// Left-turn cell whose excursion is being replayed; `cont` resumes the
    /// interrupted simulation once the guessed exit is confirmed.
    Active { cell: usize, cont: Cont, y: SymId },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum NState {
    Start,
    Start1,
    Sim(StateId),
    Verify(bool),
    Accept,
    Reject,
    Overflow,
}

struct Builder<'a> {
    m: &'a LimitedAutomaton,
    cells: Vec<CellState>,
    n: LimitedAutomaton,
    k: usize,
    states: HashMap<NState, StateId>,
    state_keys: Vec<NState>,
    syms: HashMap<(Track, usize), SymId>,
    sym_keys: HashMap<SymId, (Track, usize)>,
}

impl<'a> Builder<'a> {
    fn state(&mut self, s: NState) -> StateId {
        if let Some(&id) = self.states.get(&s) {
            return id;
        }
        let name = match &s {
            NState::Start => "start".to_string(),
            NState::Start1 => "start1".to_string(),
            NState::Sim(q) => format!("<{}>", self.m.states[*q]),
            NState::Verify(v) => format!("verify-{}", if *v { "acc" } else { "rej" }),
            NState::Accept => "acc".to_string(),
            NState::Reject => "rej".to_string(),
            NState::Overflow => "overflow".to_string(),
        };
        let id = self.n.push_state(name);
        match s {
            NState::Accept => {
                self.n.accept.insert(id);
            }
            NState::Reject => {
                self.n.reject.insert(id);
            }
            _ => {}
        }
        self.states.insert(s.clone(), id);
        self.state_keys.push(s);
        id
    }

    fn track_name(&self, t: &Track) -> String {
        let ms = &self.m.symbols;
        match t {
            Track::Plain(s) => format!("[{}]", ms[*s]),
            Track::Pending { cell, x } => format!("[{}:{}]", cell, ms[*x]),
            Track::Active { cell, cont, y } => {
                let c = match cont {
                    Cont::Move(u, b) => format!("{},{}", self.m.states[*u], ms[*b]),
                    Cont::Verify(v) => format!("v{}", u8::from(*v)),
                };
                format!("[{}:{}/{}]", cell, ms[*y], c)
            }
        }
    }

    fn symbol(&mut self, t: Track, level: usize) -> SymId {
        if let Some(&id) = self.syms.get(&(t.clone(), level)) {
            return id;
        }
        let name = format!("{}{}", self.track_name(&t), level);
        let id = self.n.push_symbol(name, level);
        self.syms.insert((t.clone(), level), id);
        self.sym_keys.insert(id, (t, level));
        id
    }

    /// Content of a tape symbol; input letters decode their cell state.
    fn content(&self, s: SymId) -> Option<(Track, usize)> {
        if let Some((t, lvl)) = self.sym_keys.get(&s) {
            return Some((t.clone(), *lvl));
        }
        let i = self.n.levels[0].iter().position(|&x| x == s)?;
        let c = &self.cells[i];
        let t = match c.h {
            Some((_, _, a)) => Track::Pending { cell: i, x: a },
            None => Track::Plain(c.tau),
        };
        Some((t, 0))
    }

    fn source_moves(&self, q: StateId, s: SymId) -> Vec<(StateId, SymId, Dir)> {
        self.m
            .rules
            .iter()
            .filter(|r| r.from == q && r.read == s && r.prob.is_one())
            .map(|r| (r.to, r.write, r.dir))
            .collect()
    }

    /// Moves of the residual machine, as (state, content, physical direction, weight).
    /// The residual tape is reversed, so a source move to the left is a move
    /// to the right here.
    fn moves(&self, st: &NState, t: &Track) -> Vec<(NState, Track, Dir, Rational)> {
        let m = self.m;
        let mut out = Vec::new();
        let split = |n: usize| rat(1, n.max(1) as i64);
        match (st, t) {
            (NState::Sim(q), Track::Plain(s)) => {
                let mv = self.source_moves(*q, *s);
                let w = split(mv.len());
                for (r, s2, d) in mv {
                    if m.is_halting(r) {
                        out.push((NState::Verify(m.accept.contains(&r)), Track::Plain(s2), Dir::Right, w.clone()));
                    } else {
                        out.push((NState::Sim(r), Track::Plain(s2), d.flip(), w.clone()));
                    }
                }
            }
            (NState::Sim(q), Track::Pending { cell, x }) => {
                let c = &self.cells[*cell];
                let mv = self.source_moves(*q, *x);
                let w = split(mv.len());
                for (u, x2, d) in mv {
                    if m.is_halting(u) {
                        continue;
                    }
                    match d {
                        Dir::Right => out.push((NState::Sim(u), Track::Pending { cell: *cell, x: x2 }, Dir::Left, w.clone())),
                        Dir::Left => out.push((
                            NState::Sim(c.p),
                            Track::Active { cell: *cell, cont: Cont::Move(u, x2), y: c.tau },
                            Dir::Right,
                            w.clone(),
                        )),
                    }
                }
            }
            (NState::Sim(z), Track::Active { cell, cont, y }) => {
                let (t0, r0, a0) = self.cells[*cell].h.expect("active cells turn");
                let mv = self.source_moves(*z, *y);
                let w = split(mv.len());
                for (r, y2, d) in mv {
                    if m.is_halting(r) {
                        continue;
                    }
                    match d {
                        Dir::Left => out.push((
                            NState::Sim(r),
                            Track::Active { cell: *cell, cont: cont.clone(), y: y2 },
                            Dir::Right,
                            w.clone(),
                        )),
                        Dir::Right if (*z, r, y2) == (t0, r0, a0) => match cont {
                            Cont::Move(u, b) => out.push((NState::Sim(*u), Track::Plain(*b), Dir::Right, w.clone())),
                            Cont::Verify(v) => out.push((NState::Verify(*v), Track::Plain(y2), Dir::Right, w.clone())),
                        },
                        Dir::Right => {
                            let h = &w / rat(2, 1);
                            out.push((NState::Accept, t.clone(), Dir::Right, h.clone()));
                            out.push((NState::Reject, t.clone(), Dir::Right, h));
                        }
                    }
                }
            }
            (NState::Verify(v), Track::Plain(s)) if *s == LEFT_END => {
                let to = if *v { NState::Accept } else { NState::Reject };
                out.push((to, t.clone(), Dir::Left, Rational::one()));
            }
            (NState::Verify(v), Track::Plain(_)) => {
                out.push((NState::Verify(*v), t.clone(), Dir::Right, Rational::one()));
            }
            (NState::Verify(v), Track::Pending { cell, .. }) => {
                let c = &self.cells[*cell];
                out.push((
                    NState::Sim(c.p),
                    Track::Active { cell: *cell, cont: Cont::Verify(*v), y: c.tau },
                    Dir::Right,
                    Rational::one(),
                ));
            }
            _ => {}
        }
        out
    }

    fn add(&mut self, from: StateId, read: SymId, to: StateId, write: SymId, dir: Dir, prob: Rational) {
        self.n.add_rule(from, read, to, write, dir, prob);
    }

    fn expand(&mut self, st: StateId, sym: SymId) {
        let key = self.state_keys[st].clone();
        match key {
            NState::Start if sym == LEFT_END => {
                let to = self.state(NState::Start1);
                self.add(st, sym, to, LEFT_END, Dir::Right, Rational::one());
                return;
            }
            NState::Start1 => {
                let Some(i) = self.n.levels[0].iter().position(|&x| x == sym) else { return };
                let c = self.cells[i].clone();
                if c.sigma != RIGHT_END {
                    return;
                }
                let to = if self.m.is_halting(c.p) {
                    NState::Verify(self.m.accept.contains(&c.p))
                } else {
                    NState::Sim(c.p)
                };
                let to = self.state(to);
                let w = self.symbol(Track::Plain(RIGHT_END), level_after(0, Dir::Right, self.k));
                self.add(st, sym, to, w, Dir::Right, Rational::one());
                return;
            }
            _ => {}
        }
        if sym == LEFT_END || sym == RIGHT_END {
            return;
        }
        let Some((track, lvl)) = self.content(sym) else { return };
        for (to, t2, dir, w) in self.moves(&key, &track) {
            let nl = level_after(lvl, dir, self.k);
            let (to, write) = if lvl == self.k && t2 != track {
                (self.state(NState::Overflow), sym)
            } else if lvl == self.k {
                (self.state(to), sym)
            } else {
                (self.state(to), self.symbol(t2, nl))
            };
            self.add(st, sym, to, write, dir, w);
        }
    }
}

/// The k-limited machine that, reading a reversed first-traverse trace of the
/// (k+1)-limited `m`, replays every later visit of `m`.
///
/// A left-turn cell's excursion is replayed when the simulation first leaves
/// that cell to the left, or during a final right-to-left sweep after `m`
/// halts; a guessed exit that does not happen splits evenly between accept
/// and reject. `m` must halt only on `$`. A required rewrite of a frozen
/// residual cell goes to the non-halting state `overflow`.
pub fn residual_machine(m: &LimitedAutomaton) -> Result<LimitedAutomaton> {
    require_nondet(m)?;
    if m.k < 3 {
        return Err(Error::NotSupported(format!("need a machine with k >= 3, found {}", m.k)));
    }
    if let Some(r) = m.rules.iter().find(|r| r.prob.is_one() && m.is_halting(r.to) && r.read != RIGHT_END) {
        return Err(Error::NotSupported(format!(
            "machine halts on {} before $; it must halt only on $",
            m.symbols[r.read]
        )));
    }
    let cells = cell_alphabet(m);
    let k = m.k - 1;
    let mut n = LimitedAutomaton::new(k);
    for c in &cells {
        n.push_symbol(c.display(m), 0);
    }
    let mut b = Builder {
        m,
        cells,
        n,
        k,
        states: HashMap::new(),
        state_keys: Vec::new(),
        syms: HashMap::new(),
        sym_keys: HashMap::new(),
    };
    let start = b.state(NState::Start);
    b.n.initial = start;
    b.state(NState::Accept);
    b.state(NState::Reject);
    // fixed point over (state, symbol) pairs
    let mut done: HashSet<(StateId, SymId)> = HashSet::new();
    let mut queue: VecDeque<(StateId, SymId)> = VecDeque::new();
    let (mut seen_states, mut seen_syms) = (0, 0);
    loop {
        let (ns, nsym) = (b.n.states.len(), b.n.symbols.len());
        if ns == seen_states && nsym == seen_syms && queue.is_empty() {
            break;
        }
        for q in 0..ns {
            for s in 0..nsym {
                if (q >= seen_states || s >= seen_syms) && done.insert((q, s)) {
                    queue.push_back((q, s));
                }
            }
        }
        seen_states = ns;
        seen_syms = nsym;
        while let Some((q, s)) = queue.pop_front() {
            if !b.n.is_halting(q) {
                b.expand(q, s);
            }
        }
    }
    Ok(b.n)
}
