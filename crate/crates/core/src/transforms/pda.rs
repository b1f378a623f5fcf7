use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::machine::{
    is_blank_skipping, is_ideal_shape, BlankSkipping, Dir, IdealShape, LimitedAutomaton, PdaRead, PdaRule,
    PushdownAutomaton, StateId, BOTTOM, LEFT_END, RIGHT_END,
};
use crate::rational::Rational;

/// One-way PDA with twice the states of a blank-skipping 2-limited machine.
/// Level-1 symbols live on the stack; `q+` moves right and `q-` pops while
/// the source head walks left.
///
/// The source must not come back to `$` once it has left it.
pub fn lpa2_to_1ppda(m: &LimitedAutomaton) -> Result<PushdownAutomaton> {
    if m.k != 2 {
        return Err(Error::WrongK { expected: 2, found: m.k });
    }
    let (plus, minus) = match is_blank_skipping(m) {
        BlankSkipping::Yes { plus, minus } => (plus, minus),
        BlankSkipping::No { reason, .. } => return Err(Error::NotBlankSkipping(reason)),
    };
    let levels = m.level_table();
    for r in m.rules.iter().filter(|r| !r.prob.is_zero() && Some(r.read) != m.blank) {
        let wrong = match r.dir {
            Dir::Right => minus.contains(&r.to),
            Dir::Left => plus.contains(&r.to),
        };
        if wrong {
            return Err(Error::NotBlankSkipping(format!(
                "state {} skips blanks against the direction it is entered in",
                m.states[r.to]
            )));
        }
    }

    let input = m.input_alphabet();
    let names: Vec<&str> = input.iter().map(String::as_str).collect();
    let mut p = PushdownAutomaton::new(&names, 2);
    p.claims_unambiguous = m.claims_unambiguous;
    for q in &m.states {
        p.states.push(format!("{q}+"));
        p.states.push(format!("{q}-"));
    }
    let pl = |q: StateId| 2 * q;
    let mi = |q: StateId| 2 * q + 1;
    for &q in &m.accept {
        p.accept.extend([pl(q), mi(q)]);
    }
    for &q in &m.reject {
        p.reject.extend([pl(q), mi(q)]);
    }
    p.initial = pl(m.initial);
    // stack id of each level-1 symbol
    let mut stack_of = vec![usize::MAX; m.symbols.len()];
    for &s in &m.levels[1] {
        stack_of[s] = p.stack.len();
        p.stack.push(m.symbols[s].clone());
    }
    let tops: Vec<usize> = (0..p.stack.len()).collect();
    let input_index = |s: usize| m.levels[0].iter().position(|&x| x == s);

    let mut rules = Vec::new();
    let mut push = |from, read, top, to, push: Vec<usize>, prob: &Rational| {
        rules.push(PdaRule { from, read, top, to, push, prob: prob.clone() })
    };
    for r in m.rules.iter().filter(|r| !r.prob.is_zero()) {
        let w = &r.prob;
        if r.read == LEFT_END {
            push(pl(r.from), PdaRead::Left, BOTTOM, pl(r.to), vec![BOTTOM], w);
            push(mi(r.from), PdaRead::Lambda, BOTTOM, pl(r.to), vec![BOTTOM], w);
            continue;
        }
        if r.read == RIGHT_END {
            for &a in &tops {
                push(pl(r.from), PdaRead::Right, a, mi(r.to), vec![a], w);
            }
            continue;
        }
        match levels[r.read] {
            Some(0) => {
                let sigma = PdaRead::Sym(input_index(r.read).expect("level-0 symbol"));
                for &a in &tops {
                    match r.dir {
                        Dir::Right => push(pl(r.from), sigma, a, pl(r.to), vec![stack_of[r.write], a], w),
                        Dir::Left => push(pl(r.from), sigma, a, mi(r.to), vec![a], w),
                    }
                }
            }
            Some(1) => {
                let to = if r.dir == Dir::Right { pl(r.to) } else { mi(r.to) };
                push(mi(r.from), PdaRead::Lambda, stack_of[r.read], to, vec![], w);
            }
            // blank moves are implicit
            _ => {}
        }
    }
    p.rules = rules;
    Ok(p)
}

/// Blank-skipping 2-limited machine simulating an ideal-shape PDA. States are
/// `[q,a]` (state and stack top, head moving right) and `q` (popping, head
/// moving left); the stack below the top sits on level-1 cells.
///
/// Every move reading `$` must enter a halting state.
pub fn ppda_to_lpa2(m: &PushdownAutomaton) -> Result<LimitedAutomaton> {
    if let IdealShape::No { reason, condition, .. } = is_ideal_shape(m) {
        return Err(Error::NotIdealShape(format!("condition ({condition}): {reason}")));
    }
    if let Some(r) = m.rules.iter().find(|r| r.read == PdaRead::Right && !r.prob.is_zero() && !m.is_halting(r.to)) {
        return Err(Error::NotSupported(format!("move on $ into non-halting state {}", m.states[r.to])));
    }
    let n = m.states.len();
    let g = m.stack.len();
    let nondet = m.rules.iter().all(|r| r.prob.is_zero() || r.prob.is_one());
    let mut la = LimitedAutomaton::new(2);
    la.claims_unambiguous = m.claims_unambiguous;
    for q in &m.states {
        for a in &m.stack {
            la.push_state(format!("[{q},{a}]"));
        }
    }
    for q in &m.states {
        la.push_state(q.clone());
    }
    let top = |q: StateId, a: usize| q * g + a;
    let pop = |q: StateId| n * g + q;
    for q in 0..n {
        if m.accept.contains(&q) {
            la.accept.insert(pop(q));
            la.accept.extend((0..g).map(|a| top(q, a)));
        }
        if m.reject.contains(&q) {
            la.reject.insert(pop(q));
            la.reject.extend((0..g).map(|a| top(q, a)));
        }
    }
    la.initial = top(m.initial, BOTTOM);
    for a in &m.input {
        la.symbol(a, 0);
    }
    let cell: Vec<_> = m.stack.iter().map(|a| la.push_symbol(format!("<{a}>"), 1)).collect();
    let b1 = la.push_symbol("B1".into(), 1);
    let b = la.set_blank("B");
    let one = Rational::one();

    let lambda_weight = |q: StateId, a: usize| m.weight(q, PdaRead::Lambda, a);
    let has_reads = |q: StateId, a: usize| {
        m.rules.iter().any(|r| r.from == q && r.top == a && r.read != PdaRead::Lambda && !r.prob.is_zero())
    };
    // weight of giving up the λ-moves at (q, a), by which read moves are divided
    let turn = |q: StateId, a: usize| -> Rational {
        if nondet {
            if has_reads(q, a) {
                one.clone()
            } else {
                Rational::zero()
            }
        } else {
            &one - lambda_weight(q, a)
        }
    };

    for q in 0..n {
        if m.is_halting(q) {
            continue;
        }
        la.add_rule(pop(q), b, pop(q), b, Dir::Left, one.clone());
        la.add_rule(pop(q), b1, pop(q), b, Dir::Left, one.clone());
        la.add_rule(pop(q), LEFT_END, top(q, BOTTOM), LEFT_END, Dir::Right, one.clone());
        for (a, &c) in cell.iter().enumerate().take(g) {
            la.add_rule(top(q, a), b, top(q, a), b, Dir::Right, one.clone());
            let t = turn(q, a);
            if !t.is_zero() {
                la.add_rule(pop(q), c, top(q, a), b, Dir::Right, t);
            }
        }
    }
    for r in m.rules.iter().filter(|r| !r.prob.is_zero()) {
        let (q, a) = (r.from, r.top);
        match r.read {
            PdaRead::Lambda => {
                if a != BOTTOM {
                    la.add_rule(pop(q), cell[a], pop(r.to), b, Dir::Left, r.prob.clone());
                }
            }
            PdaRead::Left => {
                if q != m.initial {
                    continue;
                }
                let to = match r.push.as_slice() {
                    [x] if *x == BOTTOM => top(r.to, BOTTOM),
                    [x, y] if *y == BOTTOM => top(r.to, *x),
                    _ => continue,
                };
                la.add_rule(top(q, BOTTOM), LEFT_END, to, LEFT_END, Dir::Right, r.prob.clone());
            }
            PdaRead::Sym(i) => {
                let t = turn(q, a);
                if t.is_zero() {
                    continue;
                }
                let w = &r.prob / t;
                let sigma = la.levels[0][i];
                match r.push.as_slice() {
                    [] => la.add_rule(top(q, a), sigma, pop(r.to), b, Dir::Left, w),
                    [x] => la.add_rule(top(q, a), sigma, top(r.to, *x), b1, Dir::Right, w),
                    [x, _] => la.add_rule(top(q, a), sigma, top(r.to, *x), cell[a], Dir::Right, w),
                    _ => unreachable!("ideal shape"),
                }
            }
            PdaRead::Right => {
                let t = turn(q, a);
                if t.is_zero() {
                    continue;
                }
                let w = &r.prob / t;
                la.add_rule(top(q, a), RIGHT_END, pop(r.to), RIGHT_END, Dir::Left, w);
            }
        }
    }
    Ok(la)
}
