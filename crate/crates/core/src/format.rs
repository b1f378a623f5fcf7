//! JSON machine files.
//!
//! Every file is one object with a `kind` field. Rationals are `"p/q"`
//! strings, directions are `1` / `-1`, and unknown names are parse errors.
//! Structural problems that the format can express (bad weights, level
//! clashes) are left to the validators.

use std::collections::{BTreeSet, HashMap};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::decomposition::{RtTransducer, TRead, TRule};
use crate::error::{Error, Result};
use crate::machine::{Dfa, Dir, LimitedAutomaton, Machine, PdaRule, PushdownAutomaton, LEFT_END, RIGHT_END};
use crate::rational::{fmt_rational, parse_rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MachineFile {
    Limited(LimitedAutomaton),
    Pda(PushdownAutomaton),
    Dfa(Dfa),
    Transducer(RtTransducer),
}

impl MachineFile {
    pub fn kind(&self) -> &'static str {
        match self {
            MachineFile::Limited(_) => "limited",
            MachineFile::Pda(_) => "pda",
            MachineFile::Dfa(_) => "dfa",
            MachineFile::Transducer(_) => "transducer",
        }
    }

    pub fn into_machine(self) -> Result<Machine> {
        match self {
            MachineFile::Limited(m) => Ok(Machine::Limited(m)),
            MachineFile::Pda(m) => Ok(Machine::Pda(m)),
            other => Err(Error::NotSupported(format!("a {} file is not an automaton with semantics", other.kind()))),
        }
    }
}

impl From<Machine> for MachineFile {
    fn from(m: Machine) -> Self {
        match m {
            Machine::Limited(m) => MachineFile::Limited(m),
            Machine::Pda(m) => MachineFile::Pda(m),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub transform: String,
    pub source_digest: String,
    pub parameters: Value,
}

impl Provenance {
    pub fn new(transform: &str, source: &MachineFile, parameters: Value) -> Self {
        Provenance { transform: transform.into(), source_digest: digest(source), parameters }
    }

    fn to_json(&self) -> Value {
        json!({"transform": self.transform, "source_digest": self.source_digest, "parameters": self.parameters})
    }
}

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

// ---------------------------------------------------------------------------
// reading

struct Obj<'a>(&'a Map<String, Value>, &'static str);

impl<'a> Obj<'a> {
    fn get(&self, key: &str) -> Result<&'a Value> {
        self.0.get(key).ok_or_else(|| perr(format!("{}: missing field {key:?}", self.1)))
    }

    fn str(&self, key: &str) -> Result<&'a str> {
        self.get(key)?.as_str().ok_or_else(|| perr(format!("{}: field {key:?} must be a string", self.1)))
    }

    fn strs(&self, key: &str) -> Result<Vec<String>> {
        str_list(self.get(key)?, key)
    }

    fn opt_strs(&self, key: &str) -> Result<Vec<String>> {
        match self.0.get(key) {
            None | Some(Value::Null) => Ok(Vec::new()),
            Some(v) => str_list(v, key),
        }
    }

    fn obj(&self, key: &str) -> Result<Obj<'a>> {
        let v = self.get(key)?;
        v.as_object().map(|o| Obj(o, self.1)).ok_or_else(|| perr(format!("field {key:?} must be an object")))
    }

    fn list(&self, key: &str) -> Result<Vec<Obj<'a>>> {
        let v = self.get(key)?;
        let a = v.as_array().ok_or_else(|| perr(format!("field {key:?} must be a list")))?;
        a.iter()
            .map(|x| x.as_object().map(|o| Obj(o, "transition")).ok_or_else(|| perr("transitions must be objects")))
            .collect()
    }

    fn flag(&self, key: &str) -> Result<bool> {
        match self.0.get(key) {
            None | Some(Value::Null) => Ok(false),
            Some(Value::Bool(b)) => Ok(*b),
            Some(_) => Err(perr(format!("field {key:?} must be a boolean"))),
        }
    }
}

fn str_list(v: &Value, key: &str) -> Result<Vec<String>> {
    let a = v.as_array().ok_or_else(|| perr(format!("field {key:?} must be a list of strings")))?;
    a.iter()
        .map(|x| x.as_str().map(str::to_string).ok_or_else(|| perr(format!("field {key:?} must be a list of strings"))))
        .collect()
}

fn index_of(names: &[String], what: &str) -> Result<HashMap<String, usize>> {
    let mut m = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if m.insert(n.clone(), i).is_some() {
            return Err(perr(format!("duplicate {what} {n:?}")));
        }
    }
    Ok(m)
}

fn lookup(map: &HashMap<String, usize>, name: &str, what: &str) -> Result<usize> {
    map.get(name).copied().ok_or_else(|| perr(format!("unknown {what} {name:?}")))
}

fn state_set(map: &HashMap<String, usize>, names: &[String]) -> Result<BTreeSet<usize>> {
    names.iter().map(|n| lookup(map, n, "state")).collect()
}

fn check_reserved(names: &[String]) -> Result<()> {
    match names.iter().find(|n| *n == "|c" || *n == "$" || *n == "λ" || n.is_empty()) {
        Some(n) => Err(perr(format!("reserved name {n:?} in an alphabet"))),
        None => Ok(()),
    }
}

fn parse_dir(v: &Value) -> Result<Dir> {
    let d = match v {
        Value::Number(n) => n.as_i64(),
        Value::String(s) => s.trim_start_matches('+').parse::<i64>().ok(),
        _ => None,
    };
    d.and_then(Dir::from_delta).ok_or_else(|| perr(format!("direction must be 1 or -1, found {v}")))
}

fn parse_prob(t: &Obj) -> Result<crate::Rational> {
    match t.0.get("prob") {
        None => Ok(crate::rational::one()),
        Some(Value::String(s)) => parse_rational(s),
        Some(v) => Err(perr(format!("prob must be a \"p/q\" string, found {v}"))),
    }
}

pub fn parse_machine_file(text: &str) -> Result<(MachineFile, Option<Provenance>)> {
    let v: Value = serde_json::from_str(text).map_err(|e| perr(format!("invalid JSON: {e}")))?;
    parse_machine_value(&v)
}

pub fn parse_machine_value(v: &Value) -> Result<(MachineFile, Option<Provenance>)> {
    let o = Obj(v.as_object().ok_or_else(|| perr("top level must be an object"))?, "machine");
    let file = match o.str("kind")? {
        "limited" => MachineFile::Limited(parse_limited(&o)?),
        "pda" => MachineFile::Pda(parse_pda(&o)?),
        "dfa" => MachineFile::Dfa(parse_dfa(&o)?),
        "transducer" => MachineFile::Transducer(parse_transducer(&o)?),
        other => return Err(perr(format!("unknown kind {other:?}"))),
    };
    let prov = match o.0.get("provenance") {
        None | Some(Value::Null) => None,
        Some(p) => {
            let p = Obj(p.as_object().ok_or_else(|| perr("provenance must be an object"))?, "provenance");
            Some(Provenance {
                transform: p.str("transform")?.to_string(),
                source_digest: p.str("source_digest")?.to_string(),
                parameters: p.0.get("parameters").cloned().unwrap_or(Value::Null),
            })
        }
    };
    Ok((file, prov))
}

fn parse_limited(o: &Obj) -> Result<LimitedAutomaton> {
    let k = o.get("k")?.as_u64().filter(|&k| k >= 1).ok_or_else(|| perr("k must be a positive integer"))? as usize;
    let mut m = LimitedAutomaton::new(k);
    m.states = o.strs("states")?;
    let qs = index_of(&m.states, "state")?;
    m.initial = lookup(&qs, o.str("initial")?, "state")?;
    m.accept = state_set(&qs, &o.strs("accept")?)?;
    m.reject = state_set(&qs, &o.opt_strs("reject")?)?;
    m.claims_unambiguous = o.flag("unambiguous")?;

    let a = o.obj("alphabet")?;
    let input = a.strs("input")?;
    check_reserved(&input)?;
    let levels = a.get("levels")?.as_array().ok_or_else(|| perr("levels must be a list of lists"))?;
    if levels.len() != k {
        return Err(perr(format!("expected {k} level lists (levels 1..k), found {}", levels.len())));
    }
    for name in input {
        m.symbol(&name, 0);
    }
    for (i, lv) in levels.iter().enumerate() {
        for name in str_list(lv, "levels")? {
            match m.sym_id(&name) {
                Some(id) => m.levels[i + 1].push(id),
                None => {
                    m.push_symbol(name, i + 1);
                }
            }
        }
    }
    if let Some(b) = a.0.get("blank").and_then(Value::as_str) {
        let id = m.sym_id(b).ok_or_else(|| perr(format!("blank {b:?} is not declared in any level")))?;
        m.blank = Some(id);
    }
    for t in o.list("transitions")? {
        let from = lookup(&qs, t.str("from")?, "state")?;
        let to = lookup(&qs, t.str("to")?, "state")?;
        let read = m.sym_id(t.str("read")?).ok_or_else(|| perr(format!("unknown symbol {:?}", t.str("read").unwrap())))?;
        let write =
            m.sym_id(t.str("write")?).ok_or_else(|| perr(format!("unknown symbol {:?}", t.str("write").unwrap())))?;
        let dir = parse_dir(t.get("dir")?)?;
        let prob = parse_prob(&t)?;
        m.add_rule(from, read, to, write, dir, prob);
    }
    Ok(m)
}

fn parse_pda(o: &Obj) -> Result<PushdownAutomaton> {
    let a = o.obj("alphabet")?;
    let input = a.strs("input")?;
    check_reserved(&input)?;
    let refs: Vec<&str> = input.iter().map(String::as_str).collect();
    let e = o.get("push_size")?.as_u64().ok_or_else(|| perr("push_size must be a non-negative integer"))? as usize;
    let mut m = PushdownAutomaton::new(&refs, e);
    if let Some(b) = a.0.get("bottom").and_then(Value::as_str) {
        m.stack[0] = b.to_string();
    }
    for s in a.strs("stack")? {
        if s == m.stack[0] {
            continue;
        }
        if m.stack_id(&s).is_some() {
            return Err(perr(format!("duplicate stack symbol {s:?}")));
        }
        m.stack.push(s);
    }
    m.states = o.strs("states")?;
    let qs = index_of(&m.states, "state")?;
    m.initial = lookup(&qs, o.str("initial")?, "state")?;
    m.accept = state_set(&qs, &o.strs("accept")?)?;
    m.reject = state_set(&qs, &o.opt_strs("reject")?)?;
    m.claims_unambiguous = o.flag("unambiguous")?;
    for t in o.list("transitions")? {
        let from = lookup(&qs, t.str("from")?, "state")?;
        let to = lookup(&qs, t.str("to")?, "state")?;
        let rname = t.str("read")?;
        let read = m.read_of(rname).ok_or_else(|| perr(format!("unknown input symbol {rname:?}")))?;
        let tname = t.str("top")?;
        let top = m.stack_id(tname).ok_or_else(|| perr(format!("unknown stack symbol {tname:?}")))?;
        let push = match t.get("push")? {
            Value::String(s) => m.parse_push(s).ok_or_else(|| perr(format!("cannot split push string {s:?}")))?,
            Value::Array(_) => {
                let names = str_list(t.get("push")?, "push")?;
                names
                    .iter()
                    .map(|n| m.stack_id(n).ok_or_else(|| perr(format!("unknown stack symbol {n:?}"))))
                    .collect::<Result<_>>()?
            }
            _ => return Err(perr("push must be a string or a list")),
        };
        let prob = parse_prob(&t)?;
        m.rules.push(PdaRule { from, read, top, to, push, prob });
    }
    Ok(m)
}

fn parse_dfa(o: &Obj) -> Result<Dfa> {
    let states = o.strs("states")?;
    let qs = index_of(&states, "state")?;
    let alphabet = o.obj("alphabet")?.strs("input")?;
    check_reserved(&alphabet)?;
    let syms = index_of(&alphabet, "symbol")?;
    let mut delta = vec![vec![usize::MAX; alphabet.len()]; states.len()];
    for t in o.list("transitions")? {
        let f = lookup(&qs, t.str("from")?, "state")?;
        let a = lookup(&syms, t.str("read")?, "symbol")?;
        let to = lookup(&qs, t.str("to")?, "state")?;
        if delta[f][a] != usize::MAX && delta[f][a] != to {
            return Err(perr(format!("two transitions from {:?} on {:?}", states[f], alphabet[a])));
        }
        delta[f][a] = to;
    }
    if delta.iter().flatten().any(|&t| t == usize::MAX) {
        return Err(perr("dfa transition map is not total"));
    }
    Ok(Dfa {
        alphabet,
        delta,
        start: lookup(&qs, o.str("initial")?, "state")?,
        accept: state_set(&qs, &o.strs("accept")?)?,
    })
}

fn parse_transducer(o: &Obj) -> Result<RtTransducer> {
    let states = o.strs("states")?;
    let qs = index_of(&states, "state")?;
    let a = o.obj("alphabet")?;
    let input = a.strs("input")?;
    let output = a.strs("output")?;
    check_reserved(&input)?;
    let ins = index_of(&input, "input symbol")?;
    let outs = index_of(&output, "output symbol")?;
    let accept = match o.strs("accept")?.as_slice() {
        [one] => lookup(&qs, one, "state")?,
        _ => return Err(perr("a transducer has exactly one accepting state")),
    };
    let mut rules = Vec::new();
    for t in o.list("transitions")? {
        let read = match t.str("read")? {
            "|c" => TRead::Left,
            "$" => TRead::Right,
            s => TRead::Sym(lookup(&ins, s, "input symbol")?),
        };
        let write = match t.0.get("write") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(lookup(&outs, s, "output symbol")?),
            Some(_) => return Err(perr("write must be a string or null")),
        };
        rules.push(TRule {
            from: lookup(&qs, t.str("from")?, "state")?,
            read,
            to: lookup(&qs, t.str("to")?, "state")?,
            write,
        });
    }
    Ok(RtTransducer { states, input, output, initial: lookup(&qs, o.str("initial")?, "state")?, accept, rules })
}

// ---------------------------------------------------------------------------
// writing

fn names(all: &[String], ids: impl IntoIterator<Item = usize>) -> Vec<String> {
    ids.into_iter().map(|i| all[i].clone()).collect()
}

fn limited_json(m: &LimitedAutomaton) -> Value {
    let levels: Vec<Vec<String>> = m.levels[1..]
        .iter()
        .map(|l| l.iter().filter(|&&s| s != LEFT_END && s != RIGHT_END).map(|&s| m.symbols[s].clone()).collect())
        .collect();
    let transitions: Vec<Value> = m
        .rules
        .iter()
        .map(|r| {
            json!({
                "from": m.states[r.from], "read": m.symbols[r.read], "to": m.states[r.to],
                "write": m.symbols[r.write], "dir": r.dir.delta(), "prob": fmt_rational(&r.prob),
            })
        })
        .collect();
    let mut v = json!({
        "kind": "limited",
        "k": m.k,
        "states": m.states,
        "initial": m.states[m.initial],
        "accept": names(&m.states, m.accept.iter().copied()),
        "reject": names(&m.states, m.reject.iter().copied()),
        "alphabet": {
            "input": m.input_alphabet(),
            "levels": levels,
            "blank": m.blank.map(|b| m.symbols[b].clone()),
        },
        "transitions": transitions,
    });
    if m.claims_unambiguous {
        v["unambiguous"] = json!(true);
    }
    v
}

fn pda_json(m: &PushdownAutomaton) -> Value {
    let transitions: Vec<Value> = m
        .rules
        .iter()
        .map(|r| {
            json!({
                "from": m.states[r.from], "read": m.read_name(r.read), "top": m.stack[r.top],
                "to": m.states[r.to], "push": names(&m.stack, r.push.iter().copied()), "prob": fmt_rational(&r.prob),
            })
        })
        .collect();
    let mut v = json!({
        "kind": "pda",
        "states": m.states,
        "initial": m.states[m.initial],
        "accept": names(&m.states, m.accept.iter().copied()),
        "reject": names(&m.states, m.reject.iter().copied()),
        "alphabet": {"input": m.input, "stack": m.stack[1..].to_vec(), "bottom": m.stack[0]},
        "push_size": m.push_size,
        "transitions": transitions,
    });
    if m.claims_unambiguous {
        v["unambiguous"] = json!(true);
    }
    v
}

fn dfa_json(d: &Dfa) -> Value {
    let states: Vec<String> = (0..d.num_states()).map(|i| format!("d{i}")).collect();
    let mut transitions = Vec::new();
    for (q, row) in d.delta.iter().enumerate() {
        for (a, &t) in row.iter().enumerate() {
            transitions.push(json!({"from": states[q], "read": d.alphabet[a], "to": states[t]}));
        }
    }
    json!({
        "kind": "dfa",
        "states": states,
        "initial": states[d.start],
        "accept": names(&states, d.accept.iter().copied()),
        "alphabet": {"input": d.alphabet},
        "transitions": transitions,
    })
}

fn transducer_json(t: &RtTransducer) -> Value {
    let transitions: Vec<Value> = t
        .rules
        .iter()
        .map(|r| {
            let read = match r.read {
                TRead::Left => "|c".to_string(),
                TRead::Right => "$".to_string(),
                TRead::Sym(a) => t.input[a].clone(),
            };
            json!({
                "from": t.states[r.from], "read": read, "to": t.states[r.to],
                "write": r.write.map(|b| t.output[b].clone()),
            })
        })
        .collect();
    json!({
        "kind": "transducer",
        "states": t.states,
        "initial": t.states[t.initial],
        "accept": [t.states[t.accept]],
        "alphabet": {"input": t.input, "output": t.output},
        "transitions": transitions,
    })
}

pub fn machine_value(f: &MachineFile) -> Value {
    match f {
        MachineFile::Limited(m) => limited_json(m),
        MachineFile::Pda(m) => pda_json(m),
        MachineFile::Dfa(d) => dfa_json(d),
        MachineFile::Transducer(t) => transducer_json(t),
    }
}

pub fn to_json(f: &MachineFile, provenance: Option<&Provenance>) -> String {
    let mut v = machine_value(f);
    if let Some(p) = provenance {
        v["provenance"] = p.to_json();
    }
    serde_json::to_string_pretty(&v).expect("serializable") + "\n"
}

/// SHA-256 over the compact, key-sorted JSON of the machine without provenance.
pub fn digest(f: &MachineFile) -> String {
    let canon = serde_json::to_string(&machine_value(f)).expect("serializable");
    hex::encode(Sha256::digest(canon.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::one;

    #[test]
    fn limited_round_trip() {
        let mut m = LimitedAutomaton::new(2);
        m.symbol("a", 0);
        m.symbol("x", 1);
        m.set_blank("B");
        m.state("q");
        m.state("acc");
        m.accept.insert(1);
        m.rule("q", "|c", "q", "|c", Dir::Right, one());
        m.rule("q", "a", "q", "x", Dir::Right, one());
        m.rule("q", "$", "acc", "$", Dir::Left, one());
        let f = MachineFile::Limited(m);
        let text = to_json(&f, None);
        let (back, prov) = parse_machine_file(&text).unwrap();
        assert!(prov.is_none());
        assert_eq!(back, f);
        assert_eq!(digest(&back), digest(&f));
    }

    #[test]
    fn bad_rational_is_a_parse_error() {
        let text = r#"{"kind":"limited","k":1,"states":["q"],"initial":"q","accept":[],
            "alphabet":{"input":["a"],"levels":[["x"]]},
            "transitions":[{"from":"q","read":"a","to":"q","write":"x","dir":1,"prob":"1/0"}]}"#;
        assert_eq!(parse_machine_file(text).unwrap_err().code(), "PARSE");
    }
}
