use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use serde_json::json;

use limaut::decomposition::{
    evaluate_transducer, first_traverse_transducer, lfm_membership, multiset_size, residual_machine, reverse_multiset,
};
use limaut::format::{digest, to_json, MachineFile, Provenance};
use limaut::fuzz::{self, FuzzConfig, Mutation, Outcome, Pipeline};
use limaut::machine::{condition_ids, is_blank_skipping, LimitedAutomaton, Machine};
use limaut::rational::{fmt_rational, half, parse_rational, zero};
use limaut::semantics::{
    accepting_paths, decide_language_upto, enumerate_paths_oracle, evaluate, margin_violation, parse_word, verdict,
    word_string, words_upto, Mode, PathCount, Verdict,
};
use limaut::transforms as tf;
use limaut::zoo::{self, Determinism};
use limaut::Rational;

use crate::report::{doc, emit, seal, show_word, table};
use crate::{load, Check, Cli, Cmd, Failure, Kind, Transform, ZooAction};

type Res = Result<ExitCode, Failure>;

pub fn run(cli: &Cli) -> Res {
    let started = Instant::now();
    match &cli.cmd {
        Cmd::Validate { machine } => validate(cli, machine),
        Cmd::Prob { machine, input, upto, mode, oracle } => {
            prob(cli, machine, input.as_deref(), *upto, mode, *oracle, started)
        }
        Cmd::Convert { machine, transform, epsilon, gap, with, dfa, output } => convert(
            cli,
            machine,
            *transform,
            Params { epsilon: epsilon.as_deref(), gap: gap.as_deref(), with, dfa: dfa.as_deref() },
            output.as_deref(),
        ),
        Cmd::Equiv { a, b, upto, check, mode } => equiv(cli, a, b, *upto, *check, mode),
        Cmd::Fuzz { pipeline, seeds, from, upto, kind, states, letters, work, mutate } => {
            let Some(p) = Pipeline::parse(pipeline) else {
                let names: Vec<_> = Pipeline::ALL.iter().map(|p| p.name()).collect();
                return Err(Failure::Input(format!("unknown pipeline {pipeline:?}; one of {}", names.join(", "))));
            };
            let mut cfg = FuzzConfig::new(p, *upto);
            cfg.states = *states;
            cfg.input = *letters;
            cfg.work = *work;
            cfg.caps = cli.caps();
            cfg.mutation = mutate.then_some(Mutation::SwapVerdicts);
            cfg.determinism = match kind {
                Kind::Mixed => None,
                Kind::Det => Some(Determinism::Det),
                Kind::Nondet => Some(Determinism::Nondet),
                Kind::Prob => Some(Determinism::Prob),
            };
            fuzz_cmd(cli, &cfg, *from, *seeds, *kind)
        }
        Cmd::Decompose { machine, input, upto, emit } => {
            decompose(cli, machine, input.as_deref(), *upto, emit.as_deref())
        }
        Cmd::Zoo { action } => zoo_cmd(cli, action),
    }
}

fn rational(name: &str, s: &str) -> Result<Rational, Failure> {
    parse_rational(s).map_err(|e| Failure::Input(format!("--{name}: {e}")))
}

/// Reads `--mode`; `auto` picks the zoo mode for zoo machines and otherwise
/// goes by the weights.
fn mode_for(spec: &str, m: &Machine) -> Result<Mode, Failure> {
    let bad = || Failure::Input(format!("unknown mode {spec:?}"));
    Ok(match spec {
        "exact" => Mode::Exact,
        "nondet" => Mode::Nondet,
        "auto" => {
            let d = digest(&MachineFile::from(m.clone()));
            if let Some(e) = zoo::entries().into_iter().find(|e| digest(&MachineFile::from((e.build)())) == d) {
                e.mode
            } else {
                let c = m.classify();
                if c.nondeterministic && !c.deterministic {
                    Mode::Nondet
                } else {
                    Mode::Exact
                }
            }
        }
        s => match s.split_once(':') {
            Some(("one-sided", eps)) => Mode::OneSided(rational("mode", eps)?),
            Some(("bounded", eps)) => Mode::Bounded(rational("mode", eps)?),
            _ => return Err(bad()),
        },
    })
}

fn mode_name(m: &Mode) -> String {
    match m {
        Mode::Exact => "exact".into(),
        Mode::Nondet => "nondet".into(),
        Mode::OneSided(e) => format!("one-sided:{}", fmt_rational(e)),
        Mode::Bounded(e) => format!("bounded:{}", fmt_rational(e)),
    }
}

fn validate(cli: &Cli, arg: &str) -> Res {
    let (file, _) = load::file(arg)?;
    let problems: Vec<(String, String)> = match &file {
        MachineFile::Limited(_) | MachineFile::Pda(_) => {
            let m = file.clone().into_machine()?;
            m.validate().iter().map(|v| (v.condition.id().to_string(), v.to_string())).collect()
        }
        MachineFile::Dfa(d) => d.check().into_iter().map(|s| ("DFA".to_string(), s)).collect(),
        MachineFile::Transducer(t) => t.check().into_iter().map(|s| ("TRANSDUCER".to_string(), s)).collect(),
    };
    let mut ids: Vec<&str> = problems.iter().map(|p| p.0.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    let mut v = doc("validate");
    v["kind"] = json!(file.kind());
    v["digest"] = json!(digest(&file));
    v["valid"] = json!(problems.is_empty());
    v["conditions"] = json!(ids);
    v["violations"] = json!(problems.iter().map(|p| &p.1).collect::<Vec<_>>());
    let text = if problems.is_empty() {
        format!("{arg}: valid {}\n", file.kind())
    } else {
        problems.iter().map(|p| format!("{}\n", p.1)).collect::<String>()
            + &format!("{arg}: {} violation(s): {}\n", problems.len(), ids.join(", "))
    };
    emit(cli.format, &v, &text);
    Ok(if problems.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn inputs(m: &Machine, input: Option<&str>, upto: Option<usize>) -> Result<Vec<Vec<usize>>, Failure> {
    match (input, upto) {
        (Some(x), _) => Ok(vec![parse_word(&m.input_alphabet(), x).map_err(|e| Failure::Input(e.to_string()))?]),
        (None, Some(n)) => Ok(words_upto(m.input_alphabet().len(), n)),
        (None, None) => Err(Failure::Input("one of --input or --upto is required".into())),
    }
}

fn prob(cli: &Cli, arg: &str, input: Option<&str>, upto: Option<usize>, mode: &str, oracle: bool, started: Instant) -> Res {
    let m = load::machine(arg)?;
    let mode = mode_for(mode, &m)?;
    let alphabet = m.input_alphabet();
    let decisions = match (input, upto) {
        (None, Some(n)) => decide_language_upto(&m, n, &mode, cli.caps())?,
        _ => {
            let w = inputs(&m, input, upto)?.swap_remove(0);
            let report = evaluate(&m, &w, cli.caps())?;
            vec![limaut::semantics::Decision {
                verdict: verdict(&report, &mode),
                margin_violation: margin_violation(&report, &mode),
                word: w,
                report,
            }]
        }
    };
    let mut rows = Vec::new();
    let mut words = Vec::new();
    let mut violations = 0;
    for d in &decisions {
        let word = word_string(&alphabet, &d.word);
        let r = &d.report;
        let mut entry = json!({ "input": word, "report": r.to_json(), "verdict": d.verdict.as_str(), "margin_violation": d.margin_violation });
        let mut row = vec![
            show_word(&word),
            fmt_rational(&r.p_acc),
            fmt_rational(&r.p_rej),
            fmt_rational(&r.p_nonhalt),
            fmt_rational(&r.p_unresolved),
            r.expected_steps.as_ref().map_or("?".into(), |s| s.to_json().as_str().unwrap_or_default().to_string()),
            d.verdict.as_str().to_string() + if d.margin_violation { " (margin)" } else { "" },
        ];
        if oracle {
            let o = enumerate_paths_oracle(&m, &d.word, cli.step_cap);
            entry["oracle"] = json!({
                "p_acc": [fmt_rational(&o.p_acc), fmt_rational(&(&o.p_acc + &o.p_unresolved))],
                "p_rej": [fmt_rational(&o.p_rej), fmt_rational(&(&o.p_rej + &o.p_unresolved))],
            });
            row.push(format!("[{}, {}]", fmt_rational(&o.p_acc), fmt_rational(&(&o.p_acc + &o.p_unresolved))));
        }
        violations += d.margin_violation as usize;
        rows.push(row);
        words.push(entry);
    }
    let mut v = doc("prob");
    v["machine"] = json!(arg);
    v["digest"] = json!(digest(&MachineFile::from(m.clone())));
    v["mode"] = json!(mode_name(&mode));
    v["inputs"] = json!(words);
    v["margin_violations"] = json!(violations);
    let mut v = seal(v);
    v["wall_time_ms"] = json!(started.elapsed().as_millis() as u64);
    let mut header = vec!["input", "p_acc", "p_rej", "p_nonhalt", "p_unresolved", "E[steps]", "verdict"];
    if oracle {
        header.push("oracle p_acc");
    }
    emit(cli.format, &v, &table(&header, &rows));
    Ok(if violations > 0 { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

struct Params<'a> {
    epsilon: Option<&'a str>,
    gap: Option<&'a str>,
    with: &'a [String],
    dfa: Option<&'a str>,
}

fn need<'a>(o: Option<&'a str>, name: &str) -> Result<&'a str, Failure> {
    o.ok_or_else(|| Failure::Input(format!("--{name} is required")))
}

fn limited(m: &Machine, what: &str) -> Result<LimitedAutomaton, Failure> {
    match m {
        Machine::Limited(x) => Ok(x.clone()),
        Machine::Pda(_) => Err(Failure::Input(format!("{what} takes a limited automaton"))),
    }
}

fn convert(cli: &Cli, arg: &str, t: Transform, p: Params, output: Option<&Path>) -> Res {
    let (source, _) = load::file(arg)?;
    let m = source.clone().into_machine().map_err(|e| Failure::Input(e.to_string()))?;
    let one_other = || -> Result<Machine, Failure> {
        match p.with {
            [b] => load::machine(b),
            _ => Err(Failure::Input("exactly one --with machine is required".into())),
        }
    };
    let eps = || p.epsilon.map_or(Ok(zero()), |e| rational("epsilon", e));
    let name = format!("{t:?}");
    let mut params = json!({});
    let out: Machine = match t {
        Transform::BlankSkip => tf::to_blank_skipping(&limited(&m, "blank-skip")?)?.into(),
        Transform::BlankSkipRecognition => tf::to_blank_skipping_recognition(&limited(&m, "blank-skip")?)?.into(),
        Transform::Lpa2ToPpda => Machine::Pda(tf::lpa2_to_1ppda(&limited(&m, "lpa2-to-ppda")?)?),
        Transform::PpdaToLpa2 => match &m {
            Machine::Pda(x) => tf::ppda_to_lpa2(x)?.into(),
            Machine::Limited(_) => return Err(Failure::Input("ppda-to-lpa2 takes a pda".into())),
        },
        Transform::Amplify => {
            let e = rational("epsilon", need(p.epsilon, "epsilon")?)?;
            let g = rational("gap", need(p.gap, "gap")?)?;
            let out = tf::amplify_one_sided(&m, &e, &g)?;
            params = json!({"epsilon": fmt_rational(&e), "gap": fmt_rational(&g), "alpha": fmt_rational(&tf::amplify_alpha(&e, &g))});
            out
        }
        Transform::Complement => tf::complement_swap(&m),
        Transform::UnionOneSided => {
            if p.with.is_empty() {
                return Err(Failure::Input("--with is required".into()));
            }
            let mut all = vec![m.clone()];
            for b in p.with {
                all.push(load::machine(b)?);
            }
            params = json!({"with": all[1..].iter().map(|x| digest(&MachineFile::from(x.clone()))).collect::<Vec<_>>()});
            tf::union_one_sided(&all)?
        }
        Transform::BoundedOr | Transform::BoundedAnd => {
            let b = one_other()?;
            let e = eps()?;
            params = json!({"epsilon": fmt_rational(&e), "with": digest(&MachineFile::from(b.clone()))});
            if t == Transform::BoundedOr {
                tf::bounded_or(&m, &b, &e)?
            } else {
                tf::bounded_and(&m, &b, &e)?
            }
        }
        Transform::IntersectRegular | Transform::UnionRegular => {
            let d = load::dfa(need(p.dfa, "dfa")?)?;
            params = json!({"dfa": digest(&MachineFile::Dfa(d.clone()))});
            let la = limited(&m, "the regular products")?;
            if t == Transform::IntersectRegular {
                tf::intersect_regular(&la, &d)?.into()
            } else {
                tf::union_regular(&la, &d)?.into()
            }
        }
        Transform::AnnotateDirections => tf::annotate_directions(&limited(&m, "annotate-directions")?).into(),
    };
    let problems = out.validate();
    if !problems.is_empty() {
        let ids = condition_ids(&problems);
        return Err(Failure::Domain(format!("{name} produced an invalid machine: {}", ids.join(", "))));
    }
    let file = MachineFile::from(out);
    let transform = transform_name(t);
    let prov = Provenance::new(transform, &source, params);
    let text = to_json(&file, Some(&prov));
    match output {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            let mut v = doc("convert");
            v["transform"] = json!(transform);
            v["source_digest"] = json!(prov.source_digest);
            v["digest"] = json!(digest(&file));
            v["output"] = json!(path.display().to_string());
            v["parameters"] = prov.parameters.clone();
            let blank = match &file {
                MachineFile::Limited(x) => format!(", blank-skipping: {}", is_blank_skipping(x).holds()),
                _ => String::new(),
            };
            let states = file.clone().into_machine().map(|m| m.num_states()).unwrap_or(0);
            emit(cli.format, &v, &format!("{transform}: wrote {} ({} {states} states{blank})\n", path.display(), file.kind()));
        }
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn transform_name(t: Transform) -> &'static str {
    match t {
        Transform::BlankSkip => "blank-skip",
        Transform::BlankSkipRecognition => "blank-skip-recognition",
        Transform::Lpa2ToPpda => "lpa2-to-ppda",
        Transform::PpdaToLpa2 => "ppda-to-lpa2",
        Transform::Amplify => "amplify",
        Transform::Complement => "complement",
        Transform::UnionOneSided => "union-one-sided",
        Transform::BoundedOr => "bounded-or",
        Transform::BoundedAnd => "bounded-and",
        Transform::IntersectRegular => "intersect-regular",
        Transform::UnionRegular => "union-regular",
        Transform::AnnotateDirections => "annotate-directions",
    }
}

fn paths(m: &Machine, w: &[usize], cli: &Cli) -> Result<String, Failure> {
    Ok(match accepting_paths(m, w, cli.caps())? {
        PathCount::Finite(n) => n.to_string(),
        PathCount::Infinite => "inf".into(),
    })
}

fn equiv(cli: &Cli, a: &str, b: &str, upto: usize, check: Check, mode: &str) -> Res {
    let (ma, mb) = (load::machine(a)?, load::machine(b)?);
    let alphabet = ma.input_alphabet();
    if mb.input_alphabet() != alphabet {
        return Err(Failure::Input(format!("{a} and {b} have different input alphabets")));
    }
    let (mode_a, mode_b) = (mode_for(mode, &ma)?, mode_for(mode, &mb)?);
    let mut mismatch = None;
    let words = words_upto(alphabet.len(), upto);
    for w in &words {
        let (ra, rb) = (evaluate(&ma, w, cli.caps())?, evaluate(&mb, w, cli.caps())?);
        let (x, y) = match check {
            Check::Verdicts => (verdict(&ra, &mode_a).as_str().to_string(), verdict(&rb, &mode_b).as_str().to_string()),
            Check::Probs => (
                format!("({}, {})", fmt_rational(&ra.p_acc), fmt_rational(&ra.p_rej)),
                format!("({}, {})", fmt_rational(&rb.p_acc), fmt_rational(&rb.p_rej)),
            ),
            Check::Paths => (paths(&ma, w, cli)?, paths(&mb, w, cli)?),
        };
        if x != y || (check == Check::Probs && (ra.p_unresolved != zero() || rb.p_unresolved != zero())) {
            mismatch = Some((word_string(&alphabet, w), x, y));
            break;
        }
    }
    let mut v = doc("equiv");
    v["a"] = json!({"machine": a, "digest": digest(&MachineFile::from(ma.clone()))});
    v["b"] = json!({"machine": b, "digest": digest(&MachineFile::from(mb.clone()))});
    v["check"] = json!(format!("{check:?}").to_lowercase());
    v["upto"] = json!(upto);
    v["equivalent"] = json!(mismatch.is_none());
    let text = match &mismatch {
        None => format!("equivalent on all {} words up to length {upto}\n", words.len()),
        Some((w, x, y)) => {
            v["counterexample"] = json!({"input": w, "a": x, "b": y});
            format!("mismatch at {}: {x} vs {y}\n", show_word(w))
        }
    };
    emit(cli.format, &seal(v), &text);
    Ok(if mismatch.is_none() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn fuzz_cmd(cli: &Cli, cfg: &FuzzConfig, from: u64, count: u64, kind: Kind) -> Res {
    let seeds: Vec<u64> = (from..from.saturating_add(count)).collect();
    let reports = fuzz::run(cfg, &seeds)?;
    let (mut pass, mut verdicts_only, mut skipped) = (0, 0, 0);
    let mut first = None;
    let mut entries = Vec::new();
    for r in &reports {
        let e = match &r.outcome {
            Outcome::Pass => {
                pass += 1;
                json!({"seed": r.seed, "outcome": "pass"})
            }
            Outcome::PassVerdicts => {
                verdicts_only += 1;
                json!({"seed": r.seed, "outcome": "pass-verdicts"})
            }
            Outcome::Skipped(code) => {
                skipped += 1;
                json!({"seed": r.seed, "outcome": "skipped", "code": code})
            }
            Outcome::Counterexample { word, detail } => {
                first.get_or_insert((r.seed, word.clone(), detail.clone()));
                json!({"seed": r.seed, "outcome": "counterexample", "input": word, "detail": detail})
            }
        };
        entries.push(e);
    }
    let failed = reports.len() - pass - verdicts_only - skipped;
    let mut v = doc("fuzz");
    v["pipeline"] = json!(cfg.pipeline.name());
    v["kind"] = json!(format!("{kind:?}").to_lowercase());
    v["upto"] = json!(cfg.upto);
    v["seeds"] = json!(entries);
    v["tally"] = json!({"pass": pass, "pass_verdicts": verdicts_only, "skipped": skipped, "counterexamples": failed});
    let mut text = format!(
        "{}: {} seeds, {pass} pass, {verdicts_only} verdicts only, {skipped} skipped, {failed} counterexample(s)\n",
        cfg.pipeline.name(),
        reports.len()
    );
    if let Some((seed, w, d)) = &first {
        text += &format!("first counterexample: seed {seed}, input {}: {d}\n", show_word(w));
    }
    let v = seal(v);
    text += &format!("report digest {}\n", v["report_digest"].as_str().unwrap_or_default());
    emit(cli.format, &v, &text);
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn decompose(cli: &Cli, arg: &str, input: Option<&str>, upto: Option<usize>, out_dir: Option<&Path>) -> Res {
    let (source, _) = load::file(arg)?;
    let m = source.clone().into_machine().map_err(|e| Failure::Input(e.to_string()))?;
    let la = limited(&m, "decompose")?;
    let t = first_traverse_transducer(&la)?;
    let n = residual_machine(&la)?;
    if let Some(dir) = out_dir {
        let io = |e: std::io::Error| Failure::Input(format!("{}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        let tf = MachineFile::Transducer(t.clone());
        let nf = MachineFile::Limited(n.clone());
        std::fs::write(dir.join("transducer.json"), to_json(&tf, Some(&Provenance::new("decompose-transducer", &source, json!({}))))).map_err(io)?;
        std::fs::write(dir.join("residual.json"), to_json(&nf, Some(&Provenance::new("decompose-residual", &source, json!({}))))).map_err(io)?;
    }
    let class = m.classify();
    let (mode, threshold) = if class.deterministic || !class.nondeterministic { (Mode::Exact, half()) } else { (Mode::Nondet, zero()) };
    let residual = Machine::Limited(n.clone());
    let alphabet = m.input_alphabet();
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut disagreements = 0;
    for w in inputs(&m, input, upto)? {
        let direct = verdict(&evaluate(&m, &w, cli.caps())?, &mode) == Verdict::Accept;
        let outs = reverse_multiset(&evaluate_transducer(&t, &w));
        let via = match lfm_membership(&outs, &residual, &threshold, cli.caps()) {
            Ok(b) => b,
            Err(limaut::Error::EmptyOutput) => false,
            Err(e) => return Err(e.into()),
        };
        disagreements += (direct != via) as usize;
        let word = word_string(&alphabet, &w);
        entries.push(json!({"input": word, "machine": direct, "decomposition": via, "outputs": multiset_size(&outs).to_string()}));
        rows.push(vec![show_word(&word), direct.to_string(), via.to_string(), multiset_size(&outs).to_string()]);
    }
    let mut v = doc("decompose");
    v["machine"] = json!(arg);
    v["digest"] = json!(digest(&source));
    v["transducer_states"] = json!(t.states.len());
    v["residual"] = json!({"k": n.k, "states": n.states.len(), "digest": digest(&MachineFile::Limited(n.clone()))});
    v["inputs"] = json!(entries);
    v["disagreements"] = json!(disagreements);
    let mut text = format!("transducer: {} states; residual: k = {}, {} states\n", t.states.len(), n.k, n.states.len());
    text += &table(&["input", "machine", "decomposition", "outputs"], &rows);
    emit(cli.format, &seal(v), &text);
    Ok(if disagreements == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn zoo_cmd(cli: &Cli, action: &ZooAction) -> Res {
    match action {
        ZooAction::List => {
            let mut rows = Vec::new();
            let mut list = Vec::new();
            for e in zoo::entries() {
                let m = (e.build)();
                let kind = match &m {
                    Machine::Limited(x) => format!("{}-limited", x.k),
                    Machine::Pda(_) => "pda".into(),
                };
                let f = MachineFile::from(m.clone());
                list.push(json!({"name": e.name, "kind": kind, "states": m.num_states(), "language": e.oracle.name, "mode": mode_name(&e.mode), "digest": digest(&f)}));
                rows.push(vec![e.name.into(), kind, m.num_states().to_string(), e.oracle.name.into(), mode_name(&e.mode)]);
            }
            for d in load::BUILTIN_DFAS {
                rows.push(vec![d.into(), "dfa".into(), String::new(), String::new(), String::new()]);
            }
            let mut v = doc("zoo list");
            v["machines"] = json!(list);
            v["dfas"] = json!(load::BUILTIN_DFAS);
            emit(cli.format, &v, &table(&["name", "kind", "states", "language", "mode"], &rows));
        }
        ZooAction::Show { name } => {
            let (f, _) = load::file(name)?;
            print!("{}", to_json(&f, None));
        }
        ZooAction::Write { dir } => {
            zoo::write_zoo(dir)?;
            let v = json!({"schema": "1", "command": "zoo write", "dir": dir.display().to_string(), "digests": zoo::digests_text()});
            emit(cli.format, &v, &format!("wrote {} machines to {}\n", zoo::entries().len(), dir.display()));
        }
    }
    Ok(ExitCode::SUCCESS)
}
