//! Seeded differential testing of the constructions.
//!
//! Each seed generates a machine, runs one pipeline on it and compares the
//! ends of the pipeline on every word up to a length bound. Words are tried
//! shortest first, so a reported counterexample is a shortest one.

use crate::decomposition::{evaluate_transducer, first_traverse_transducer, lfm_membership, residual_machine, reverse_multiset};
use crate::error::{Error, Result};
use crate::machine::{LimitedAutomaton, Machine, RIGHT_END};
use crate::rational::half;
use crate::semantics::{accepting_paths, evaluate, verdict, word_string, words_upto, Caps, Mode, Verdict};
use crate::transforms::{lpa2_to_1ppda, ppda_to_lpa2, to_blank_skipping, to_blank_skipping_recognition};
use crate::zoo::{random_machine, Determinism, Kind, RandomSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pipeline {
    /// 2-lda/2-lna against its blank-skipping form: verdicts and path counts.
    BlankSkip,
    /// Blank-skipping 2-limited machine against its one-way PDA: exact probabilities.
    Lpa2Roundtrip,
    /// Ideal-shape PDA through the 2-limited machine and back: exact probabilities.
    PpdaRoundtrip,
    /// Deterministic 3-lda against transducer plus residual machine.
    Decompose,
}

impl Pipeline {
    pub const ALL: [Pipeline; 4] =
        [Pipeline::BlankSkip, Pipeline::Lpa2Roundtrip, Pipeline::PpdaRoundtrip, Pipeline::Decompose];

    pub fn name(self) -> &'static str {
        match self {
            Pipeline::BlankSkip => "blank-skip",
            Pipeline::Lpa2Roundtrip => "lpa2-roundtrip",
            Pipeline::PpdaRoundtrip => "ppda-roundtrip",
            Pipeline::Decompose => "decompose",
        }
    }

    pub fn parse(s: &str) -> Option<Pipeline> {
        Pipeline::ALL.into_iter().find(|p| p.name() == s)
    }
}

/// Deliberate damage applied to a transform's output, for checking that the
/// harness notices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mutation {
    /// Swaps the accepting and rejecting states of the output.
    SwapVerdicts,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzConfig {
    pub pipeline: Pipeline,
    pub upto: usize,
    pub states: usize,
    pub input: usize,
    pub work: usize,
    pub mutation: Option<Mutation>,
    /// Overrides the per-seed choice made by [`FuzzConfig::spec`].
    pub determinism: Option<Determinism>,
    pub caps: Caps,
}

impl FuzzConfig {
    pub fn new(pipeline: Pipeline, upto: usize) -> Self {
        FuzzConfig { pipeline, upto, states: 3, input: 2, work: 1, mutation: None, determinism: None, caps: Caps::default() }
    }

    /// Machine generated for `seed`. Even seeds are deterministic; odd seeds
    /// are nondeterministic, or probabilistic for the PDA pipelines.
    pub fn spec(&self, seed: u64) -> RandomSpec {
        let odd = seed % 2 == 1;
        let (kind, k, determinism) = match self.pipeline {
            Pipeline::BlankSkip => (Kind::Limited, 2, if odd { Determinism::Nondet } else { Determinism::Det }),
            Pipeline::Lpa2Roundtrip => (Kind::BlankSkipping, 2, if odd { Determinism::Prob } else { Determinism::Det }),
            Pipeline::PpdaRoundtrip => (Kind::Pda, 2, if odd { Determinism::Prob } else { Determinism::Det }),
            Pipeline::Decompose => (Kind::Limited, 3, Determinism::Det),
        };
        let determinism = self.determinism.unwrap_or(determinism);
        // a varying number of states, at most `self.states`
        let states = 1 + (seed / 2) as usize % self.states.max(1);
        RandomSpec { kind, k, states, input: self.input, work: self.work, determinism, seed }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// Blank-skip only: path counts could not be kept, so the recognition
    /// form was built and only verdicts were compared.
    PassVerdicts,
    /// The transform refused the machine with this error code.
    Skipped(&'static str),
    Counterexample { word: String, detail: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedReport {
    pub seed: u64,
    pub outcome: Outcome,
}

fn mutate(m: &mut Machine, mutation: Option<Mutation>) {
    if mutation == Some(Mutation::SwapVerdicts) {
        match m {
            Machine::Limited(x) => std::mem::swap(&mut x.accept, &mut x.reject),
            Machine::Pda(x) => std::mem::swap(&mut x.accept, &mut x.reject),
        }
    }
}

/// Sends every halting move that does not read `$` to the first state instead.
fn halt_only_on_end(m: &mut LimitedAutomaton) {
    for r in &mut m.rules {
        if r.read != RIGHT_END && (m.accept.contains(&r.to) || m.reject.contains(&r.to)) {
            r.to = 0;
        }
    }
}

pub fn run_seed(cfg: &FuzzConfig, seed: u64) -> Result<SeedReport> {
    let spec = cfg.spec(seed);
    let mut source = random_machine(&spec)?;
    let mut paths = true;
    let produced = match (cfg.pipeline, &mut source) {
        (Pipeline::BlankSkip, Machine::Limited(m)) => match to_blank_skipping(m) {
            Err(Error::NotSupported(_) | Error::TooLarge(_)) => {
                paths = false;
                to_blank_skipping_recognition(m).map(|n| vec![Machine::Limited(n)])
            }
            r => r.map(|n| vec![Machine::Limited(n)]),
        },
        (Pipeline::Lpa2Roundtrip, Machine::Limited(m)) => lpa2_to_1ppda(m).map(|p| vec![Machine::Pda(p)]),
        (Pipeline::PpdaRoundtrip, Machine::Pda(p)) => ppda_to_lpa2(p)
            .and_then(|la| lpa2_to_1ppda(&la).map(|back| vec![Machine::Limited(la), Machine::Pda(back)])),
        (Pipeline::Decompose, Machine::Limited(m)) => {
            halt_only_on_end(m);
            return decompose_seed(cfg, seed, m);
        }
        _ => unreachable!("generator kind matches the pipeline"),
    };
    let mut produced = match produced {
        Ok(v) => v,
        Err(e @ (Error::NotSupported(_) | Error::TooLarge(_) | Error::NotNondet(_))) => {
            return Ok(SeedReport { seed, outcome: Outcome::Skipped(e.code()) })
        }
        Err(e) => return Err(e),
    };
    for p in &mut produced {
        mutate(p, cfg.mutation);
    }
    let sigma = source.input_alphabet();
    let nondet = source.classify().nondeterministic;
    for w in words_upto(sigma.len(), cfg.upto) {
        let a = evaluate(&source, &w, cfg.caps)?;
        for (i, p) in produced.iter().enumerate() {
            let b = evaluate(p, &w, cfg.caps)?;
            let detail = match cfg.pipeline {
                Pipeline::BlankSkip => {
                    let mode = if nondet { Mode::Nondet } else { Mode::Exact };
                    let (va, vb) = (verdict(&a, &mode), verdict(&b, &mode));
                    if va != vb {
                        Some(format!("verdict {} became {}", va.as_str(), vb.as_str()))
                    } else if !paths {
                        None
                    } else {
                        let (ca, cb) = (accepting_paths(&source, &w, cfg.caps)?, accepting_paths(p, &w, cfg.caps)?);
                        (ca != cb).then(|| format!("accepting paths {ca:?} became {cb:?}"))
                    }
                }
                _ => (a.p_acc != b.p_acc || a.p_rej != b.p_rej).then(|| {
                    format!("stage {}: (p_acc, p_rej) = ({}, {}) became ({}, {})", i + 1, a.p_acc, a.p_rej, b.p_acc, b.p_rej)
                }),
            };
            if let Some(detail) = detail {
                let word = word_string(&sigma, &w);
                return Ok(SeedReport { seed, outcome: Outcome::Counterexample { word, detail } });
            }
        }
    }
    let outcome = if paths { Outcome::Pass } else { Outcome::PassVerdicts };
    Ok(SeedReport { seed, outcome })
}

fn decompose_seed(cfg: &FuzzConfig, seed: u64, m: &LimitedAutomaton) -> Result<SeedReport> {
    let built = first_traverse_transducer(m).and_then(|t| Ok((t, residual_machine(m)?)));
    let (t, n) = match built {
        Ok(x) => x,
        Err(e @ Error::NotSupported(_)) => return Ok(SeedReport { seed, outcome: Outcome::Skipped(e.code()) }),
        Err(e) => return Err(e),
    };
    let mut n = Machine::Limited(n);
    mutate(&mut n, cfg.mutation);
    let source = Machine::Limited(m.clone());
    let sigma = m.input_alphabet();
    for w in words_upto(sigma.len(), cfg.upto) {
        let r = evaluate(&source, &w, cfg.caps)?;
        let accepted = verdict(&r, &Mode::Exact) == Verdict::Accept;
        let outputs = reverse_multiset(&evaluate_transducer(&t, &w));
        let says = match lfm_membership(&outputs, &n, &half(), cfg.caps) {
            Ok(b) => b,
            Err(Error::EmptyOutput) => false,
            Err(e) => return Err(e),
        };
        if accepted != says {
            let word = word_string(&sigma, &w);
            let detail = format!("machine {} but the decomposition says {}", if accepted { "accepts" } else { "does not accept" }, says);
            return Ok(SeedReport { seed, outcome: Outcome::Counterexample { word, detail } });
        }
    }
    Ok(SeedReport { seed, outcome: Outcome::Pass })
}

/// Runs every seed in `seeds`, in order. Seeds run in parallel when the
/// `parallel` feature is on; the result order does not depend on it.
pub fn run(cfg: &FuzzConfig, seeds: &[u64]) -> Result<Vec<SeedReport>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        seeds.par_iter().map(|&s| run_seed(cfg, s)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        seeds.iter().map(|&s| run_seed(cfg, s)).collect()
    }
}
