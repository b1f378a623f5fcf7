//! Reference machines, their languages as plain string predicates, and
//! seeded generators for fuzzing.
//!
//! Every machine is also checked in under `zoo/` at the crate root together
//! with a `DIGESTS` file; the builders must reproduce both byte for byte.

mod machines;
mod oracles;
mod random;

use std::path::{Path, PathBuf};

pub use machines::{
    ab_2lna, anbn_3lda, dfa_ends_b, dfa_even_length, dfa_no_c, dyck_3lda, geometric_pda, l2_ppda, lp1_2lda, lp1_dpda,
    lp2_dpda,
};
pub use oracles::{
    lk_block_order, oracle_all, oracle_anbn, oracle_anbncn, oracle_contains_ab, oracle_dyck, oracle_l2, oracle_lk,
    oracle_lp1, oracle_lp2, LanguageOracle,
};
pub use random::{random_machine, random_transducer, Determinism, Kind, RandomSpec};

use crate::error::{Error, Result};
use crate::format::{digest, to_json, MachineFile};
use crate::machine::{Machine, PushdownAutomaton};
use crate::rational::rat;
use crate::semantics::Mode;

pub fn build_l2_rppda() -> PushdownAutomaton {
    l2_ppda()
}

/// Deterministic PDAs for `a^n b^n c^m` and `a^n b^m c^m`.
pub fn build_dcfl2_witnesses() -> (PushdownAutomaton, PushdownAutomaton) {
    (lp1_dpda(), lp2_dpda())
}

#[derive(Clone, Debug)]
pub struct ZooEntry {
    pub name: &'static str,
    pub build: fn() -> Machine,
    pub oracle: LanguageOracle,
    /// How verdicts are read off the probabilities.
    pub mode: Mode,
}

const ABC: &[&str] = &["a", "b", "c"];
const AB: &[&str] = &["a", "b"];

pub fn entries() -> Vec<ZooEntry> {
    let e = |name, build, oname, alphabet, accepts, mode| ZooEntry {
        name,
        build,
        oracle: LanguageOracle { name: oname, alphabet, accepts },
        mode,
    };
    vec![
        e("Z_L2PPDA", || Machine::Pda(l2_ppda()), "L2", &["a", "b", "c", "d"][..], oracle_l2 as fn(&str) -> bool, Mode::OneSided(rat(1, 2))),
        e("Z_LP1_DPDA", || Machine::Pda(lp1_dpda()), "L'1", ABC, oracle_lp1, Mode::Exact),
        e("Z_LP2_DPDA", || Machine::Pda(lp2_dpda()), "L'2", ABC, oracle_lp2, Mode::Exact),
        e("Z_GEO_PDA", || Machine::Pda(geometric_pda()), "all", &["a"][..], oracle_all, Mode::Exact),
        e("Z_LP1_2LDA", || Machine::Limited(lp1_2lda()), "L'1", ABC, oracle_lp1, Mode::Exact),
        e("Z_AB_2LNA", || Machine::Limited(ab_2lna()), "contains ab", AB, oracle_contains_ab, Mode::Nondet),
        e("Z_ANBN_3LDA", || Machine::Limited(anbn_3lda()), "a^n b^n", AB, oracle_anbn, Mode::Exact),
        e("Z_DYCK_3LDA", || Machine::Limited(dyck_3lda()), "Dyck", AB, oracle_dyck, Mode::Exact),
    ]
}

pub fn get(name: &str) -> Option<ZooEntry> {
    entries().into_iter().find(|e| e.name.eq_ignore_ascii_case(name))
}

/// Directory holding the checked-in machine files.
pub fn zoo_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("zoo")
}

pub fn file_text(e: &ZooEntry) -> String {
    to_json(&MachineFile::from((e.build)()), None)
}

/// Contents of the `DIGESTS` file: one `name digest` line per machine.
pub fn digests_text() -> String {
    entries().iter().map(|e| format!("{} {}\n", e.name, digest(&MachineFile::from((e.build)())))).collect()
}

/// Writes every machine file and the digest list into `dir`.
pub fn write_zoo(dir: &Path) -> Result<()> {
    let io = |e: std::io::Error| Error::Invalid(format!("writing {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    for e in entries() {
        std::fs::write(dir.join(format!("{}.json", e.name)), file_text(&e)).map_err(io)?;
    }
    std::fs::write(dir.join("DIGESTS"), digests_text()).map_err(io)
}
