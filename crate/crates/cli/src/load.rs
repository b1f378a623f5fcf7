use std::path::Path;

use limaut::format::{parse_machine_file, MachineFile, Provenance};
use limaut::machine::{Dfa, Machine};
use limaut::zoo;

use crate::Failure;

/// DFAs available by name, next to the zoo machines.
fn builtin_dfa(name: &str) -> Option<Dfa> {
    match name.to_ascii_uppercase().as_str() {
        "D_NO_C" => Some(zoo::dfa_no_c()),
        "D_ENDS_B" => Some(zoo::dfa_ends_b()),
        "D_EVEN_AB" => Some(zoo::dfa_even_length(&["a", "b"])),
        "D_EVEN_ABC" => Some(zoo::dfa_even_length(&["a", "b", "c"])),
        _ => None,
    }
}

pub const BUILTIN_DFAS: [&str; 4] = ["D_NO_C", "D_ENDS_B", "D_EVEN_AB", "D_EVEN_ABC"];

/// Reads a machine file, or builds a zoo machine when `arg` is not a path.
pub fn file(arg: &str) -> Result<(MachineFile, Option<Provenance>), Failure> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{arg}: {e}")))?;
        return parse_machine_file(&text).map_err(|e| Failure::Input(format!("{arg}: {e}")));
    }
    if let Some(e) = zoo::get(arg) {
        return Ok((MachineFile::from((e.build)()), None));
    }
    if let Some(d) = builtin_dfa(arg) {
        return Ok((MachineFile::Dfa(d), None));
    }
    Err(Failure::Input(format!("{arg}: no such file or zoo machine")))
}

pub fn machine(arg: &str) -> Result<Machine, Failure> {
    let (f, _) = file(arg)?;
    f.into_machine().map_err(|e| Failure::Input(format!("{arg}: {e}")))
}

pub fn dfa(arg: &str) -> Result<Dfa, Failure> {
    match file(arg)?.0 {
        MachineFile::Dfa(d) => Ok(d),
        other => Err(Failure::Input(format!("{arg}: expected a dfa, found a {} file", other.kind()))),
    }
}
