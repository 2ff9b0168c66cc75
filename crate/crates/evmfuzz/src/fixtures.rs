//! Built-in fixture contracts: classic vulnerable patterns and benign
//! counterparts, written in the bundled assembly dialect. `write_corpus`
//! materializes them as a corpus directory for the fuzzer.

use std::fs;
use std::io;
use std::path::Path;

use crate::asm::assemble;
use crate::opcode as op;

/// One bundled fixture: assembly runtime source, ABI JSON, and an optional
/// deploy endowment in wei.
#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub asm: &'static str,
    pub abi: &'static str,
    pub endowment: Option<&'static str>,
}

/// Wraps runtime code in a standard creation stub: copy the runtime into
/// memory and return it.
pub fn wrap_runtime(runtime: &[u8]) -> Vec<u8> {
    // PUSH2 len, PUSH2 offset, PUSH1 0, CODECOPY, PUSH2 len, PUSH1 0, RETURN
    const STUB_LEN: usize = 15;
    let len = runtime.len() as u16;
    let offset = STUB_LEN as u16;
    let mut out = Vec::with_capacity(STUB_LEN + runtime.len());
    out.push(op::PUSH1 + 1);
    out.extend_from_slice(&len.to_be_bytes());
    out.push(op::PUSH1 + 1);
    out.extend_from_slice(&offset.to_be_bytes());
    out.push(op::PUSH1);
    out.push(0);
    out.push(op::CODECOPY);
    out.push(op::PUSH1 + 1);
    out.extend_from_slice(&len.to_be_bytes());
    out.push(op::PUSH1);
    out.push(0);
    out.push(op::RETURN);
    out.extend_from_slice(runtime);
    out
}

/// Assembles a fixture's runtime and returns its hex creation code.
pub fn creation_hex(fixture: &Fixture) -> String {
    let runtime = assemble(fixture.asm)
        .unwrap_or_else(|e| panic!("fixture `{}` fails to assemble: {e}", fixture.name));
    hex::encode(wrap_runtime(&runtime))
}

/// Writes every bundled fixture into `dir` in corpus layout.
pub fn write_corpus(dir: &Path) -> io::Result<()> {
    for fixture in FIXTURES {
        write_fixture(fixture, dir)?;
    }
    Ok(())
}

/// Writes the extra fixtures that are not part of the standard matrix.
pub fn write_extra_corpus(dir: &Path) -> io::Result<()> {
    for fixture in EXTRA_FIXTURES {
        write_fixture(fixture, dir)?;
    }
    Ok(())
}

fn write_fixture(fixture: &Fixture, dir: &Path) -> io::Result<()> {
    let subdir = dir.join(fixture.name);
    fs::create_dir_all(&subdir)?;
    fs::write(subdir.join("contract.bin"), creation_hex(fixture))?;
    fs::write(subdir.join("contract.abi"), fixture.abi)?;
    if let Some(endowment) = fixture.endowment {
        fs::write(subdir.join("contract.meta"), endowment)?;
    }
    Ok(())
}

pub fn fixture_by_name(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().chain(EXTRA_FIXTURES).find(|f| f.name == name)
}

macro_rules! fixture {
    ($name:literal, endowment: $endowment:expr) => {
        Fixture {
            name: $name,
            asm: include_str!(concat!("../fixtures/", $name, "/contract.asm")),
            abi: include_str!(concat!("../fixtures/", $name, "/contract.abi")),
            endowment: $endowment,
        }
    };
}

/// The standard fixture matrix: seven vulnerable patterns, their benign
/// counterparts, and corpus-interaction contracts.
pub static FIXTURES: &[Fixture] = &[
    fixture!("bounty_hunt", endowment: Some("1000000000000")),
    fixture!("preico", endowment: None),
    fixture!("gasless_refunder", endowment: None),
    fixture!("slot_machine", endowment: Some("1000000000000")),
    fixture!("block_lottery", endowment: Some("1000000000000")),
    fixture!("danger_delegate", endowment: None),
    fixture!("frozen_wallet", endowment: Some("5000")),
    fixture!("stipend_vault", endowment: None),
    fixture!("past_date_guard", endowment: None),
    fixture!("bounty_hunt_patched", endowment: Some("1000000000000")),
    fixture!("benign_bank", endowment: None),
    fixture!("owner_guard", endowment: None),
    fixture!("fixed_beneficiary", endowment: None),
    fixture!("pure_math", endowment: None),
    fixture!("logger", endowment: None),
    fixture!("selfdestruct_escape", endowment: Some("5000")),
    fixture!("token", endowment: None),
    fixture!("spender", endowment: None),
];

/// Fixtures exercised by dedicated tests rather than the standard matrix.
pub static EXTRA_FIXTURES: &[Fixture] = &[fixture!("composite_timebomb", endowment: None)];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abi::parse_abi;
    use crate::analysis::{disassemble, extract_function_bodies};

    #[test]
    fn every_fixture_assembles() {
        for fixture in FIXTURES.iter().chain(EXTRA_FIXTURES) {
            let runtime = assemble(fixture.asm)
                .unwrap_or_else(|e| panic!("{} does not assemble: {e}", fixture.name));
            assert!(!runtime.is_empty(), "{} produced empty runtime", fixture.name);
            parse_abi(fixture.abi)
                .unwrap_or_else(|e| panic!("{} has bad ABI: {e}", fixture.name));
        }
    }

    #[test]
    fn wrap_runtime_layout() {
        let runtime = vec![0x60, 0x01, 0x00];
        let creation = wrap_runtime(&runtime);
        assert_eq!(creation.len(), 15 + runtime.len());
        assert_eq!(&creation[15..], runtime.as_slice());
    }

    // Every ABI function of every fixture must be resolvable through the
    // dispatcher; this pins the hand-written PUSH4 constants in the asm
    // sources to the selectors computed from their ABI signatures.
    #[test]
    fn dispatchers_resolve_every_abi_selector() {
        for fixture in FIXTURES.iter().chain(EXTRA_FIXTURES) {
            let abi = parse_abi(fixture.abi).unwrap();
            if abi.functions.is_empty() {
                continue;
            }
            let runtime = assemble(fixture.asm).unwrap();
            let instructions = disassemble(&runtime);
            let selectors: Vec<[u8; 4]> = abi.functions.iter().map(|f| f.selector).collect();
            let bodies = extract_function_bodies(&instructions, &selectors);
            for fn_abi in &abi.functions {
                let body = &bodies[&fn_abi.selector];
                assert!(
                    !body.is_empty(),
                    "fixture `{}`: dispatcher does not resolve {} (selector 0x{})",
                    fixture.name,
                    fn_abi.canonical_signature,
                    hex::encode(fn_abi.selector)
                );
            }
        }
    }
}
