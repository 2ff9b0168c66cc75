//! Static analysis over runtime bytecode: linear disassembly, dispatcher
//! recognition, per-function selector discovery, the global selector index,
//! and the transfer-capability scan backing the frozen-ether oracle.

use std::collections::{BTreeMap, BTreeSet};

use crate::abi::AbiFunction;
use crate::opcode as op;
use crate::word::Address;

/// One decoded instruction. Offsets are contiguous:
/// `offset + 1 + immediate.len() == next offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instruction {
    pub offset: usize,
    pub opcode: u8,
    pub mnemonic: &'static str,
    pub immediate: Vec<u8>,
}

impl Instruction {
    pub fn is_invalid(&self) -> bool {
        self.mnemonic == "INVALID"
    }
}

/// Global index: 4-byte selector to every corpus contract exposing it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SelectorIndex {
    pub map: BTreeMap<[u8; 4], Vec<Address>>,
}

impl SelectorIndex {
    pub fn addresses_for(&self, selector: [u8; 4]) -> &[Address] {
        self.map.get(&selector).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Per-function selectors discovered inside function bodies. Functions with
/// no discovered selectors are absent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SelectorUsage {
    pub map: BTreeMap<String, BTreeSet<[u8; 4]>>,
}

impl SelectorUsage {
    pub fn selectors_for(&self, fn_abi: &AbiFunction) -> Option<&BTreeSet<[u8; 4]>> {
        self.map.get(&fn_abi.canonical_signature)
    }
}

/// Linear decode of arbitrary bytes. Unknown opcodes decode as INVALID; a
/// PUSH whose immediate overruns the end keeps the truncated payload and is
/// marked INVALID. Total: never fails.
pub fn disassemble(code: &[u8]) -> Vec<Instruction> {
    let mut out = Vec::new();
    let mut offset = 0;
    while offset < code.len() {
        let opcode = code[offset];
        let width = op::push_width(opcode);
        let start = offset + 1;
        let end = start + width;
        let (immediate, mnemonic) = if end <= code.len() {
            (code[start..end].to_vec(), op::mnemonic(opcode).unwrap_or("INVALID"))
        } else {
            (code[start..].to_vec(), "INVALID")
        };
        let consumed = 1 + immediate.len();
        out.push(Instruction { offset, opcode, mnemonic, immediate });
        offset += consumed;
    }
    out
}

/// Reassembles a disassembly back into bytes; inverse of `disassemble`.
pub fn assemble_instructions(instructions: &[Instruction]) -> Vec<u8> {
    let mut out = Vec::new();
    for instruction in instructions {
        out.push(instruction.opcode);
        out.extend_from_slice(&instruction.immediate);
    }
    out
}

/// Locates dispatcher comparisons (`PUSH4 s .. EQ .. JUMPI dest`) for each
/// ABI selector and slices the code into per-function body segments. The
/// segment for a selector runs from the JUMPDEST at its dispatch target up
/// to the next dispatched body; unresolved selectors map to empty segments.
pub fn extract_function_bodies<'a>(
    instructions: &'a [Instruction],
    abi_selectors: &[[u8; 4]],
) -> BTreeMap<[u8; 4], &'a [Instruction]> {
    let mut dispatch_offsets: BTreeMap<[u8; 4], usize> = BTreeMap::new();
    for window in instructions.windows(4) {
        // PUSH4 s; EQ; PUSH2 dest; JUMPI is the canonical compiler shape.
        let [push4, eq, push_dest, jumpi] = window else { continue };
        if push4.opcode != 0x63 || eq.opcode != op::EQ || jumpi.opcode != op::JUMPI {
            continue;
        }
        if !op::is_push(push_dest.opcode) {
            continue;
        }
        let mut selector = [0u8; 4];
        if push4.immediate.len() != 4 {
            continue;
        }
        selector.copy_from_slice(&push4.immediate);
        if !abi_selectors.contains(&selector) {
            continue;
        }
        let mut dest = 0usize;
        for &byte in &push_dest.immediate {
            dest = dest << 8 | byte as usize;
        }
        dispatch_offsets.entry(selector).or_insert(dest);
    }

    // Body boundaries are the dispatched JUMPDEST offsets in code order.
    let mut boundaries: Vec<usize> = dispatch_offsets.values().copied().collect();
    boundaries.sort_unstable();
    boundaries.dedup();

    let mut out = BTreeMap::new();
    for &selector in abi_selectors {
        let segment: &[Instruction] = match dispatch_offsets.get(&selector) {
            Some(&dest) => {
                let start = instructions.iter().position(|i| i.offset == dest && i.opcode == op::JUMPDEST);
                match start {
                    Some(start) => {
                        let next_boundary = boundaries.iter().copied().find(|&b| b > dest);
                        let end = match next_boundary {
                            Some(boundary) => instructions
                                .iter()
                                .position(|i| i.offset >= boundary)
                                .unwrap_or(instructions.len()),
                            None => instructions.len(),
                        };
                        &instructions[start..end]
                    }
                    None => &[],
                }
            }
            None => &[],
        };
        out.insert(selector, segment);
    }
    out
}

/// The per-function selector discovery algorithm: disassemble, slice into
/// ABI function bodies, and collect the PUSH4 immediates found in each body.
/// Dispatcher comparisons never land inside a body segment, so a function
/// is not indexed as calling itself merely by being dispatched. Empty
/// selector sets are omitted.
pub fn find_function_selectors(code: &[u8], abi: &[AbiFunction]) -> SelectorUsage {
    let instructions = disassemble(code);
    let selectors: Vec<[u8; 4]> = abi.iter().map(|f| f.selector).collect();
    let bodies = extract_function_bodies(&instructions, &selectors);

    let mut usage = SelectorUsage::default();
    for fn_abi in abi {
        let Some(segment) = bodies.get(&fn_abi.selector) else { continue };
        let mut found = BTreeSet::new();
        for instruction in *segment {
            if instruction.opcode == 0x63 && instruction.immediate.len() == 4 {
                let mut selector = [0u8; 4];
                selector.copy_from_slice(&instruction.immediate);
                found.insert(selector);
            }
        }
        if !found.is_empty() {
            usage.map.insert(fn_abi.canonical_signature.clone(), found);
        }
    }
    usage
}

/// Indexes every deployed contract by the selectors its ABI exposes.
pub fn build_selector_index(corpus: &[(Address, Vec<AbiFunction>)]) -> SelectorIndex {
    let mut index = SelectorIndex::default();
    for (address, functions) in corpus {
        for fn_abi in functions {
            let entry = index.map.entry(fn_abi.selector).or_default();
            if !entry.contains(address) {
                entry.push(*address);
            }
        }
    }
    index
}

/// Static ether-transfer capability of a contract's own runtime code.
/// Counts opcodes only; PUSH immediates are never misread as opcodes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct TransferCapability {
    pub has_call: bool,
    pub has_selfdestruct: bool,
    pub has_delegatecall: bool,
}

pub fn scan_transfer_capability(code: &[u8]) -> TransferCapability {
    let mut capability = TransferCapability::default();
    for instruction in disassemble(code) {
        if instruction.is_invalid() {
            continue;
        }
        match instruction.opcode {
            op::CALL => capability.has_call = true,
            op::SELFDESTRUCT => capability.has_selfdestruct = true,
            op::DELEGATECALL => capability.has_delegatecall = true,
            _ => {}
        }
    }
    capability
}
