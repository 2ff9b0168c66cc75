//! A tiny textual assembler for authoring fixture contracts.
//!
//! Grammar: `#` starts a comment, labels are `:name`, operands are decimal
//! or `0x` hex literals or label references. A bare `PUSH` picks the
//! smallest width that fits its operand; label references always assemble
//! as PUSH2 absolute offsets. A label site gets a JUMPDEST emitted for it
//! unless the labeled instruction already is one.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::opcode as op;

#[derive(Debug, Error, PartialEq)]
pub enum AsmError {
    #[error("unknown mnemonic `{0}`")]
    UnknownMnemonic(String),
    #[error("unresolved label `:{0}`")]
    UnresolvedLabel(String),
    #[error("label `:{0}` defined more than once")]
    DuplicateLabel(String),
    #[error("operand too wide for {0}")]
    OperandTooWide(String),
    #[error("{0} expects an operand")]
    MissingOperand(String),
    #[error("unexpected operand `{0}`")]
    UnexpectedOperand(String),
    #[error("duplicate selector in dispatcher")]
    DuplicateSelector,
}

#[derive(Debug, Clone, PartialEq)]
enum Operand {
    /// Big-endian payload bytes, length fixed by the time it is stored.
    Literal(Vec<u8>),
    LabelRef(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Item {
    LabelDef(String),
    /// A fully sized instruction: opcode plus immediate payload width.
    Instr { opcode: u8, operand: Option<Operand>, width: usize },
}

/// A parsed program, ready for offset resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct AsmProgram {
    items: Vec<Item>,
}

impl AsmProgram {
    pub fn parse(source: &str) -> Result<AsmProgram, AsmError> {
        let mut items = Vec::new();
        for line in source.lines() {
            let line = line.split('#').next().unwrap_or("");
            let mut tokens = line.split_whitespace().peekable();
            while let Some(token) = tokens.next() {
                if let Some(name) = token.strip_prefix(':') {
                    items.push(Item::LabelDef(name.to_string()));
                    continue;
                }
                let upper = token.to_ascii_uppercase();
                if upper == "PUSH" {
                    let operand = tokens
                        .next()
                        .ok_or_else(|| AsmError::MissingOperand(upper.clone()))?;
                    items.push(parse_push(None, operand)?);
                    continue;
                }
                let opcode = op::opcode_by_name(&upper)
                    .ok_or_else(|| AsmError::UnknownMnemonic(token.to_string()))?;
                if op::is_push(opcode) {
                    let operand = tokens
                        .next()
                        .ok_or_else(|| AsmError::MissingOperand(upper.clone()))?;
                    items.push(parse_push(Some(opcode), operand)?);
                    continue;
                }
                // Non-push mnemonics take no operand; the next token must be
                // another mnemonic or label.
                items.push(Item::Instr { opcode, operand: None, width: 0 });
            }
        }
        Ok(AsmProgram { items })
    }

    /// Emits bytecode. Labels resolve to absolute offsets; every label site
    /// carries a JUMPDEST.
    pub fn assemble(&self) -> Result<Vec<u8>, AsmError> {
        // Insert a JUMPDEST at each label site unless one is already there.
        let mut sized: Vec<Item> = Vec::with_capacity(self.items.len());
        for (index, item) in self.items.iter().enumerate() {
            sized.push(item.clone());
            if let Item::LabelDef(_) = item {
                let next_instr = self.items[index + 1..].iter().find_map(|it| match it {
                    Item::Instr { opcode, .. } => Some(*opcode),
                    Item::LabelDef(_) => None,
                });
                if next_instr != Some(op::JUMPDEST) {
                    sized.push(Item::Instr { opcode: op::JUMPDEST, operand: None, width: 0 });
                }
            }
        }

        // First pass: assign offsets; all widths are known up front.
        let mut labels: BTreeMap<String, usize> = BTreeMap::new();
        let mut offset = 0usize;
        for item in &sized {
            match item {
                Item::LabelDef(name) => {
                    if labels.insert(name.clone(), offset).is_some() {
                        return Err(AsmError::DuplicateLabel(name.clone()));
                    }
                }
                Item::Instr { width, .. } => offset += 1 + width,
            }
        }

        // Second pass: emit.
        let mut out = Vec::with_capacity(offset);
        for item in &sized {
            let Item::Instr { opcode, operand, width } = item else { continue };
            out.push(*opcode);
            match operand {
                None => {}
                Some(Operand::Literal(bytes)) => {
                    debug_assert_eq!(bytes.len(), *width);
                    out.extend_from_slice(bytes);
                }
                Some(Operand::LabelRef(name)) => {
                    let target = *labels
                        .get(name)
                        .ok_or_else(|| AsmError::UnresolvedLabel(name.clone()))?;
                    if target > u16::MAX as usize {
                        return Err(AsmError::OperandTooWide(format!(":{name}")));
                    }
                    out.extend_from_slice(&(target as u16).to_be_bytes());
                }
            }
        }
        Ok(out)
    }
}

fn parse_push(sized: Option<u8>, operand: &str) -> Result<Item, AsmError> {
    if let Some(name) = operand.strip_prefix(':') {
        // Label references are always PUSH2 so offsets stay stable.
        let opcode = sized.unwrap_or(op::PUSH1 + 1);
        if opcode != op::PUSH1 + 1 {
            return Err(AsmError::UnexpectedOperand(operand.to_string()));
        }
        return Ok(Item::Instr {
            opcode,
            operand: Some(Operand::LabelRef(name.to_string())),
            width: 2,
        });
    }
    let bytes = parse_literal(operand)?;
    match sized {
        Some(opcode) => {
            let width = op::push_width(opcode);
            if bytes.len() > width {
                return Err(AsmError::OperandTooWide(op::mnemonic(opcode).unwrap().into()));
            }
            let mut padded = vec![0u8; width - bytes.len()];
            padded.extend_from_slice(&bytes);
            Ok(Item::Instr { opcode, operand: Some(Operand::Literal(padded)), width })
        }
        None => {
            let width = bytes.len().max(1);
            if width > 32 {
                return Err(AsmError::OperandTooWide("PUSH".into()));
            }
            let mut padded = bytes;
            if padded.is_empty() {
                padded.push(0);
            }
            let opcode = op::PUSH1 + (width as u8 - 1);
            Ok(Item::Instr { opcode, operand: Some(Operand::Literal(padded)), width })
        }
    }
}

/// Decimal or `0x` hex literal to big-endian bytes. Hex keeps its written
/// length; decimal is minimal.
fn parse_literal(token: &str) -> Result<Vec<u8>, AsmError> {
    if let Some(hex_digits) = token.strip_prefix("0x").or_else(|| token.strip_prefix("0X")) {
        let padded = if hex_digits.len() % 2 == 1 {
            format!("0{hex_digits}")
        } else {
            hex_digits.to_string()
        };
        return hex::decode(&padded).map_err(|_| AsmError::UnknownMnemonic(token.to_string()));
    }
    let value: u128 = token.parse().map_err(|_| AsmError::UnknownMnemonic(token.to_string()))?;
    let bytes = value.to_be_bytes();
    let first = bytes.iter().position(|&b| b != 0).unwrap_or(15);
    Ok(bytes[first..].to_vec())
}

/// Assembles fixture source text into bytecode.
pub fn assemble(source: &str) -> Result<Vec<u8>, AsmError> {
    AsmProgram::parse(source)?.assemble()
}

/// Emits the canonical dispatcher prologue: load the calldata selector,
/// compare it against each declared function, and fall through to the
/// fallback. Function bodies are expected at the given labels.
pub fn build_dispatcher(functions: &[([u8; 4], &str)]) -> Result<String, AsmError> {
    for (i, (selector, _)) in functions.iter().enumerate() {
        if functions[i + 1..].iter().any(|(other, _)| other == selector) {
            return Err(AsmError::DuplicateSelector);
        }
    }
    if functions.is_empty() {
        return Ok(String::new());
    }
    let mut out = String::new();
    out.push_str("PUSH1 0\nCALLDATALOAD\n");
    // 2^224: dividing shifts the selector into the low 4 bytes.
    out.push_str("PUSH29 0x01");
    out.push_str(&"00".repeat(28));
    out.push_str("\nSWAP1\nDIV\n");
    for (selector, label) in functions {
        let _ = writeln!(out, "DUP1 PUSH4 0x{} EQ PUSH2 :{} JUMPI", hex::encode(selector), label);
    }
    out.push_str("POP\n");
    Ok(out)
}
