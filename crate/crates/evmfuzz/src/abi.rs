//! Contract ABI parsing, canonical signatures, 4-byte selectors, and
//! calldata encoding.
//!
//! The encoder implements the standard head/tail layout: static values are
//! padded to 32 bytes in place, dynamic values live in the tail and are
//! referenced by 32-byte offsets. Tuples, fixed-point types, and nesting
//! beyond one array level are out of scope.

use serde::Deserialize;
use thiserror::Error;

use crate::hash::keccak256;
use crate::word::{Address, Word};

#[derive(Debug, Error, PartialEq)]
pub enum AbiError {
    #[error("malformed ABI JSON: {0}")]
    MalformedJson(String),
    #[error("unsupported ABI type: {0}")]
    UnsupportedType(String),
    #[error("argument count mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("value out of domain for {0}")]
    ValueOutOfDomain(String),
}

/// One parameter type from the contract ABI grammar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbiType {
    /// uint<M>, 8 <= M <= 256, M % 8 == 0
    Uint(usize),
    /// int<M>, same M constraints
    Int(usize),
    Address,
    Bool,
    /// bytes<M>, 1 <= M <= 32
    FixedBytes(usize),
    Bytes,
    String,
    /// elem[M]; element must be static or the array is dynamic
    FixedArray(Box<AbiType>, usize),
    /// elem[]
    DynArray(Box<AbiType>),
}

impl AbiType {
    /// Parses a canonical or shorthand type name (`uint` means `uint256`).
    pub fn parse(name: &str) -> Result<AbiType, AbiError> {
        let name = name.trim();
        if let Some(elem) = name.strip_suffix("[]") {
            let elem = AbiType::parse(elem)?;
            if matches!(elem, AbiType::FixedArray(..) | AbiType::DynArray(..)) {
                return Err(AbiError::UnsupportedType(name.to_string()));
            }
            return Ok(AbiType::DynArray(Box::new(elem)));
        }
        if let Some(open) = name.rfind('[') {
            if name.ends_with(']') {
                let len: usize = name[open + 1..name.len() - 1]
                    .parse()
                    .map_err(|_| AbiError::UnsupportedType(name.to_string()))?;
                if len == 0 {
                    return Err(AbiError::UnsupportedType(name.to_string()));
                }
                let elem = AbiType::parse(&name[..open])?;
                if matches!(elem, AbiType::FixedArray(..) | AbiType::DynArray(..)) {
                    return Err(AbiError::UnsupportedType(name.to_string()));
                }
                return Ok(AbiType::FixedArray(Box::new(elem), len));
            }
        }
        match name {
            "address" => return Ok(AbiType::Address),
            "bool" => return Ok(AbiType::Bool),
            "bytes" => return Ok(AbiType::Bytes),
            "string" => return Ok(AbiType::String),
            "uint" => return Ok(AbiType::Uint(256)),
            "int" => return Ok(AbiType::Int(256)),
            "byte" => return Ok(AbiType::FixedBytes(1)),
            _ => {}
        }
        if let Some(m) = name.strip_prefix("uint") {
            let m: usize = m.parse().map_err(|_| AbiError::UnsupportedType(name.to_string()))?;
            if !m.is_multiple_of(8) || m == 0 || m > 256 {
                return Err(AbiError::UnsupportedType(name.to_string()));
            }
            return Ok(AbiType::Uint(m));
        }
        if let Some(m) = name.strip_prefix("int") {
            let m: usize = m.parse().map_err(|_| AbiError::UnsupportedType(name.to_string()))?;
            if !m.is_multiple_of(8) || m == 0 || m > 256 {
                return Err(AbiError::UnsupportedType(name.to_string()));
            }
            return Ok(AbiType::Int(m));
        }
        if let Some(m) = name.strip_prefix("bytes") {
            let m: usize = m.parse().map_err(|_| AbiError::UnsupportedType(name.to_string()))?;
            if m == 0 || m > 32 {
                return Err(AbiError::UnsupportedType(name.to_string()));
            }
            return Ok(AbiType::FixedBytes(m));
        }
        Err(AbiError::UnsupportedType(name.to_string()))
    }

    /// Canonical name used in signatures: sized ints, `bytes1` for `byte`.
    pub fn canonical_name(&self) -> String {
        match self {
            AbiType::Uint(m) => format!("uint{m}"),
            AbiType::Int(m) => format!("int{m}"),
            AbiType::Address => "address".to_string(),
            AbiType::Bool => "bool".to_string(),
            AbiType::FixedBytes(m) => format!("bytes{m}"),
            AbiType::Bytes => "bytes".to_string(),
            AbiType::String => "string".to_string(),
            AbiType::FixedArray(elem, m) => format!("{}[{m}]", elem.canonical_name()),
            AbiType::DynArray(elem) => format!("{}[]", elem.canonical_name()),
        }
    }

    pub fn is_dynamic(&self) -> bool {
        match self {
            AbiType::Bytes | AbiType::String | AbiType::DynArray(..) => true,
            AbiType::FixedArray(elem, _) => elem.is_dynamic(),
            _ => false,
        }
    }

    /// Number of 32-byte words a value of this type occupies in the head.
    fn head_words(&self) -> usize {
        match self {
            AbiType::FixedArray(elem, m) if !self.is_dynamic() => elem.head_words() * m,
            _ => 1,
        }
    }
}

/// Runtime argument value, mirroring `AbiType`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbiValue {
    Uint(Word),
    Int(Word),
    Address(Address),
    Bool(bool),
    FixedBytes(Vec<u8>),
    Bytes(Vec<u8>),
    String(String),
    Array(Vec<AbiValue>),
}

impl AbiValue {
    /// Checks that the value lies in the type's domain.
    pub fn matches(&self, ty: &AbiType) -> bool {
        match (self, ty) {
            (AbiValue::Uint(v), AbiType::Uint(m)) => {
                *m == 256 || *v <= (Word::one() << *m) - Word::one()
            }
            (AbiValue::Int(v), AbiType::Int(m)) => {
                if *m == 256 {
                    return true;
                }
                // Two's-complement in M bits, sign-extended to 256.
                let sign = v.bit(*m - 1);
                let mask = Word::MAX << *m;
                if sign {
                    (*v & mask) == mask
                } else {
                    (*v & mask).is_zero()
                }
            }
            (AbiValue::Address(_), AbiType::Address) => true,
            (AbiValue::Bool(_), AbiType::Bool) => true,
            (AbiValue::FixedBytes(b), AbiType::FixedBytes(m)) => b.len() == *m,
            (AbiValue::Bytes(_), AbiType::Bytes) => true,
            (AbiValue::String(_), AbiType::String) => true,
            (AbiValue::Array(vs), AbiType::FixedArray(elem, m)) => {
                vs.len() == *m && vs.iter().all(|v| v.matches(elem))
            }
            (AbiValue::Array(vs), AbiType::DynArray(elem)) => vs.iter().all(|v| v.matches(elem)),
            _ => false,
        }
    }
}

/// One callable function from a parsed ABI.
#[derive(Debug, Clone, PartialEq)]
pub struct AbiFunction {
    pub name: String,
    pub inputs: Vec<AbiType>,
    pub payable: bool,
    pub constant: bool,
    pub canonical_signature: String,
    pub selector: [u8; 4],
}

impl AbiFunction {
    pub fn new(name: &str, inputs: Vec<AbiType>, payable: bool, constant: bool) -> AbiFunction {
        let canonical_signature = canonical_signature(name, &inputs);
        let selector = compute_selector(&canonical_signature);
        AbiFunction { name: name.to_string(), inputs, payable, constant, canonical_signature, selector }
    }
}

/// Everything the fuzzer needs from one contract's ABI document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ContractAbi {
    pub functions: Vec<AbiFunction>,
    pub has_fallback: bool,
    pub fallback_payable: bool,
    pub constructor_inputs: Vec<AbiType>,
}

pub fn canonical_signature(name: &str, inputs: &[AbiType]) -> String {
    let args: Vec<String> = inputs.iter().map(|t| t.canonical_name()).collect();
    format!("{}({})", name, args.join(","))
}

/// First 4 bytes of the Keccak-256 hash of a canonical signature.
pub fn compute_selector(signature: &str) -> [u8; 4] {
    let digest = keccak256(signature.as_bytes());
    [digest[0], digest[1], digest[2], digest[3]]
}

#[derive(Deserialize)]
struct RawEntry {
    #[serde(rename = "type")]
    kind: Option<String>,
    name: Option<String>,
    #[serde(default)]
    inputs: Vec<RawParam>,
    payable: Option<bool>,
    constant: Option<bool>,
    #[serde(rename = "stateMutability")]
    state_mutability: Option<String>,
}

#[derive(Deserialize)]
struct RawParam {
    #[serde(rename = "type")]
    kind: String,
}

/// Parses an ABI JSON document into the function list plus fallback and
/// constructor information. Unknown fields are ignored; entries other than
/// function/fallback/constructor are skipped; unsupported parameter types
/// are an error.
pub fn parse_abi(json_text: &str) -> Result<ContractAbi, AbiError> {
    let entries: Vec<RawEntry> =
        serde_json::from_str(json_text).map_err(|e| AbiError::MalformedJson(e.to_string()))?;
    let mut abi = ContractAbi::default();
    for entry in entries {
        // Entries with no "type" default to "function" per the ABI convention.
        let kind = entry.kind.as_deref().unwrap_or("function");
        match kind {
            "function" => {
                let name = entry
                    .name
                    .ok_or_else(|| AbiError::MalformedJson("function entry without name".into()))?;
                let inputs = entry
                    .inputs
                    .iter()
                    .map(|p| AbiType::parse(&p.kind))
                    .collect::<Result<Vec<_>, _>>()?;
                let payable = entry.payable.unwrap_or_else(|| {
                    entry.state_mutability.as_deref() == Some("payable")
                });
                let constant = entry.constant.unwrap_or({
                    matches!(entry.state_mutability.as_deref(), Some("view") | Some("pure"))
                });
                abi.functions.push(AbiFunction::new(&name, inputs, payable, constant));
            }
            "fallback" | "receive" => {
                abi.has_fallback = true;
                abi.fallback_payable |= entry.payable.unwrap_or_else(|| {
                    entry.state_mutability.as_deref() == Some("payable")
                });
            }
            "constructor" => {
                abi.constructor_inputs = entry
                    .inputs
                    .iter()
                    .map(|p| AbiType::parse(&p.kind))
                    .collect::<Result<Vec<_>, _>>()?;
            }
            _ => {}
        }
    }
    Ok(abi)
}

/// Standard head/tail ABI encoding of `values` against `types`.
pub fn encode_arguments(types: &[AbiType], values: &[AbiValue]) -> Result<Vec<u8>, AbiError> {
    if types.len() != values.len() {
        return Err(AbiError::ArityMismatch { expected: types.len(), got: values.len() });
    }
    for (ty, value) in types.iter().zip(values) {
        if !value.matches(ty) {
            return Err(AbiError::ValueOutOfDomain(ty.canonical_name()));
        }
    }
    let head_len: usize = types.iter().map(|t| t.head_words() * 32).sum();
    let mut head = Vec::with_capacity(head_len);
    let mut tail = Vec::new();
    for (ty, value) in types.iter().zip(values) {
        if ty.is_dynamic() {
            head.extend_from_slice(&word_bytes(Word::from(head_len + tail.len())));
            tail.extend_from_slice(&encode_tail(ty, value));
        } else {
            head.extend_from_slice(&encode_static(ty, value));
        }
    }
    head.extend_from_slice(&tail);
    Ok(head)
}

/// Selector followed by the encoded arguments.
pub fn encode_call(fn_abi: &AbiFunction, values: &[AbiValue]) -> Result<Vec<u8>, AbiError> {
    let mut out = fn_abi.selector.to_vec();
    out.extend_from_slice(&encode_arguments(&fn_abi.inputs, values)?);
    Ok(out)
}

fn word_bytes(w: Word) -> [u8; 32] {
    w.to_big_endian()
}

fn encode_static(ty: &AbiType, value: &AbiValue) -> Vec<u8> {
    match (ty, value) {
        (AbiType::Uint(_), AbiValue::Uint(v)) | (AbiType::Int(_), AbiValue::Int(v)) => {
            word_bytes(*v).to_vec()
        }
        (AbiType::Address, AbiValue::Address(a)) => word_bytes(a.to_word()).to_vec(),
        (AbiType::Bool, AbiValue::Bool(b)) => {
            word_bytes(if *b { Word::one() } else { Word::zero() }).to_vec()
        }
        (AbiType::FixedBytes(_), AbiValue::FixedBytes(b)) => {
            let mut out = vec![0u8; 32];
            out[..b.len()].copy_from_slice(b);
            out
        }
        (AbiType::FixedArray(elem, _), AbiValue::Array(vs)) => {
            vs.iter().flat_map(|v| encode_static(elem, v)).collect()
        }
        _ => unreachable!("domain-checked before encoding"),
    }
}

fn encode_tail(ty: &AbiType, value: &AbiValue) -> Vec<u8> {
    match (ty, value) {
        (AbiType::Bytes, AbiValue::Bytes(b)) => encode_byte_blob(b),
        (AbiType::String, AbiValue::String(s)) => encode_byte_blob(s.as_bytes()),
        (AbiType::DynArray(elem), AbiValue::Array(vs)) => {
            let mut out = word_bytes(Word::from(vs.len())).to_vec();
            // Depth is limited to one, so elements are always static here.
            for v in vs {
                out.extend_from_slice(&encode_static(elem, v));
            }
            out
        }
        (AbiType::FixedArray(elem, _), AbiValue::Array(vs)) if elem.is_dynamic() => {
            // Unreachable with depth-1 elements; kept total for safety.
            let mut out = Vec::new();
            for v in vs {
                out.extend_from_slice(&encode_tail(elem, v));
            }
            out
        }
        _ => unreachable!("static type in tail position"),
    }
}

fn encode_byte_blob(b: &[u8]) -> Vec<u8> {
    let mut out = word_bytes(Word::from(b.len())).to_vec();
    out.extend_from_slice(b);
    let pad = (32 - b.len() % 32) % 32;
    out.extend(std::iter::repeat_n(0u8, pad));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_type() -> impl Strategy<Value = AbiType> {
        prop_oneof![
            (1usize..=32).prop_map(|m| AbiType::Uint(8 * m)),
            (1usize..=32).prop_map(|m| AbiType::Int(8 * m)),
            Just(AbiType::Address),
            Just(AbiType::Bool),
            (1usize..=32).prop_map(AbiType::FixedBytes),
            Just(AbiType::Bytes),
            Just(AbiType::String),
            (1usize..=4).prop_map(|m| AbiType::FixedArray(Box::new(AbiType::Uint(256)), m)),
            Just(AbiType::DynArray(Box::new(AbiType::Address))),
        ]
    }

    fn arb_value(ty: &AbiType) -> BoxedStrategy<AbiValue> {
        match ty.clone() {
            AbiType::Uint(m) => proptest::collection::vec(any::<u8>(), 32)
                .prop_map(move |b| {
                    let mut v = Word::from_big_endian(&b);
                    if m < 256 {
                        v &= (Word::one() << m) - Word::one();
                    }
                    AbiValue::Uint(v)
                })
                .boxed(),
            AbiType::Int(m) => proptest::collection::vec(any::<u8>(), 32)
                .prop_map(move |b| {
                    let mut v = Word::from_big_endian(&b);
                    if m < 256 {
                        v &= (Word::one() << m) - Word::one();
                        if v.bit(m - 1) {
                            v |= Word::MAX << m;
                        }
                    }
                    AbiValue::Int(v)
                })
                .boxed(),
            AbiType::Address => proptest::collection::vec(any::<u8>(), 20)
                .prop_map(|b| AbiValue::Address(Address::from_slice(&b)))
                .boxed(),
            AbiType::Bool => any::<bool>().prop_map(AbiValue::Bool).boxed(),
            AbiType::FixedBytes(m) => {
                proptest::collection::vec(any::<u8>(), m).prop_map(AbiValue::FixedBytes).boxed()
            }
            AbiType::Bytes => {
                proptest::collection::vec(any::<u8>(), 0..80).prop_map(AbiValue::Bytes).boxed()
            }
            AbiType::String => "[ -~]{0,40}".prop_map(AbiValue::String).boxed(),
            AbiType::FixedArray(elem, m) => {
                proptest::collection::vec(arb_value(&elem), m).prop_map(AbiValue::Array).boxed()
            }
            AbiType::DynArray(elem) => proptest::collection::vec(arb_value(&elem), 0..6)
                .prop_map(AbiValue::Array)
                .boxed(),
        }
    }

    fn arb_args() -> impl Strategy<Value = (Vec<AbiType>, Vec<AbiValue>)> {
        proptest::collection::vec(arb_type(), 0..5).prop_flat_map(|types| {
            let values: Vec<BoxedStrategy<AbiValue>> = types.iter().map(arb_value).collect();
            (Just(types), values)
        })
    }

    proptest! {
        // Length law: head slots plus a 32-aligned tail; determinism.
        #[test]
        fn encoding_length_law_and_determinism((types, values) in arb_args()) {
            let encoded = encode_arguments(&types, &values).unwrap();
            let head: usize = types.iter().map(|t| t.head_words() * 32).sum();
            prop_assert!(encoded.len() >= head);
            prop_assert_eq!((encoded.len() - head) % 32, 0);
            prop_assert_eq!(encoded.len() % 32, 0);
            let again = encode_arguments(&types, &values).unwrap();
            prop_assert_eq!(encoded, again);
        }

        // Offset validity: every dynamic head word points inside the blob
        // on a 32-byte boundary.
        #[test]
        fn dynamic_offsets_point_into_the_blob((types, values) in arb_args()) {
            let encoded = encode_arguments(&types, &values).unwrap();
            let mut slot = 0usize;
            for ty in &types {
                if ty.is_dynamic() {
                    let word = Word::from_big_endian(&encoded[slot * 32..(slot + 1) * 32]);
                    let offset = word.as_usize();
                    prop_assert!(offset < encoded.len() || encoded.len() == offset);
                    prop_assert!(offset <= encoded.len());
                    prop_assert_eq!(offset % 32, 0);
                }
                slot += ty.head_words();
            }
        }
    }

    #[test]
    fn parse_single_function() {
        let abi = parse_abi(
            r#"[{"type":"function","name":"f","inputs":[],"payable":false,"constant":false}]"#,
        )
        .unwrap();
        assert_eq!(abi.functions.len(), 1);
        assert_eq!(abi.functions[0].canonical_signature, "f()");
        assert!(!abi.has_fallback);
    }

    #[test]
    fn uint_canonicalizes_in_signature() {
        // The Parity wallet initializer; `uint` must canonicalize to uint256.
        let abi = parse_abi(
            r#"[{"type":"function","name":"initWallet","inputs":[
                {"type":"address[]"},{"type":"uint"},{"type":"uint"}],
                "payable":false,"constant":false}]"#,
        )
        .unwrap();
        assert_eq!(abi.functions[0].canonical_signature, "initWallet(address[],uint256,uint256)");
    }

    #[test]
    fn empty_abi() {
        let abi = parse_abi("[]").unwrap();
        assert!(abi.functions.is_empty());
        assert!(!abi.has_fallback);
    }

    #[test]
    fn fallback_and_constructor_entries() {
        let abi = parse_abi(
            r#"[{"type":"fallback","payable":true},
                {"type":"constructor","inputs":[{"type":"uint256"}]},
                {"type":"event","name":"E","inputs":[]}]"#,
        )
        .unwrap();
        assert!(abi.has_fallback);
        assert!(abi.fallback_payable);
        assert_eq!(abi.constructor_inputs, vec![AbiType::Uint(256)]);
        assert!(abi.functions.is_empty());
    }

    #[test]
    fn rejects_tuples_and_bad_sizes() {
        assert_eq!(AbiType::parse("tuple"), Err(AbiError::UnsupportedType("tuple".into())));
        assert!(AbiType::parse("uint7").is_err());
        assert!(AbiType::parse("bytes33").is_err());
        assert!(AbiType::parse("uint256[][]").is_err());
        let err = parse_abi(r#"[{"type":"function","name":"f","inputs":[{"type":"tuple"}]}]"#);
        assert_eq!(err, Err(AbiError::UnsupportedType("tuple".into())));
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(parse_abi("not json"), Err(AbiError::MalformedJson(_))));
    }

    #[test]
    fn selector_known_values() {
        assert_eq!(compute_selector("transfer(address,uint256)"), [0xa9, 0x05, 0x9c, 0xbb]);
        // Keccak-256("") = c5d24601..., so the empty signature selector is its prefix.
        assert_eq!(compute_selector(""), [0xc5, 0xd2, 0x46, 0x01]);
    }

    #[test]
    fn selector_determinism() {
        let a = compute_selector("f(uint256)");
        let b = compute_selector("f(uint256)");
        let c = compute_selector("g(uint256)");
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn encode_uint_padding() {
        let out =
            encode_arguments(&[AbiType::Uint(256)], &[AbiValue::Uint(Word::from(5u8))]).unwrap();
        let mut expected = vec![0u8; 32];
        expected[31] = 5;
        assert_eq!(out, expected);
    }

    #[test]
    fn encode_bool() {
        let out = encode_arguments(&[AbiType::Bool], &[AbiValue::Bool(true)]).unwrap();
        assert_eq!(out.len(), 32);
        assert_eq!(out[31], 1);
        assert!(out[..31].iter().all(|&b| b == 0));
    }

    #[test]
    fn encode_dynamic_bytes() {
        // head: offset 0x20; tail: length 2, then 0xDEAD right-padded; 96 bytes total.
        let out =
            encode_arguments(&[AbiType::Bytes], &[AbiValue::Bytes(vec![0xde, 0xad])]).unwrap();
        assert_eq!(out.len(), 96);
        assert_eq!(out[31], 0x20);
        assert_eq!(out[63], 2);
        assert_eq!(&out[64..66], &[0xde, 0xad]);
        assert!(out[66..].iter().all(|&b| b == 0));
    }

    #[test]
    fn encode_call_layouts() {
        let f = AbiFunction::new("f", vec![], false, false);
        assert_eq!(encode_call(&f, &[]).unwrap(), f.selector.to_vec());

        let f1 = AbiFunction::new("f", vec![AbiType::Uint(256)], false, false);
        let data = encode_call(&f1, &[AbiValue::Uint(Word::zero())]).unwrap();
        assert_eq!(data.len(), 36);
        assert!(data[4..].iter().all(|&b| b == 0));

        // initWallet([A], 1, 0): 4 + 3 head words + (length + one element) tail.
        let init = AbiFunction::new(
            "initWallet",
            vec![
                AbiType::DynArray(Box::new(AbiType::Address)),
                AbiType::Uint(256),
                AbiType::Uint(256),
            ],
            false,
            false,
        );
        let a = Address([0xaa; 20]);
        let data = encode_call(
            &init,
            &[
                AbiValue::Array(vec![AbiValue::Address(a)]),
                AbiValue::Uint(Word::one()),
                AbiValue::Uint(Word::zero()),
            ],
        )
        .unwrap();
        assert_eq!(data.len(), 4 + 3 * 32 + 32 + 32);
        // Offset head slot points at the tail start (3 * 32).
        assert_eq!(data[4 + 31], 96);
        // Array length 1 at the start of the tail.
        assert_eq!(data[4 + 96 + 31], 1);
        assert_eq!(&data[4 + 96 + 32 + 12..], &[0xaa; 20]);
    }

    #[test]
    fn encode_errors() {
        assert_eq!(
            encode_arguments(&[AbiType::Bool], &[]),
            Err(AbiError::ArityMismatch { expected: 1, got: 0 })
        );
        assert_eq!(
            encode_arguments(&[AbiType::Uint(8)], &[AbiValue::Uint(Word::from(256u16))]),
            Err(AbiError::ValueOutOfDomain("uint8".into()))
        );
        assert_eq!(
            encode_arguments(&[AbiType::FixedBytes(4)], &[AbiValue::FixedBytes(vec![1, 2])]),
            Err(AbiError::ValueOutOfDomain("bytes4".into()))
        );
    }

    #[test]
    fn int_domain_checks() {
        // -1 as 256-bit two's complement fits every int<M>.
        let minus_one = AbiValue::Int(Word::MAX);
        assert!(minus_one.matches(&AbiType::Int(8)));
        // 128 does not fit int8 (max 127).
        let v = AbiValue::Int(Word::from(128u8));
        assert!(!v.matches(&AbiType::Int(8)));
        assert!(v.matches(&AbiType::Int(16)));
    }

    #[test]
    fn selector_stability_for_parsed_functions() {
        let abi = parse_abi(
            r#"[{"type":"function","name":"swap","inputs":[{"type":"uint"},{"type":"bytes"}]},
                {"type":"function","name":"ping","inputs":[]}]"#,
        )
        .unwrap();
        for f in &abi.functions {
            assert_eq!(compute_selector(&f.canonical_signature), f.selector);
        }
    }

    #[test]
    fn fixed_array_inline_encoding() {
        let ty = AbiType::FixedArray(Box::new(AbiType::Uint(256)), 2);
        let out = encode_arguments(
            &[ty],
            &[AbiValue::Array(vec![AbiValue::Uint(Word::from(7u8)), AbiValue::Uint(Word::from(9u8))])],
        )
        .unwrap();
        assert_eq!(out.len(), 64);
        assert_eq!(out[31], 7);
        assert_eq!(out[63], 9);
    }
}
