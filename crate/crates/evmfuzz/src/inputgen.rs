//! Fuzz input generation: candidate values per ABI type, the per-function
//! call pool (3 caller kinds x 2 value modes x k argument tuples), and
//! randomized call selection.

use rand::Rng;
use thiserror::Error;

use crate::abi::{encode_call, AbiFunction, AbiType, AbiValue, ContractAbi};
use crate::analysis::{SelectorIndex, SelectorUsage};
use crate::word::{Address, Wei, Word};

#[derive(Debug, Error, PartialEq)]
pub enum InputGenError {
    #[error("call pool is empty")]
    EmptyPool,
}

/// The three account kinds the fuzzer calls from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CallerKind {
    Creator,
    PlainEoa,
    Agent,
}

pub const CALLER_KINDS: [CallerKind; 3] = [CallerKind::Creator, CallerKind::PlainEoa, CallerKind::Agent];

/// Well-known session accounts used as address candidates.
#[derive(Debug, Clone, Copy)]
pub struct AddressEnv {
    pub creator: Address,
    pub plain_eoa: Address,
    pub agent: Address,
}

impl AddressEnv {
    pub fn resolve(&self, kind: CallerKind) -> Address {
        match kind {
            CallerKind::Creator => self.creator,
            CallerKind::PlainEoa => self.plain_eoa,
            CallerKind::Agent => self.agent,
        }
    }
}

/// Balance of each caller at pool-build time plus the draw divisor, used
/// to bound value draws.
#[derive(Debug, Clone, Copy)]
pub struct CallerBalances {
    pub creator: Wei,
    pub plain_eoa: Wei,
    pub agent: Wei,
    /// Value draws stay below balance / divisor.
    pub value_divisor: u64,
}

impl CallerBalances {
    pub fn new(creator: Wei, plain_eoa: Wei, agent: Wei) -> CallerBalances {
        CallerBalances { creator, plain_eoa, agent, value_divisor: 16 }
    }

    fn of(&self, kind: CallerKind) -> Wei {
        match kind {
            CallerKind::Creator => self.creator,
            CallerKind::PlainEoa => self.plain_eoa,
            CallerKind::Agent => self.agent,
        }
    }
}

/// One generated invocation.
#[derive(Debug, Clone)]
pub struct FuzzCall {
    pub caller_kind: CallerKind,
    pub target: Address,
    /// Absent for fallback invocations.
    pub function: Option<AbiFunction>,
    pub calldata: Vec<u8>,
    pub value: Wei,
    pub gas_budget: u64,
}

/// Candidate values for one argument position.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub ty: AbiType,
    pub values: Vec<AbiValue>,
}

/// Boundary seed values merged into every candidate set.
fn seed_values(ty: &AbiType) -> Vec<AbiValue> {
    match ty {
        AbiType::Uint(m) => {
            let max = if *m == 256 { Word::MAX } else { (Word::one() << *m) - Word::one() };
            vec![
                AbiValue::Uint(Word::zero()),
                AbiValue::Uint(Word::one()),
                AbiValue::Uint(Word::from(2u8)),
                AbiValue::Uint(max),
                AbiValue::Uint(max - Word::one()),
            ]
        }
        AbiType::Int(m) => {
            // Two's complement in M bits, sign-extended to the full word.
            let min = Word::MAX << (*m - 1);
            let max = (Word::one() << (*m - 1)) - Word::one();
            vec![
                AbiValue::Int(min),
                AbiValue::Int(Word::MAX), // -1
                AbiValue::Int(Word::zero()),
                AbiValue::Int(Word::one()),
                AbiValue::Int(max),
            ]
        }
        AbiType::Bool => vec![AbiValue::Bool(true), AbiValue::Bool(false)],
        AbiType::FixedBytes(m) => {
            vec![AbiValue::FixedBytes(vec![0u8; *m]), AbiValue::FixedBytes(vec![0xffu8; *m])]
        }
        _ => Vec::new(),
    }
}

fn random_word(rng: &mut impl Rng) -> Word {
    let mut bytes = [0u8; 32];
    rng.fill(&mut bytes);
    Word::from_big_endian(&bytes)
}

fn random_value(
    ty: &AbiType,
    addresses: &[Address],
    rng: &mut impl Rng,
) -> AbiValue {
    match ty {
        AbiType::Uint(m) => {
            let mut v = random_word(rng);
            if *m < 256 {
                v &= (Word::one() << *m) - Word::one();
            }
            AbiValue::Uint(v)
        }
        AbiType::Int(m) => {
            let mut v = random_word(rng);
            if *m < 256 {
                v &= (Word::one() << *m) - Word::one();
                if v.bit(*m - 1) {
                    v |= Word::MAX << *m;
                }
            }
            AbiValue::Int(v)
        }
        AbiType::Address => {
            let pick = rng.random_range(0..addresses.len());
            AbiValue::Address(addresses[pick])
        }
        AbiType::Bool => AbiValue::Bool(rng.random()),
        AbiType::FixedBytes(m) => {
            let mut bytes = vec![0u8; *m];
            rng.fill(bytes.as_mut_slice());
            AbiValue::FixedBytes(bytes)
        }
        AbiType::Bytes => {
            let len = rng.random_range(1..=64usize);
            let mut bytes = vec![0u8; len];
            rng.fill(bytes.as_mut_slice());
            AbiValue::Bytes(bytes)
        }
        AbiType::String => {
            let len = rng.random_range(1..=64usize);
            let s: String =
                (0..len).map(|_| char::from(rng.random_range(b'a'..=b'z'))).collect();
            AbiValue::String(s)
        }
        AbiType::FixedArray(elem, m) => {
            AbiValue::Array((0..*m).map(|_| random_value(elem, addresses, rng)).collect())
        }
        AbiType::DynArray(elem) => {
            let len = rng.random_range(1..=64usize);
            AbiValue::Array((0..len).map(|_| random_value(elem, addresses, rng)).collect())
        }
    }
}

/// Builds k candidate values for one argument: boundary seeds first, the
/// rest drawn uniformly from the type's domain. Address candidates come
/// from the function's private contract pool plus the fuzzer's own
/// accounts; an empty pool falls back to those accounts and zero.
pub fn generate_candidates(
    ty: &AbiType,
    pool: &[Address],
    env: &AddressEnv,
    rng: &mut impl Rng,
    k: usize,
) -> CandidateSet {
    let mut addresses: Vec<Address> = pool.to_vec();
    addresses.push(env.creator);
    addresses.push(env.plain_eoa);
    addresses.push(env.agent);
    if pool.is_empty() {
        addresses.push(Address::ZERO);
    }

    let mut values = seed_values(ty);
    values.truncate(k);
    while values.len() < k {
        values.push(random_value(ty, &addresses, rng));
    }
    CandidateSet { ty: ty.clone(), values }
}

/// Contracts an ABI function can meaningfully interact with: every corpus
/// contract exposing one of the selectors found in the function's body,
/// excluding the contract under test itself.
pub fn build_private_pool(
    fn_abi: &AbiFunction,
    usage: &SelectorUsage,
    index: &SelectorIndex,
    under_test: Address,
) -> Vec<Address> {
    let mut pool = Vec::new();
    if let Some(selectors) = usage.selectors_for(fn_abi) {
        for selector in selectors {
            for &address in index.addresses_for(*selector) {
                if address != under_test && !pool.contains(&address) {
                    pool.push(address);
                }
            }
        }
    }
    pool
}

/// Number of calls the pool must contain for this ABI.
pub fn expected_pool_size(abi: &ContractAbi, k: usize) -> usize {
    let mut size = 0;
    for fn_abi in &abi.functions {
        size += if fn_abi.inputs.is_empty() { 6 } else { 6 * k };
    }
    if abi.has_fallback {
        size += 6;
    }
    size
}

/// Builds the merged call pool for one contract: per function with
/// arguments, k argument tuples times 3 caller kinds times 2 value modes;
/// 6 calls for argument-less functions; 6 empty-calldata fallback
/// invocations when a fallback exists.
#[allow(clippy::too_many_arguments)]
pub fn generate_call_pool(
    contract: Address,
    abi: &ContractAbi,
    pools: &std::collections::BTreeMap<String, Vec<Address>>,
    env: &AddressEnv,
    balances: &CallerBalances,
    rng: &mut impl Rng,
    k: usize,
    gas_budget: u64,
) -> Vec<FuzzCall> {
    let mut out = Vec::new();
    for fn_abi in &abi.functions {
        let tuples: Vec<Vec<AbiValue>> = if fn_abi.inputs.is_empty() {
            vec![Vec::new()]
        } else {
            let empty = Vec::new();
            let pool = pools.get(&fn_abi.canonical_signature).unwrap_or(&empty);
            let candidates: Vec<CandidateSet> = fn_abi
                .inputs
                .iter()
                .map(|ty| generate_candidates(ty, pool, env, rng, k))
                .collect();
            (0..k)
                .map(|i| candidates.iter().map(|c| c.values[i].clone()).collect())
                .collect()
        };
        for tuple in &tuples {
            let calldata = encode_call(fn_abi, tuple)
                .expect("generated values always lie in their type's domain");
            push_caller_value_matrix(
                &mut out,
                contract,
                Some(fn_abi.clone()),
                calldata,
                env,
                balances,
                rng,
                gas_budget,
            );
        }
    }
    if abi.has_fallback {
        push_caller_value_matrix(&mut out, contract, None, Vec::new(), env, balances, rng, gas_budget);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn push_caller_value_matrix(
    out: &mut Vec<FuzzCall>,
    target: Address,
    function: Option<AbiFunction>,
    calldata: Vec<u8>,
    _env: &AddressEnv,
    balances: &CallerBalances,
    rng: &mut impl Rng,
    gas_budget: u64,
) {
    for caller_kind in CALLER_KINDS {
        for with_value in [false, true] {
            let value = if with_value {
                draw_value(balances.of(caller_kind), balances.value_divisor, rng)
            } else {
                Word::zero()
            };
            out.push(FuzzCall {
                caller_kind,
                target,
                function: function.clone(),
                calldata: calldata.clone(),
                value,
                gas_budget,
            });
        }
    }
}

/// Nonzero transfer amount: uniform in [1, balance/divisor], so repeated
/// value-bearing calls cannot bankrupt the caller mid-session.
pub fn draw_value(balance: Wei, divisor: u64, rng: &mut impl Rng) -> Wei {
    let cap = balance / Word::from(divisor.max(1));
    let cap = if cap > Word::from(u64::MAX) { u64::MAX } else { cap.low_u64() };
    if cap <= 1 {
        return Word::one();
    }
    Word::from(rng.random_range(1..=cap))
}

/// Uniform selection with replacement.
pub fn select_next_call<'p>(
    pool: &'p [FuzzCall],
    rng: &mut impl Rng,
) -> Result<&'p FuzzCall, InputGenError> {
    if pool.is_empty() {
        return Err(InputGenError::EmptyPool);
    }
    Ok(&pool[rng.random_range(0..pool.len())])
}
