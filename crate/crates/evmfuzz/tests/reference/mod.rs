//! Independent reference oracles for the differential checks. Nothing here
//! calls into the crate's own hashing or encoding paths: Keccak-256 is
//! rebuilt from the permutation spec with derived constants, and the ABI
//! encoder recomputes the head/tail layout with up-front offset arithmetic.

use evmfuzz::abi::{AbiType, AbiValue};

// ---------------------------------------------------------------------------
// Keccak-256
// ---------------------------------------------------------------------------

/// Bit `t` of the LFSR sequence over x^8 + x^6 + x^5 + x^4 + 1.
fn rc_bit(t: usize) -> bool {
    if t.is_multiple_of(255) {
        return true;
    }
    let mut register: u16 = 1;
    for _ in 1..=(t % 255) {
        register <<= 1;
        if register & 0x100 != 0 {
            register ^= 0x171;
        }
    }
    register & 1 == 1
}

/// Round constants derived from the LFSR rather than a hardcoded table.
fn round_constant(round: usize) -> u64 {
    let mut constant = 0u64;
    for j in 0..7 {
        if rc_bit(j + 7 * round) {
            constant |= 1 << ((1usize << j) - 1);
        }
    }
    constant
}

/// Rotation offsets from the (1,0) pi-walk of the permutation definition.
fn rho_offsets() -> [[u32; 5]; 5] {
    let mut offsets = [[0u32; 5]; 5];
    let (mut x, mut y) = (1usize, 0usize);
    for t in 0..24u32 {
        offsets[x][y] = ((t + 1) * (t + 2) / 2) % 64;
        let next = (y, (2 * x + 3 * y) % 5);
        x = next.0;
        y = next.1;
    }
    offsets
}

fn keccak_f(state: &mut [[u64; 5]; 5]) {
    let rho = rho_offsets();
    for round in 0..24 {
        // theta
        let mut column = [0u64; 5];
        for x in 0..5 {
            column[x] = state[x][0]
                ^ state[x][1]
                ^ state[x][2]
                ^ state[x][3]
                ^ state[x][4];
        }
        for (x, lanes) in state.iter_mut().enumerate() {
            let d = column[(x + 4) % 5] ^ column[(x + 1) % 5].rotate_left(1);
            for lane in lanes.iter_mut() {
                *lane ^= d;
            }
        }
        // rho and pi
        let mut shuffled = [[0u64; 5]; 5];
        for x in 0..5 {
            for y in 0..5 {
                shuffled[y][(2 * x + 3 * y) % 5] = state[x][y].rotate_left(rho[x][y]);
            }
        }
        // chi
        for x in 0..5 {
            for y in 0..5 {
                state[x][y] =
                    shuffled[x][y] ^ (!shuffled[(x + 1) % 5][y] & shuffled[(x + 2) % 5][y]);
            }
        }
        // iota
        state[0][0] ^= round_constant(round);
    }
}

/// Keccak-256: rate 136 bytes, legacy 0x01 domain padding.
pub fn keccak256(message: &[u8]) -> [u8; 32] {
    const RATE: usize = 136;
    let mut padded = message.to_vec();
    padded.push(0x01);
    while !padded.len().is_multiple_of(RATE) {
        padded.push(0x00);
    }
    *padded.last_mut().expect("nonempty after padding") |= 0x80;

    let mut state = [[0u64; 5]; 5];
    for block in padded.chunks(RATE) {
        for (i, lane_bytes) in block.chunks(8).enumerate() {
            let lane = u64::from_le_bytes(lane_bytes.try_into().expect("8-byte lanes"));
            let (x, y) = (i % 5, i / 5);
            state[x][y] ^= lane;
        }
        keccak_f(&mut state);
    }

    let mut digest = [0u8; 32];
    for i in 0..4 {
        let (x, y) = (i % 5, i / 5);
        digest[8 * i..8 * i + 8].copy_from_slice(&state[x][y].to_le_bytes());
    }
    digest
}

// ---------------------------------------------------------------------------
// ABI encoding
// ---------------------------------------------------------------------------

fn is_dynamic(ty: &AbiType) -> bool {
    match ty {
        AbiType::Bytes | AbiType::String | AbiType::DynArray(_) => true,
        AbiType::FixedArray(elem, _) => is_dynamic(elem),
        _ => false,
    }
}

fn head_size(ty: &AbiType) -> usize {
    match ty {
        AbiType::FixedArray(elem, m) if !is_dynamic(ty) => m * head_size(elem),
        _ => 32,
    }
}

fn word_of_u64(v: u64) -> [u8; 32] {
    let mut out = [0u8; 32];
    out[24..].copy_from_slice(&v.to_be_bytes());
    out
}

fn static_words(ty: &AbiType, value: &AbiValue) -> Vec<u8> {
    match (ty, value) {
        (AbiType::Uint(_), AbiValue::Uint(v)) | (AbiType::Int(_), AbiValue::Int(v)) => {
            v.to_big_endian().to_vec()
        }
        (AbiType::Address, AbiValue::Address(a)) => {
            let mut out = vec![0u8; 32];
            out[12..].copy_from_slice(a.as_bytes());
            out
        }
        (AbiType::Bool, AbiValue::Bool(b)) => word_of_u64(u64::from(*b)).to_vec(),
        (AbiType::FixedBytes(m), AbiValue::FixedBytes(bytes)) => {
            assert_eq!(bytes.len(), *m);
            let mut out = vec![0u8; 32];
            out[..bytes.len()].copy_from_slice(bytes);
            out
        }
        (AbiType::FixedArray(elem, m), AbiValue::Array(items)) => {
            assert_eq!(items.len(), *m);
            items.iter().flat_map(|item| static_words(elem, item)).collect()
        }
        other => panic!("reference encoder: mismatched static pair {other:?}"),
    }
}

fn padded_blob(bytes: &[u8]) -> Vec<u8> {
    let mut out = word_of_u64(bytes.len() as u64).to_vec();
    out.extend_from_slice(bytes);
    out.resize(32 + bytes.len().div_ceil(32) * 32, 0);
    out
}

fn dynamic_tail(ty: &AbiType, value: &AbiValue) -> Vec<u8> {
    match (ty, value) {
        (AbiType::Bytes, AbiValue::Bytes(bytes)) => padded_blob(bytes),
        (AbiType::String, AbiValue::String(s)) => padded_blob(s.as_bytes()),
        (AbiType::DynArray(elem), AbiValue::Array(items)) => {
            let mut out = word_of_u64(items.len() as u64).to_vec();
            for item in items {
                out.extend_from_slice(&static_words(elem, item));
            }
            out
        }
        other => panic!("reference encoder: mismatched dynamic pair {other:?}"),
    }
}

/// Head/tail layout recomputed independently: tail offsets are derived
/// arithmetically in a first pass, then both regions are emitted.
pub fn encode_arguments(types: &[AbiType], values: &[AbiValue]) -> Vec<u8> {
    assert_eq!(types.len(), values.len());
    let head_total: usize = types.iter().map(head_size).sum();

    let tails: Vec<Option<Vec<u8>>> = types
        .iter()
        .zip(values)
        .map(|(ty, value)| is_dynamic(ty).then(|| dynamic_tail(ty, value)))
        .collect();

    let mut offsets = Vec::with_capacity(types.len());
    let mut running = head_total;
    for tail in &tails {
        offsets.push(running);
        if let Some(tail) = tail {
            running += tail.len();
        }
    }

    let mut out = Vec::with_capacity(running);
    for ((ty, value), (tail, offset)) in
        types.iter().zip(values).zip(tails.iter().zip(&offsets))
    {
        match tail {
            Some(_) => out.extend_from_slice(&word_of_u64(*offset as u64)),
            None => out.extend_from_slice(&static_words(ty, value)),
        }
    }
    for tail in tails.iter().flatten() {
        out.extend_from_slice(tail);
    }
    out
}
