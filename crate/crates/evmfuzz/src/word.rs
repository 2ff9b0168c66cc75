//! Machine words and account addresses.

use std::fmt;

use serde::{Deserialize, Serialize};

/// 256-bit EVM machine word. All arithmetic wraps modulo 2^256.
pub type Word = primitive_types::U256;

/// Ether amounts are plain machine words.
pub type Wei = Word;

/// 20-byte account identifier. The zero address is reserved and never
/// assigned to a deployed account.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Address(pub [u8; 20]);

impl Address {
    pub const ZERO: Address = Address([0u8; 20]);

    pub fn from_slice(bytes: &[u8]) -> Address {
        let mut out = [0u8; 20];
        let n = bytes.len().min(20);
        out[20 - n..].copy_from_slice(&bytes[bytes.len() - n..]);
        Address(out)
    }

    /// Low 20 bytes of a word, the EVM convention for address-valued stack items.
    pub fn from_word(w: Word) -> Address {
        let buf = w.to_big_endian();
        let mut out = [0u8; 20];
        out.copy_from_slice(&buf[12..]);
        Address(out)
    }

    pub fn to_word(self) -> Word {
        Word::from_big_endian(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0u8; 20]
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Parses 40 hex digits, with or without a `0x` prefix, any case.
    pub fn parse(s: &str) -> Option<Address> {
        let s = s.strip_prefix("0x").unwrap_or(s);
        let bytes = hex::decode(s).ok()?;
        if bytes.len() != 20 {
            return None;
        }
        Some(Address::from_slice(&bytes))
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", hex::encode(self.0))
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Address {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Address {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Address::parse(&s).ok_or_else(|| serde::de::Error::custom("malformed address"))
    }
}

/// Signed less-than over the two's-complement interpretation of two words.
pub fn signed_lt(a: Word, b: Word) -> bool {
    let sa = a.bit(255);
    let sb = b.bit(255);
    match (sa, sb) {
        (true, false) => true,
        (false, true) => false,
        _ => a < b,
    }
}

/// EVM BYTE semantics: byte `i` of `x` counting from the most significant,
/// zero for i >= 32.
pub fn byte_of(i: Word, x: Word) -> Word {
    if i >= Word::from(32u8) {
        return Word::zero();
    }
    let buf = x.to_big_endian();
    Word::from(buf[i.as_usize()])
}

/// Decodes a hex string, tolerating a `0x` prefix, mixed case, and
/// surrounding whitespace.
pub fn decode_hex(s: &str) -> Result<Vec<u8>, hex::FromHexError> {
    let s = s.trim();
    let s = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
    hex::decode(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn address_from_word_round_trip() {
        let a = Address([0x11; 20]);
        assert_eq!(Address::from_word(a.to_word()), a);
    }

    #[test]
    fn address_parse_accepts_prefix_and_case() {
        let a = Address::parse("0x1111111111111111111111111111111111111111").unwrap();
        let b = Address::parse("1111111111111111111111111111111111111111").unwrap();
        let c = Address::parse("0x1111111111111111111111111111111111111111".to_uppercase().trim_start_matches("0X")).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert!(Address::parse("0x11").is_none());
    }

    #[test]
    fn signed_comparisons() {
        let minus_one = Word::MAX;
        let one = Word::one();
        assert!(signed_lt(minus_one, one));
        assert!(!signed_lt(one, minus_one));
        assert!(signed_lt(Word::zero(), one));
        assert!(!signed_lt(one, one));
    }

    #[test]
    fn byte_indexing() {
        let x = Word::from_big_endian(&{
            let mut b = [0u8; 32];
            b[0] = 0xab;
            b[31] = 0xcd;
            b
        });
        assert_eq!(byte_of(Word::zero(), x), Word::from(0xabu8));
        assert_eq!(byte_of(Word::from(31u8), x), Word::from(0xcdu8));
        assert_eq!(byte_of(Word::from(32u8), x), Word::zero());
    }
}
