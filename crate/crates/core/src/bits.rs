//! Bit blocks used as messages and codewords.
//!
//! Bit 1 is the leftmost, first-transmitted bit: `"1010"` is `m1=1, m2=0, m3=1, m4=0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BitRole {
    Message,
    Codeword,
}

/// An ordered block of bits, each stored as `0` or `1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitBlock {
    bits: Vec<u8>,
    role: BitRole,
}

impl BitBlock {
    pub fn new(bits: Vec<u8>, role: BitRole) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::MalformedBits(format!("bit value {b}")));
        }
        Ok(BitBlock { bits, role })
    }

    pub fn message(bits: Vec<u8>) -> Result<Self> {
        Self::new(bits, BitRole::Message)
    }

    pub fn codeword(bits: Vec<u8>) -> Result<Self> {
        Self::new(bits, BitRole::Codeword)
    }

    pub fn zeros(len: usize, role: BitRole) -> Self {
        BitBlock {
            bits: vec![0; len],
            role,
        }
    }

    /// Parses an ASCII bit string such as `"00110011"`.
    pub fn parse(s: &str, role: BitRole) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::MalformedBits(s.to_string())),
            })
            .collect::<Result<Vec<u8>>>()?;
        if bits.is_empty() {
            return Err(Error::MalformedBits(s.to_string()));
        }
        Ok(BitBlock { bits, role })
    }

    /// Builds a message from the low `len` bits of `value`, bit 1 being the most significant.
    pub fn from_u64(value: u64, len: usize, role: BitRole) -> Self {
        let bits = (0..len).map(|i| ((value >> (len - 1 - i)) & 1) as u8).collect();
        BitBlock { bits, role }
    }

    pub fn to_u64(&self) -> u64 {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn role(&self) -> BitRole {
        self.role
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// 1-based accessor matching the m1..m4 / c1..c8 notation.
    pub fn bit(&self, index: usize) -> u8 {
        self.bits[index - 1]
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn xor(&self, other: &BitBlock) -> Result<BitBlock> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect();
        Ok(BitBlock { bits, role: self.role })
    }

    pub fn flip(&mut self, index: usize) {
        self.bits[index - 1] ^= 1;
    }

    /// Hamming distance; panics on unequal lengths.
    pub fn distance(&self, other: &BitBlock) -> usize {
        assert_eq!(self.len(), other.len(), "distance between unequal blocks");
        self.bits.iter().zip(&other.bits).filter(|(a, b)| a != b).count()
    }

    /// 1-based positions where the blocks differ.
    pub fn diff_positions(&self, other: &BitBlock) -> Vec<usize> {
        self.bits
            .iter()
            .zip(&other.bits)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

impl fmt::Display for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            f.write_str(if *b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitBlock {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BitBlock::parse(s, BitRole::Message)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let b = BitBlock::parse("00110011", BitRole::Codeword).unwrap();
        assert_eq!(b.len(), 8);
        assert_eq!(b.bit(3), 1);
        assert_eq!(b.to_string(), "00110011");
        assert_eq!(b.weight(), 4);
    }

    #[test]
    fn rejects_garbage() {
        assert!(BitBlock::parse("10a1", BitRole::Message).is_err());
        assert!(BitBlock::parse("", BitRole::Message).is_err());
        assert!(BitBlock::message(vec![0, 2]).is_err());
    }

    #[test]
    fn u64_ordering_is_msb_first() {
        let b = BitBlock::from_u64(0b1010, 4, BitRole::Message);
        assert_eq!(b.to_string(), "1010");
        assert_eq!(b.to_u64(), 0b1010);
    }

    #[test]
    fn xor_requires_equal_length() {
        let a = BitBlock::parse("101", BitRole::Message).unwrap();
        let b = BitBlock::parse("1010", BitRole::Message).unwrap();
        assert!(matches!(a.xor(&b), Err(Error::LengthMismatch { .. })));
    }
}
