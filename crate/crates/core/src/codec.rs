//! Reed-Muller codes RM(r, m): generator construction, encoding and
//! majority-logic (Reed) decoding.
//!
//! Rows of the generator are evaluation vectors of the monomials of degree
//! `<= r`, ordered by degree and then lexicographically by variable index.
//! Column `j` evaluates variable `x_i` (1-based `i`) as the complement of bit
//! `m - i` of `j`, which makes the RM(1,3) generator read
//!
//! ```text
//! 11111111
//! 11110000
//! 11001100
//! 10101010
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bits::{BitBlock, BitRole};
use crate::error::{Error, Result};

/// Largest `m` accepted by [`RmCode::new`].
pub const MAX_M: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeMode {
    /// Majority-logic correction of up to `(d_min - 1) / 2` errors.
    Correct,
    /// Flag any non-codeword; never alters the received block.
    DetectOnly,
}

impl std::str::FromStr for DecodeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "correct" => Ok(DecodeMode::Correct),
            "detect_only" | "detect-only" => Ok(DecodeMode::DetectOnly),
            other => Err(Error::InvalidParameter(format!("unknown decode mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeStatus {
    Clean,
    Corrected,
    DetectedUncorrectable,
}

impl std::fmt::Display for DecodeStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DecodeStatus::Clean => "clean",
            DecodeStatus::Corrected => "corrected",
            DecodeStatus::DetectedUncorrectable => "detected_uncorrectable",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    /// `None` iff the status is `DetectedUncorrectable`.
    pub decoded: Option<BitBlock>,
    pub status: DecodeStatus,
    /// 1-based codeword positions flipped by the decoder.
    pub corrected_positions: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RmCode {
    r: usize,
    m: usize,
    n: usize,
    k: usize,
    d_min: usize,
    /// One variable set (0-based indices) per generator row.
    monomials: Vec<Vec<usize>>,
    generator: Vec<Vec<u8>>,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All `d`-subsets of `0..m` in lexicographic order.
fn subsets_of_size(m: usize, d: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, d: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for v in start..m {
            cur.push(v);
            rec(v + 1, m, d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, d, &mut Vec::new(), &mut out);
    out
}

impl RmCode {
    pub fn new(r: usize, m: usize) -> Result<Self> {
        if m == 0 || m > MAX_M || r > m {
            return Err(Error::ParameterOutOfRange { r, m });
        }
        let n = 1usize << m;
        let monomials: Vec<Vec<usize>> = (0..=r).flat_map(|d| subsets_of_size(m, d)).collect();
        let k = (0..=r).map(|i| binomial(m, i)).sum();
        debug_assert_eq!(monomials.len(), k);
        let generator = monomials
            .iter()
            .map(|vars| {
                let mask = var_mask(m, vars);
                // x_i = 1 at column j iff bit (m-1-i) of j is clear
                (0..n).map(|j| u8::from(j & mask == 0)).collect()
            })
            .collect();
        Ok(RmCode {
            r,
            m,
            n,
            k,
            d_min: 1 << (m - r),
            monomials,
            generator,
        })
    }

    /// The RM(1,3) [8,4,4] code.
    pub fn rm13() -> Self {
        Self::new(1, 3).expect("RM(1,3) is in range")
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Block length `2^m`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Message length `sum_{i<=r} C(m, i)`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d_min(&self) -> usize {
        self.d_min
    }

    /// Guaranteed correction radius `(d_min - 1) / 2`.
    pub fn correction_radius(&self) -> usize {
        (self.d_min - 1) / 2
    }

    pub fn generator(&self) -> &[Vec<u8>] {
        &self.generator
    }

    /// Generator rows rendered as bit strings.
    pub fn generator_rows(&self) -> Vec<String> {
        self.generator
            .iter()
            .map(|row| row.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect())
            .collect()
    }

    fn check_len(&self, block: &BitBlock, expected: usize) -> Result<()> {
        if block.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: block.len(),
            });
        }
        Ok(())
    }

    /// `codeword = message * G mod 2`.
    pub fn encode(&self, message: &BitBlock) -> Result<BitBlock> {
        self.check_len(message, self.k)?;
        Ok(self.encode_bits(message.bits()))
    }

    fn encode_bits(&self, message: &[u8]) -> BitBlock {
        let mut out = vec![0u8; self.n];
        for (row, &bit) in self.generator.iter().zip(message) {
            if bit == 1 {
                for (o, g) in out.iter_mut().zip(row) {
                    *o ^= g;
                }
            }
        }
        BitBlock::codeword(out).expect("xor of bits is a bit")
    }

    pub fn is_codeword(&self, block: &BitBlock) -> Result<bool> {
        self.check_len(block, self.n)?;
        Ok(match self.reed_decode(block.bits()) {
            Some(msg) => self.encode_bits(&msg).bits() == block.bits(),
            None => false,
        })
    }

    pub fn decode(&self, received: &BitBlock, mode: DecodeMode) -> Result<DecodeOutcome> {
        self.check_len(received, self.n)?;
        let estimate = self.reed_decode(received.bits());
        let detected = DecodeOutcome {
            decoded: None,
            status: DecodeStatus::DetectedUncorrectable,
            corrected_positions: Vec::new(),
        };
        let Some(msg) = estimate else {
            return Ok(detected);
        };
        let reencoded = self.encode_bits(&msg);
        let positions = reencoded.diff_positions(received);
        let decoded = Some(BitBlock::message(msg).expect("decoded bits are bits"));
        Ok(match (positions.len(), mode) {
            (0, _) => DecodeOutcome {
                decoded,
                status: DecodeStatus::Clean,
                corrected_positions: positions,
            },
            (_, DecodeMode::DetectOnly) => detected,
            (w, DecodeMode::Correct) if w <= self.correction_radius() => DecodeOutcome {
                decoded,
                status: DecodeStatus::Corrected,
                corrected_positions: positions,
            },
            _ => detected,
        })
    }

    /// Reed's majority-logic decoder. Returns `None` when any vote ties.
    fn reed_decode(&self, received: &[u8]) -> Option<Vec<u8>> {
        let mut residual = received.to_vec();
        let mut msg = vec![0u8; self.k];
        // rows are grouped by degree; walk degrees from r down to 0
        for degree in (0..=self.r).rev() {
            let rows: Vec<usize> = (0..self.k).filter(|&i| self.monomials[i].len() == degree).collect();
            for &row in &rows {
                let mask = var_mask(self.m, &self.monomials[row]);
                let mut ones = 0usize;
                let mut total = 0usize;
                for base in (0..self.n).filter(|b| b & mask == 0) {
                    let mut parity = 0u8;
                    let mut sub = mask;
                    // enumerate every subset of `mask`, including the empty one
                    loop {
                        parity ^= residual[base | sub];
                        if sub == 0 {
                            break;
                        }
                        sub = (sub - 1) & mask;
                    }
                    ones += parity as usize;
                    total += 1;
                }
                if 2 * ones == total {
                    return None;
                }
                msg[row] = u8::from(2 * ones > total);
            }
            for &row in &rows {
                if msg[row] == 1 {
                    for (r, g) in residual.iter_mut().zip(&self.generator[row]) {
                        *r ^= g;
                    }
                }
            }
        }
        Some(msg)
    }

    /// Minimum nonzero codeword weight by enumerating all `2^k` messages.
    pub fn brute_force_min_distance(&self) -> Result<usize> {
        if self.k > 24 {
            return Err(Error::ResourceGuard(format!(
                "2^{} codewords is too many to enumerate",
                self.k
            )));
        }
        Ok((1u64..(1u64 << self.k))
            .map(|v| {
                let msg = BitBlock::from_u64(v, self.k, BitRole::Message);
                self.encode_bits(msg.bits()).weight()
            })
            .min()
            .unwrap_or(0))
    }

    /// Every message of this code, in increasing integer order.
    pub fn all_messages(&self) -> Result<Vec<BitBlock>> {
        if self.k > 20 {
            return Err(Error::ResourceGuard(format!("2^{} messages", self.k)));
        }
        Ok((0u64..(1u64 << self.k))
            .map(|v| BitBlock::from_u64(v, self.k, BitRole::Message))
            .collect())
    }
}

fn var_mask(m: usize, vars: &[usize]) -> usize {
    vars.iter().fold(0, |acc, &v| acc | (1 << (m - 1 - v)))
}

/// Literal per-bit XOR expressions of the RM(1,3) encoder.
///
/// Kept separate from the generator-matrix path so the two can check each
/// other, and so the gate-level simulator has a reference.
pub fn encode_xor_oracle(message: &BitBlock) -> Result<BitBlock> {
    if message.len() != 4 {
        return Err(Error::LengthMismatch {
            expected: 4,
            got: message.len(),
        });
    }
    let (m1, m2, m3, m4) = (message.bit(1), message.bit(2), message.bit(3), message.bit(4));
    BitBlock::codeword(vec![
        m1 ^ m2 ^ m3 ^ m4,
        m1 ^ m2 ^ m3,
        m1 ^ m2 ^ m4,
        m1 ^ m2,
        m1 ^ m3 ^ m4,
        m1 ^ m3,
        m1 ^ m4,
        m1,
    ])
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightCounts {
    /// Decoded to the transmitted message (clean or corrected).
    pub corrected_ok: u64,
    /// Decoder returned a message, but the wrong one.
    pub miscorrected: u64,
    pub detected: u64,
}

impl WeightCounts {
    pub fn total(&self) -> u64 {
        self.corrected_ok + self.miscorrected + self.detected
    }
}

/// Decodes every error pattern of weight `<= max_weight` on every codeword in
/// [`DecodeMode::Correct`] and tallies the outcomes per weight.
pub fn error_pattern_census(code: &RmCode, max_weight: usize) -> Result<BTreeMap<usize, WeightCounts>> {
    if code.n() > 16 || code.k() + code.n() > 26 {
        return Err(Error::ResourceGuard(format!(
            "exhaustive census of RM({},{}) needs 2^{} decodes",
            code.r(),
            code.m(),
            code.k() + code.n()
        )));
    }
    let max_weight = max_weight.min(code.n());
    let mut table: BTreeMap<usize, WeightCounts> = (0..=max_weight).map(|w| (w, WeightCounts::default())).collect();
    for msg in code.all_messages()? {
        let cw = code.encode(&msg)?;
        for pattern in 0u64..(1u64 << code.n()) {
            let w = pattern.count_ones() as usize;
            if w > max_weight {
                continue;
            }
            let err = BitBlock::from_u64(pattern, code.n(), BitRole::Codeword);
            let received = cw.xor(&err)?;
            let out = code.decode(&received, DecodeMode::Correct)?;
            let entry = table.get_mut(&w).expect("weight bucket exists");
            match out.decoded {
                None => entry.detected += 1,
                Some(ref d) if *d == msg => entry.corrected_ok += 1,
                Some(_) => entry.miscorrected += 1,
            }
        }
    }
    Ok(table)
}
