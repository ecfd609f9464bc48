//! Positional Hamming codes with optional SECDED extension.
//!
//! Bit positions are numbered from 1. Positions that are powers of two carry
//! parity; all others carry data in ascending order. Parity bit `p` covers every
//! position `q` with `q & p != 0` and is chosen for even parity over its
//! covering set, so for a valid word the XOR of the positions of all set bits
//! is zero. After a single flip that XOR is the flipped position.
//!
//! The SECDED variant appends one overall parity bit at wire position `n + 1`.

use std::ops::Deref;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HammingError {
    #[error("a code needs at least one data bit")]
    NoDataBits,
    #[error("expected {expected} data bits, got {got}")]
    DataLength { expected: usize, got: usize },
    #[error("expected a {expected}-bit codeword, got {got} bits")]
    CodewordLength { expected: usize, got: usize },
    #[error("stream of {len} bits is not a multiple of the {word}-bit codeword")]
    StreamLength { len: usize, word: usize },
    #[error("payload of {payload_bits} bits exceeds stream capacity of {capacity} bits")]
    PayloadExceedsStream {
        payload_bits: usize,
        capacity: usize,
    },
}

/// Smallest `r` with `2^r >= k + r + 1`.
pub fn min_parity_bits(k: usize) -> usize {
    let mut r = 0usize;
    while (1u128 << r) < k as u128 + r as u128 + 1 {
        r += 1;
    }
    r
}

/// Per-word decode outcome. Positions are 1-based wire positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecodeStatus {
    NoError,
    Corrected(usize),
    DetectedUncorrectable,
}

/// Ordering used to aggregate statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Severity {
    #[default]
    NoError,
    Corrected,
    DetectedUncorrectable,
}

impl DecodeStatus {
    pub fn severity(self) -> Severity {
        match self {
            DecodeStatus::NoError => Severity::NoError,
            DecodeStatus::Corrected(_) => Severity::Corrected,
            DecodeStatus::DetectedUncorrectable => Severity::DetectedUncorrectable,
        }
    }
}

/// Aggregate of per-word statuses over a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DecodeReport {
    pub words: usize,
    pub corrected: usize,
    pub uncorrectable: usize,
    pub worst: Severity,
}

impl DecodeReport {
    pub fn record(&mut self, status: DecodeStatus) {
        self.words += 1;
        match status {
            DecodeStatus::NoError => {}
            DecodeStatus::Corrected(_) => self.corrected += 1,
            DecodeStatus::DetectedUncorrectable => self.uncorrectable += 1,
        }
        self.worst = self.worst.max(status.severity());
    }

    pub fn merge(&mut self, other: &DecodeReport) {
        self.words += other.words;
        self.corrected += other.corrected;
        self.uncorrectable += other.uncorrectable;
        self.worst = self.worst.max(other.worst);
    }
}

/// Wire bits of one codeword; index 0 is position 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Codeword(Vec<bool>);

impl Codeword {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Codeword(bits)
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    /// Flips the bit at 1-based `position`.
    pub fn flip(&mut self, position: usize) {
        self.0[position - 1] ^= true;
    }

    /// Bit at 1-based `position`.
    pub fn bit(&self, position: usize) -> bool {
        self.0[position - 1]
    }
}

impl Deref for Codeword {
    type Target = [bool];

    fn deref(&self) -> &[bool] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HammingCode {
    k: usize,
    r: usize,
    secded: bool,
    data_positions: Vec<usize>,
}

impl HammingCode {
    /// Single-error-correcting code for `k` data bits.
    pub fn new(k: usize, secded: bool) -> Result<Self, HammingError> {
        if k == 0 {
            return Err(HammingError::NoDataBits);
        }
        let r = min_parity_bits(k);
        let data_positions = (1..=k + r).filter(|p| !p.is_power_of_two()).collect();
        Ok(HammingCode {
            k,
            r,
            secded,
            data_positions,
        })
    }

    pub fn hamming_7_4() -> Self {
        HammingCode::new(4, false).unwrap()
    }

    pub fn secded_8_4() -> Self {
        HammingCode::new(4, true).unwrap()
    }

    /// The (12,8) code protecting packet headers byte by byte.
    pub fn header_12_8() -> Self {
        HammingCode::new(8, false).unwrap()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Hamming length `k + r`, excluding the SECDED bit.
    pub fn n(&self) -> usize {
        self.k + self.r
    }

    /// Correctable bits per word.
    pub fn t(&self) -> usize {
        1
    }

    pub fn is_secded(&self) -> bool {
        self.secded
    }

    /// Bits per codeword on the wire.
    pub fn wire_len(&self) -> usize {
        self.n() + self.secded as usize
    }

    pub fn parity_positions(&self) -> impl Iterator<Item = usize> {
        (0..self.r).map(|j| 1 << j)
    }

    pub fn data_positions(&self) -> &[usize] {
        &self.data_positions
    }

    pub fn encode(&self, data: &[bool]) -> Result<Codeword, HammingError> {
        if data.len() != self.k {
            return Err(HammingError::DataLength {
                expected: self.k,
                got: data.len(),
            });
        }
        let mut out = Vec::with_capacity(self.wire_len());
        self.encode_into(data, &mut out);
        Ok(Codeword(out))
    }

    fn encode_into(&self, data: &[bool], out: &mut Vec<bool>) {
        let start = out.len();
        out.resize(start + self.wire_len(), false);
        let word = &mut out[start..];
        let mut acc = 0usize;
        for (&pos, &bit) in self.data_positions.iter().zip(data) {
            word[pos - 1] = bit;
            if bit {
                acc ^= pos;
            }
        }
        for j in 0..self.r {
            word[(1 << j) - 1] = acc >> j & 1 == 1;
        }
        if self.secded {
            let n = self.n();
            word[n] = word[..n].iter().fold(false, |p, &b| p ^ b);
        }
    }

    fn check_len(&self, cw: &[bool]) -> Result<(), HammingError> {
        if cw.len() != self.wire_len() {
            return Err(HammingError::CodewordLength {
                expected: self.wire_len(),
                got: cw.len(),
            });
        }
        Ok(())
    }

    #[inline]
    fn syndrome_unchecked(&self, cw: &[bool]) -> usize {
        cw[..self.n()]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .fold(0, |acc, (i, _)| acc ^ (i + 1))
    }

    /// 0 for a valid word; otherwise the position named by the failing checks.
    pub fn syndrome(&self, cw: &[bool]) -> Result<usize, HammingError> {
        self.check_len(cw)?;
        Ok(self.syndrome_unchecked(cw))
    }

    /// Parity positions whose covering set has odd parity.
    pub fn failing_checks(&self, cw: &[bool]) -> Result<Vec<usize>, HammingError> {
        self.check_len(cw)?;
        let n = self.n();
        Ok(self
            .parity_positions()
            .filter(|&p| {
                (1..=n)
                    .filter(|q| q & p != 0)
                    .fold(false, |acc, q| acc ^ cw[q - 1])
            })
            .collect())
    }

    fn classify(&self, cw: &[bool]) -> DecodeStatus {
        let n = self.n();
        let syn = self.syndrome_unchecked(cw);
        if self.secded {
            let odd = cw.iter().fold(false, |p, &b| p ^ b);
            match (syn, odd) {
                (0, false) => DecodeStatus::NoError,
                (0, true) => DecodeStatus::Corrected(n + 1),
                (s, true) if s <= n => DecodeStatus::Corrected(s),
                _ => DecodeStatus::DetectedUncorrectable,
            }
        } else {
            match syn {
                0 => DecodeStatus::NoError,
                s if s <= n => DecodeStatus::Corrected(s),
                _ => DecodeStatus::DetectedUncorrectable,
            }
        }
    }

    fn extract_into(&self, cw: &[bool], status: DecodeStatus, out: &mut Vec<bool>) {
        let flip = match status {
            DecodeStatus::Corrected(p) => p,
            _ => 0,
        };
        out.extend(
            self.data_positions
                .iter()
                .map(|&pos| cw[pos - 1] ^ (pos == flip)),
        );
    }

    /// Corrects at most one error and returns the data bits.
    ///
    /// On `DetectedUncorrectable` the data positions are returned as received.
    pub fn decode(&self, cw: &[bool]) -> Result<(Vec<bool>, DecodeStatus), HammingError> {
        self.check_len(cw)?;
        let status = self.classify(cw);
        let mut data = Vec::with_capacity(self.k);
        self.extract_into(cw, status, &mut data);
        Ok((data, status))
    }

    /// Encodes `bits` in `k`-bit chunks, zero-padding the last chunk.
    pub fn encode_stream(&self, bits: &[bool]) -> Vec<bool> {
        let words = bits.len().div_ceil(self.k);
        let mut out = Vec::with_capacity(words * self.wire_len());
        let mut pad = vec![false; self.k];
        for chunk in bits.chunks(self.k) {
            if chunk.len() == self.k {
                self.encode_into(chunk, &mut out);
            } else {
                pad[..chunk.len()].copy_from_slice(chunk);
                pad[chunk.len()..].fill(false);
                self.encode_into(&pad, &mut out);
            }
        }
        out
    }

    /// Decodes a concatenation of codewords and truncates to `payload_bits`.
    pub fn decode_stream(
        &self,
        bits: &[bool],
        payload_bits: usize,
    ) -> Result<(Vec<bool>, DecodeReport), HammingError> {
        let word = self.wire_len();
        if !bits.len().is_multiple_of(word) {
            return Err(HammingError::StreamLength {
                len: bits.len(),
                word,
            });
        }
        let capacity = bits.len() / word * self.k;
        if payload_bits > capacity {
            return Err(HammingError::PayloadExceedsStream {
                payload_bits,
                capacity,
            });
        }
        let mut out = Vec::with_capacity(capacity);
        let mut report = DecodeReport::default();
        for cw in bits.chunks_exact(word) {
            let status = self.classify(cw);
            report.record(status);
            self.extract_into(cw, status, &mut out);
        }
        out.truncate(payload_bits);
        Ok((out, report))
    }
}
