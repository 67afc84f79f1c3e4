use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A bit sequence with an exact length, stored MSB-first in bytes.
///
/// Bits past `len` in the last byte are always zero.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitSeq {
    bytes: Vec<u8>,
    len: usize,
}

impl BitSeq {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            bytes: vec![0; len.div_ceil(8)],
            len,
        }
    }

    /// Every bit of `bytes`, MSB-first.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        Self {
            bytes: bytes.to_vec(),
            len: bytes.len() * 8,
        }
    }

    /// Packed storage with an explicit bit length. Fill bits must be zero.
    pub fn from_packed(bytes: Vec<u8>, len: usize) -> Option<Self> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        let seq = Self { bytes, len };
        if seq.fill_is_zero() {
            Some(seq)
        } else {
            None
        }
    }

    /// Parses an ASCII string of `'0'` and `'1'`.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut seq = Self::with_capacity(text.len());
        for (position, c) in text.chars().enumerate() {
            match c {
                '0' => seq.push(false),
                '1' => seq.push(true),
                found => return Err(Error::InvalidBitChar { position, found }),
            }
        }
        Ok(seq)
    }

    fn fill_is_zero(&self) -> bool {
        let rem = self.len % 8;
        rem == 0 || self.bytes.last().is_none_or(|b| b & (0xff >> rem) == 0)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed bytes, zero-filled after the last bit.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.bytes[i / 8] >> (7 - i % 8) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 0x80u8 >> (i % 8);
        if bit {
            self.bytes[i / 8] |= mask;
        } else {
            self.bytes[i / 8] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let b = self.get(i);
        self.set(i, !b);
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        self.len += 1;
        if bit {
            self.set(self.len - 1, true);
        }
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        for k in (0..width).rev() {
            self.push(value >> k & 1 == 1);
        }
    }

    /// Reads `width` bits starting at `start` as an MSB-first integer.
    /// Positions at or past the end read as zero.
    pub fn read_bits(&self, start: usize, width: u32) -> u64 {
        (0..width as usize).fold(0u64, |acc, k| {
            let i = start + k;
            (acc << 1) | u64::from(i < self.len && self.get(i))
        })
    }

    /// Keeps the first `len` bits.
    pub fn truncate(&mut self, len: usize) {
        if len >= self.len {
            return;
        }
        self.len = len;
        self.bytes.truncate(len.div_ceil(8));
        let rem = len % 8;
        if rem != 0 {
            if let Some(last) = self.bytes.last_mut() {
                *last &= 0xff << (8 - rem);
            }
        }
    }

    /// Zero-extends to `len` bits. No-op if already at least that long.
    pub fn resize_zero(&mut self, len: usize) {
        if len > self.len {
            self.bytes.resize(len.div_ceil(8), 0);
            self.len = len;
        }
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Index of the first set bit at or after `from`, if any.
    pub fn first_one_from(&self, from: usize) -> Option<usize> {
        (from..self.len).find(|&i| self.get(i))
    }

    /// `'0'`/`'1'` text form.
    pub fn to_text(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Lowercase hex of the packed bytes.
    pub fn to_hex(&self) -> String {
        self.bytes.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSeq({}; {})", self.len, self.to_text())
    }
}

impl FromStr for BitSeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_text(s)
    }
}

impl FromIterator<bool> for BitSeq {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut seq = Self::new();
        for b in iter {
            seq.push(b);
        }
        seq
    }
}
