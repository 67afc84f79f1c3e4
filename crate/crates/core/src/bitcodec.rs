//! Conversion between bit sequences and `x`-bit group values for one level.

use crate::bitseq::BitSeq;
use crate::error::{Error, Result};

/// Bit sequence read as `x`-bit MSB-first groups, zero-padded to a whole
/// number of `n`-value chunks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupedSeq {
    pub values: Vec<u64>,
    pub width: u32,
    pub orig_bit_len: usize,
}

impl GroupedSeq {
    /// Largest representable group value, `2^x - 1`.
    pub fn max_value(&self) -> u64 {
        max_group_value(self.width)
    }
}

#[inline]
pub(crate) fn max_group_value(width: u32) -> u64 {
    (1u64 << width) - 1
}

/// Number of groups after padding `bit_len` bits to whole `n`-chunks of `x`-bit groups.
pub fn padded_group_count(bit_len: u64, width: u32, order: usize) -> u64 {
    let groups = bit_len.div_ceil(width as u64);
    groups.div_ceil(order as u64) * order as u64
}

pub fn pad_and_group(bits: &BitSeq, width: u32, order: usize) -> GroupedSeq {
    debug_assert!(width >= 2 && order.is_power_of_two());
    let total = padded_group_count(bits.len() as u64, width, order) as usize;
    let w = width as usize;
    let values = (0..total).map(|g| bits.read_bits(g * w, width)).collect();
    GroupedSeq {
        values,
        width,
        orig_bit_len: bits.len(),
    }
}

/// Sorted group positions whose value is `2^x - 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SentinelSet {
    indices: Vec<u32>,
}

impl SentinelSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set from indices that must be strictly ascending.
    pub fn from_sorted(indices: Vec<u32>) -> Option<Self> {
        if indices.windows(2).all(|w| w[0] < w[1]) {
            Some(Self { indices })
        } else {
            None
        }
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: u32) -> bool {
        self.indices.binary_search(&index).is_ok()
    }
}

pub fn detect_sentinels(g: &GroupedSeq) -> SentinelSet {
    let max = g.max_value();
    let indices = g
        .values
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v == max)
        .map(|(i, _)| i as u32)
        .collect();
    SentinelSet { indices }
}

/// Writes `2^x - 1` back at every sentinel position. Each such position must hold 0.
pub fn restore_sentinels(values: &[u64], s: &SentinelSet, width: u32) -> Result<Vec<u64>> {
    let mut out = values.to_vec();
    let conflicts = restore_in_place(&mut out, s, width);
    match conflicts.first() {
        Some(&index) => Err(Error::SentinelConflict {
            index,
            value: values[index],
        }),
        None => Ok(out),
    }
}

/// Restores every sentinel that holds 0 and returns the positions that did not.
/// Indices beyond `values` are reported as conflicts too.
pub(crate) fn restore_in_place(values: &mut [u64], s: &SentinelSet, width: u32) -> Vec<usize> {
    let max = max_group_value(width);
    let mut conflicts = Vec::new();
    for &i in s.indices() {
        match values.get_mut(i as usize) {
            Some(v) if *v == 0 => *v = max,
            _ => conflicts.push(i as usize),
        }
    }
    conflicts
}

pub fn ungroup(values: &[u64], width: u32) -> Result<BitSeq> {
    let max = max_group_value(width);
    let mut out = BitSeq::with_capacity(values.len() * width as usize);
    for &v in values {
        if v > max {
            return Err(Error::ValueOverflow { value: v, width });
        }
        out.push_bits(v, width);
    }
    Ok(out)
}

/// Drops padding past `orig_bit_len`. Every discarded bit must be zero.
pub fn truncate(bits: &BitSeq, orig_bit_len: usize) -> Result<BitSeq> {
    if orig_bit_len > bits.len() {
        return Err(Error::LengthUnderflow {
            requested: orig_bit_len,
            available: bits.len(),
        });
    }
    if let Some(index) = bits.first_one_from(orig_bit_len) {
        return Err(Error::NonZeroPadding { index });
    }
    let mut out = bits.clone();
    out.truncate(orig_bit_len);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(s: &str) -> BitSeq {
        BitSeq::parse_text(s).unwrap()
    }

    #[test]
    fn groups_reference_vector() {
        let g = pad_and_group(&bits("110010011101111110000011"), 3, 8);
        assert_eq!(g.values, [6, 2, 3, 5, 7, 6, 0, 3]);
        assert_eq!(g.orig_bit_len, 24);

        let g = pad_and_group(&bits("100000011011000100100010"), 5, 8);
        assert_eq!(g.values, [16, 6, 24, 18, 4, 0, 0, 0]);
        assert_eq!(g.orig_bit_len, 24);
        assert_eq!(ungroup(&g.values, 5).unwrap().len(), 40);

        let g = pad_and_group(&BitSeq::new(), 3, 8);
        assert!(g.values.is_empty());
        assert_eq!(g.orig_bit_len, 0);
    }

    #[test]
    fn padding_spans_several_chunks() {
        // 9 groups of 3 bits -> two chunks of 8.
        let g = pad_and_group(&BitSeq::zeros(25), 3, 8);
        assert_eq!(g.values.len(), 16);
        assert_eq!(padded_group_count(25, 3, 8), 16);
        assert_eq!(padded_group_count(0, 3, 8), 0);
        assert_eq!(padded_group_count(1, 31, 128), 128);
    }

    #[test]
    fn sentinels() {
        let g = GroupedSeq { values: vec![6, 2, 3, 5, 7, 6, 0, 3], width: 3, orig_bit_len: 24 };
        assert_eq!(detect_sentinels(&g).indices(), [4]);
        let g = GroupedSeq { values: vec![16, 6, 24, 18, 4, 0, 0, 0], width: 5, orig_bit_len: 24 };
        assert!(detect_sentinels(&g).is_empty());
        let g = GroupedSeq { values: vec![7; 8], width: 3, orig_bit_len: 24 };
        assert_eq!(detect_sentinels(&g).indices(), [0, 1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn restore() {
        let s = SentinelSet::from_sorted(vec![4]).unwrap();
        assert_eq!(
            restore_sentinels(&[6, 2, 3, 5, 0, 6, 0, 3], &s, 3).unwrap(),
            [6, 2, 3, 5, 7, 6, 0, 3]
        );
        assert_eq!(restore_sentinels(&[1, 2], &SentinelSet::new(), 3).unwrap(), [1, 2]);
        let s = SentinelSet::from_sorted(vec![0]).unwrap();
        assert_eq!(
            restore_sentinels(&[1, 0], &s, 3),
            Err(Error::SentinelConflict { index: 0, value: 1 })
        );
    }

    #[test]
    fn from_sorted_rejects_disorder() {
        assert!(SentinelSet::from_sorted(vec![1, 1]).is_none());
        assert!(SentinelSet::from_sorted(vec![3, 2]).is_none());
        assert!(SentinelSet::from_sorted(vec![]).is_some());
    }

    #[test]
    fn ungroup_examples() {
        assert_eq!(
            ungroup(&[4, 0, 3, 3, 0, 4, 4, 2], 3).unwrap().to_text(),
            "100000011011000100100010"
        );
        assert_eq!(
            ungroup(&[6, 20, 15, 8, 29, 12, 7, 0], 5).unwrap().to_text(),
            "0011010100011110100011101011000011100000"
        );
        assert_eq!(ungroup(&[0], 3).unwrap().to_text(), "000");
        assert_eq!(ungroup(&[8], 3), Err(Error::ValueOverflow { value: 8, width: 3 }));
    }

    #[test]
    fn truncate_examples() {
        let padded = bits("1000000110110001001000100000000000000000");
        assert_eq!(truncate(&padded, 24).unwrap().to_text(), "100000011011000100100010");
        assert_eq!(truncate(&padded, 40).unwrap(), padded);
        assert_eq!(truncate(&bits("1010"), 2), Err(Error::NonZeroPadding { index: 2 }));
        assert_eq!(
            truncate(&bits("10"), 3),
            Err(Error::LengthUnderflow { requested: 3, available: 2 })
        );
    }

    proptest! {
        #[test]
        fn group_round_trip(
            raw in prop::collection::vec(any::<bool>(), 0..600),
            width in prop::sample::select(vec![2u32, 3, 5, 7, 13]),
            order in prop::sample::select(vec![8usize, 16, 32]),
        ) {
            let b: BitSeq = raw.into_iter().collect();
            let g = pad_and_group(&b, width, order);
            prop_assert_eq!(g.values.len() % order, 0);
            prop_assert_eq!(g.values.is_empty(), b.is_empty());
            let back = truncate(&ungroup(&g.values, width).unwrap(), b.len()).unwrap();
            prop_assert_eq!(back, b);
        }

        #[test]
        fn sentinel_round_trip(values in prop::collection::vec(0u64..=7, 0..64)) {
            let g = GroupedSeq { values: values.clone(), width: 3, orig_bit_len: values.len() * 3 };
            let s = detect_sentinels(&g);
            let reduced: Vec<u64> = values.iter().map(|v| v % 7).collect();
            prop_assert_eq!(restore_sentinels(&reduced, &s, 3).unwrap(), values);
        }

        #[test]
        fn ungroup_then_group(values in prop::collection::vec(0u64..32, 0..16)) {
            let mut padded = values.clone();
            padded.resize(values.len().div_ceil(8) * 8, 0);
            let b = ungroup(&values, 5).unwrap();
            prop_assert_eq!(pad_and_group(&b, 5, 8).values, padded);
        }
    }
}
