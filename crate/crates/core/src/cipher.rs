//! Multi-level encryption, decryption and hashing.
//!
//! Each key exponent `x` drives one level: group the running bits into `x`-bit
//! values, pad to whole chunks of `n` values, record the positions holding
//! `2^x - 1`, transform each chunk with the mod-`(2^x - 1)` Hadamard matrix and
//! write the residues back out as `x`-bit groups. Decryption walks the levels
//! backwards using the lengths and sentinel sets carried in the envelope.

use std::fmt;
use std::str::FromStr;

use crate::bitcodec::{self, padded_group_count, SentinelSet};
use crate::bitseq::BitSeq;
use crate::error::{EnvelopeDefect, Error, Result};
use crate::hadamard::{HadamardSpec, SUPPORTED_ORDERS};
use crate::modmath::{validate_key_element, ModulusParams};
use crate::par::{self, Direction};

/// Envelopes store the level count in one byte.
pub const MAX_LEVELS: usize = u8::MAX as usize;

/// Ordered list of level exponents. Encryption applies them first to last.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KeySchedule {
    levels: Vec<ModulusParams>,
}

impl KeySchedule {
    pub fn new(exponents: &[u64]) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::EmptyKey);
        }
        if exponents.len() > MAX_LEVELS {
            return Err(Error::KeyTooLong(exponents.len()));
        }
        let levels = exponents
            .iter()
            .map(|&x| validate_key_element(x))
            .collect::<Result<_>>()?;
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[ModulusParams] {
        &self.levels
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.levels.iter().map(ModulusParams::exponent).collect()
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

impl FromStr for KeySchedule {
    type Err = Error;

    /// Parses `"3,5"` style lists. Surrounding braces and spaces are ignored.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('{').trim_end_matches('}');
        if body.trim().is_empty() {
            return Err(Error::EmptyKey);
        }
        let exponents = body
            .split(',')
            .map(|part| {
                let part = part.trim();
                part.parse::<u64>()
                    .map_err(|_| Error::KeySyntax(format!("{part:?} is not a non-negative integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&exponents)
    }
}

impl fmt::Display for KeySchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.exponents().iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// Number of group values transformed together by one matrix application.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockOrder(usize);

impl BlockOrder {
    pub fn new(n: usize) -> Result<Self> {
        if SUPPORTED_ORDERS.contains(&n) {
            Ok(Self(n))
        } else {
            Err(Error::UnsupportedBlockOrder(n))
        }
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }
}

impl Default for BlockOrder {
    fn default() -> Self {
        Self(8)
    }
}

/// What the decryptor needs to undo one level.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelRecord {
    pub exponent: u32,
    /// Bit length of this level's input before padding.
    pub orig_bit_len: u64,
    pub sentinels: SentinelSet,
}

impl LevelRecord {
    pub fn padded_groups(&self, order: BlockOrder) -> u64 {
        padded_group_count(self.orig_bit_len, self.exponent, order.get())
    }

    /// Bit length this level emits.
    pub fn output_bit_len(&self, order: BlockOrder) -> u64 {
        self.padded_groups(order) * self.exponent as u64
    }
}

/// Self-contained ciphertext: block order, per-level records and payload bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CipherEnvelope {
    pub block_order: BlockOrder,
    pub levels: Vec<LevelRecord>,
    pub payload: BitSeq,
}

impl CipherEnvelope {
    /// Cross-checks lengths, exponents and sentinel ranges.
    pub fn validate(&self) -> std::result::Result<(), EnvelopeDefect> {
        if self.levels.is_empty() {
            return Err(EnvelopeDefect::NoLevels);
        }
        let mut expected_input: Option<u64> = None;
        for (level, rec) in self.levels.iter().enumerate() {
            if validate_key_element(rec.exponent as u64).is_err() {
                return Err(EnvelopeDefect::InvalidExponent {
                    level,
                    exponent: rec.exponent.min(u8::MAX as u32) as u8,
                });
            }
            if let Some(expected) = expected_input {
                if rec.orig_bit_len != expected {
                    return Err(EnvelopeDefect::LevelLengthMismatch {
                        level,
                        expected,
                        found: rec.orig_bit_len,
                    });
                }
            }
            let groups = rec.padded_groups(self.block_order);
            if let Some(&index) = rec.sentinels.indices().last() {
                if index as u64 >= groups {
                    return Err(EnvelopeDefect::SentinelOutOfRange { level, index, groups });
                }
            }
            expected_input = Some(rec.output_bit_len(self.block_order));
        }
        let expected = expected_input.unwrap_or(0);
        if self.payload.len() as u64 != expected {
            return Err(EnvelopeDefect::PayloadLengthMismatch {
                expected,
                found: self.payload.len() as u64,
            });
        }
        Ok(())
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.exponent).collect()
    }
}

/// Intermediate values of one encryption level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncryptLevelTrace {
    pub exponent: u32,
    pub input: BitSeq,
    pub grouped: Vec<u64>,
    pub sentinels: SentinelSet,
    pub transformed: Vec<u64>,
    pub output: BitSeq,
}

/// Intermediate values of one decryption level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecryptLevelTrace {
    pub exponent: u32,
    pub grouped: Vec<u64>,
    /// Unreduced `H * c` for every chunk, concatenated.
    pub raw_products: Vec<u128>,
    /// `inv(n mod p)`.
    pub multiplier: u64,
    /// Residues after scaling and reduction, before sentinel restoration.
    pub recovered: Vec<u64>,
    pub restored: Vec<u64>,
    pub output: BitSeq,
}

/// A recoverable inconsistency met while decrypting in lenient mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anomaly {
    /// A sentinel position did not decrypt to 0 and was left as is.
    SentinelConflict { level: usize, index: usize },
    /// Non-zero bits were discarded as padding.
    NonZeroPadding { level: usize, index: usize },
}

fn level_spec(params: ModulusParams, order: BlockOrder) -> HadamardSpec {
    HadamardSpec::new(order.get(), params).expect("block order already validated")
}

fn encrypt_inner(
    plaintext: &BitSeq,
    key: &KeySchedule,
    order: BlockOrder,
    mut trace: Option<&mut Vec<EncryptLevelTrace>>,
) -> Result<CipherEnvelope> {
    let n = order.get();
    let mut bits = plaintext.clone();
    let mut levels = Vec::with_capacity(key.len());
    for &params in key.levels() {
        let x = params.exponent();
        let groups = padded_group_count(bits.len() as u64, x, n);
        if groups > u32::MAX as u64 + 1 {
            return Err(Error::InputTooLarge { groups });
        }
        let grouped = bitcodec::pad_and_group(&bits, x, n);
        let sentinels = bitcodec::detect_sentinels(&grouped);
        let mut values = grouped.values;
        let original = trace.as_ref().map(|_| values.clone());
        par::transform_chunks(&level_spec(params, order), Direction::Forward, &mut values);
        let output = bitcodec::ungroup(&values, x)?;
        if let (Some(t), Some(grouped)) = (trace.as_deref_mut(), original) {
            t.push(EncryptLevelTrace {
                exponent: x,
                input: bits.clone(),
                grouped,
                sentinels: sentinels.clone(),
                transformed: values,
                output: output.clone(),
            });
        }
        levels.push(LevelRecord {
            exponent: x,
            orig_bit_len: bits.len() as u64,
            sentinels,
        });
        bits = output;
    }
    Ok(CipherEnvelope {
        block_order: order,
        levels,
        payload: bits,
    })
}

pub fn encrypt(plaintext: &BitSeq, key: &KeySchedule, order: BlockOrder) -> Result<CipherEnvelope> {
    encrypt_inner(plaintext, key, order, None)
}

/// Like [`encrypt`], also returning every level's intermediate values.
pub fn encrypt_traced(
    plaintext: &BitSeq,
    key: &KeySchedule,
    order: BlockOrder,
) -> Result<(CipherEnvelope, Vec<EncryptLevelTrace>)> {
    let mut trace = Vec::new();
    let env = encrypt_inner(plaintext, key, order, Some(&mut trace))?;
    Ok((env, trace))
}

fn decrypt_inner(
    env: &CipherEnvelope,
    key: &KeySchedule,
    lenient: bool,
    mut trace: Option<&mut Vec<DecryptLevelTrace>>,
) -> Result<(BitSeq, Vec<Anomaly>)> {
    env.validate()?;
    if key.exponents() != env.exponents() {
        return Err(Error::KeyMismatch {
            expected: key.exponents(),
            found: env.exponents(),
        });
    }
    let order = env.block_order;
    let n = order.get();
    let mut anomalies = Vec::new();
    let mut bits = env.payload.clone();
    for (level, (rec, &params)) in env.levels.iter().zip(key.levels()).enumerate().rev() {
        let x = params.exponent();
        let spec = level_spec(params, order);
        // Lengths were validated, so grouping adds no padding here.
        let grouped = bitcodec::pad_and_group(&bits, x, n).values;
        let mut values = grouped.clone();
        par::transform_chunks(&spec, Direction::Inverse, &mut values);
        let recovered = trace.as_ref().map(|_| values.clone());

        let conflicts = bitcodec::restore_in_place(&mut values, &rec.sentinels, x);
        if let Some(&index) = conflicts.first() {
            if !lenient {
                return Err(Error::SentinelConflict {
                    index,
                    value: values[index],
                });
            }
            anomalies.extend(conflicts.iter().map(|&index| Anomaly::SentinelConflict { level, index }));
        }

        let ungrouped = bitcodec::ungroup(&values, x)?;
        let keep = rec.orig_bit_len as usize;
        let output = match bitcodec::truncate(&ungrouped, keep) {
            Ok(out) => out,
            Err(Error::NonZeroPadding { index }) if lenient => {
                anomalies.push(Anomaly::NonZeroPadding { level, index });
                let mut out = ungrouped.clone();
                out.truncate(keep);
                out
            }
            Err(e) => return Err(e),
        };

        if let (Some(t), Some(recovered)) = (trace.as_deref_mut(), recovered) {
            let raw_products = grouped
                .chunks_exact(n)
                .flat_map(|c| spec.raw_product(c).expect("chunk has block order length"))
                .collect();
            t.push(DecryptLevelTrace {
                exponent: x,
                grouped,
                raw_products,
                multiplier: spec.inverse_multiplier(),
                recovered,
                restored: values,
                output: output.clone(),
            });
        }
        bits = output;
    }
    Ok((bits, anomalies))
}

pub fn decrypt(env: &CipherEnvelope, key: &KeySchedule) -> Result<BitSeq> {
    decrypt_inner(env, key, false, None).map(|(bits, _)| bits)
}

/// Like [`decrypt`], also returning every level's intermediate values, in
/// the order the levels were undone.
pub fn decrypt_traced(
    env: &CipherEnvelope,
    key: &KeySchedule,
) -> Result<(BitSeq, Vec<DecryptLevelTrace>)> {
    let mut trace = Vec::new();
    let (bits, _) = decrypt_inner(env, key, false, Some(&mut trace))?;
    Ok((bits, trace))
}

/// Decrypts corrupted ciphertext as far as possible. Sentinel conflicts leave
/// the decrypted value in place and non-zero padding is dropped anyway; both
/// are reported instead of aborting.
pub fn decrypt_lenient(env: &CipherEnvelope, key: &KeySchedule) -> Result<(BitSeq, Vec<Anomaly>)> {
    decrypt_inner(env, key, true, None)
}

/// Encrypts `data` and keeps the first `digest_bits` payload bits, zero-extended
/// when the payload is shorter.
pub fn hash_digest(
    data: &BitSeq,
    key: &KeySchedule,
    order: BlockOrder,
    digest_bits: usize,
) -> Result<BitSeq> {
    if digest_bits == 0 {
        return Err(Error::ZeroDigestBits);
    }
    let mut digest = encrypt(data, key, order)?.payload;
    digest.truncate(digest_bits);
    digest.resize_zero(digest_bits);
    Ok(digest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PLAIN: &str = "110010011101111110000011";
    const CIPHER: &str = "0011010100011110100011101011000011100000";

    fn bits(s: &str) -> BitSeq {
        BitSeq::parse_text(s).unwrap()
    }

    fn key(s: &str) -> KeySchedule {
        s.parse().unwrap()
    }

    #[test]
    fn key_parsing() {
        assert_eq!(key("3,5").exponents(), [3, 5]);
        assert_eq!(key("{3, 5, 7}").exponents(), [3, 5, 7]);
        assert_eq!("".parse::<KeySchedule>(), Err(Error::EmptyKey));
        assert_eq!("3,11".parse::<KeySchedule>(), Err(Error::InvalidKeyElement(11)));
        assert!(matches!("3,a".parse::<KeySchedule>(), Err(Error::KeySyntax(_))));
        assert_eq!(key("5, 3").to_string(), "5,3");
    }

    #[test]
    fn block_order() {
        assert_eq!(BlockOrder::default().get(), 8);
        assert_eq!(BlockOrder::new(24), Err(Error::UnsupportedBlockOrder(24)));
        assert_eq!(BlockOrder::new(256), Err(Error::UnsupportedBlockOrder(256)));
    }

    #[test]
    fn reference_vector() {
        let env = encrypt(&bits(PLAIN), &key("3,5"), BlockOrder::default()).unwrap();
        assert_eq!(env.payload.to_text(), CIPHER);
        assert_eq!(env.levels.len(), 2);
        assert_eq!(env.levels[0].exponent, 3);
        assert_eq!(env.levels[0].orig_bit_len, 24);
        assert_eq!(env.levels[0].sentinels.indices(), [4]);
        assert_eq!(env.levels[1].exponent, 5);
        assert_eq!(env.levels[1].orig_bit_len, 24);
        assert!(env.levels[1].sentinels.is_empty());
        assert_eq!(decrypt(&env, &key("3,5")).unwrap().to_text(), PLAIN);
    }

    #[test]
    fn traced_intermediates() {
        let (_, enc) = encrypt_traced(&bits(PLAIN), &key("3,5"), BlockOrder::default()).unwrap();
        assert_eq!(enc[0].grouped, [6, 2, 3, 5, 7, 6, 0, 3]);
        assert_eq!(enc[0].transformed, [4, 0, 3, 3, 0, 4, 4, 2]);
        assert_eq!(enc[1].grouped, [16, 6, 24, 18, 4, 0, 0, 0]);
        assert_eq!(enc[1].transformed, [6, 20, 15, 8, 29, 12, 7, 0]);
    }

    #[test]
    fn empty_input() {
        let env = encrypt(&BitSeq::new(), &key("3,5"), BlockOrder::default()).unwrap();
        assert!(env.payload.is_empty());
        assert!(env.levels.iter().all(|l| l.orig_bit_len == 0 && l.sentinels.is_empty()));
        assert!(decrypt(&env, &key("3,5")).unwrap().is_empty());
    }

    #[test]
    fn all_ones_input() {
        let env = encrypt(&bits(&"1".repeat(24)), &key("3"), BlockOrder::default()).unwrap();
        assert_eq!(env.payload.to_text(), "0".repeat(24));
        assert_eq!(env.levels[0].sentinels.indices(), [0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(decrypt(&env, &key("3")).unwrap().to_text(), "1".repeat(24));
    }

    #[test]
    fn key_mismatch_is_reported() {
        let env = encrypt(&bits(PLAIN), &key("3,5"), BlockOrder::default()).unwrap();
        assert_eq!(
            decrypt(&env, &key("5,3")),
            Err(Error::KeyMismatch { expected: vec![5, 3], found: vec![3, 5] })
        );
    }

    #[test]
    fn structural_checks_run_before_decrypting() {
        let mut env = encrypt(&bits(PLAIN), &key("3,5"), BlockOrder::default()).unwrap();
        env.payload.push(false);
        assert!(matches!(
            decrypt(&env, &key("3,5")),
            Err(Error::MalformedEnvelope(EnvelopeDefect::PayloadLengthMismatch { .. }))
        ));
    }

    #[test]
    fn first_bit_flip_changes_output() {
        let k = key("3,5");
        let mut env = encrypt(&bits(PLAIN), &k, BlockOrder::default()).unwrap();
        env.payload.flip(0);
        match decrypt(&env, &k) {
            Ok(out) => assert_ne!(out.to_text(), PLAIN),
            Err(e) => assert!(matches!(
                e,
                Error::SentinelConflict { .. } | Error::NonZeroPadding { .. }
            )),
        }
        let (out, _) = decrypt_lenient(&env, &k).unwrap();
        assert_ne!(out.to_text(), PLAIN);
    }

    #[test]
    fn hash_examples() {
        let k = key("3,5");
        let d = hash_digest(&bits(PLAIN), &k, BlockOrder::default(), 16).unwrap();
        assert_eq!(d.to_text(), "0011010100011110");
        let long = hash_digest(&bits(PLAIN), &k, BlockOrder::default(), 48).unwrap();
        assert_eq!(long.to_text(), format!("{CIPHER}00000000"));
        assert_eq!(
            hash_digest(&bits(PLAIN), &k, BlockOrder::default(), 0),
            Err(Error::ZeroDigestBits)
        );
    }

    fn key_strategy() -> impl Strategy<Value = KeySchedule> {
        prop::collection::vec(prop::sample::select(vec![2u64, 3, 5, 7, 13]), 1..4)
            .prop_map(|xs| KeySchedule::new(&xs).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn round_trip(
            raw in prop::collection::vec(any::<bool>(), 0..700),
            k in key_strategy(),
            n in prop::sample::select(vec![8usize, 16, 32]),
        ) {
            let m: BitSeq = raw.into_iter().collect();
            let order = BlockOrder::new(n).unwrap();
            let env = encrypt(&m, &k, order).unwrap();
            prop_assert!(env.validate().is_ok());
            let back = decrypt(&env, &k).unwrap();
            prop_assert_eq!(&back, &m);
            prop_assert_eq!(encrypt(&back, &k, order).unwrap(), env);
        }

        #[test]
        fn level_lengths_are_chunk_multiples(
            len in 0usize..500,
            k in key_strategy(),
        ) {
            let (env, trace) = encrypt_traced(&BitSeq::zeros(len), &k, BlockOrder::default()).unwrap();
            for t in &trace {
                prop_assert_eq!(t.output.len() % (8 * t.exponent as usize), 0);
                prop_assert!(t.output.count_ones() == 0);
            }
            prop_assert_eq!(env.levels.len(), k.len());
        }
    }
}
