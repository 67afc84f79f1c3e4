//! Diffusion measurements: plaintext/ciphertext comparison, single-bit
//! corruption experiments, digest collision counts, and detection of inputs
//! whose ciphertext carries no information.

use std::fmt;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitseq::BitSeq;
use crate::cipher::{self, Anomaly, BlockOrder, KeySchedule};
use crate::error::{Error, Result};
use crate::par;

/// Position-by-position comparison of two bit sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffReport {
    pub length_a: usize,
    pub length_b: usize,
    /// Differing bits over the common prefix.
    pub hamming: usize,
    pub length_delta: usize,
    /// 1 where the sequences differ, over the common prefix.
    pub series: Vec<u8>,
}

impl DiffReport {
    /// Share of positions that differ, counting the length difference as differing.
    pub fn fraction(&self) -> f64 {
        let longest = self.length_a.max(self.length_b);
        if longest == 0 {
            0.0
        } else {
            (self.hamming + self.length_delta) as f64 / longest as f64
        }
    }

    pub fn summary(&self) -> String {
        format!(
            "length_a={} length_b={} hamming={} length_delta={} fraction={:.4}",
            self.length_a,
            self.length_b,
            self.hamming,
            self.length_delta,
            self.fraction()
        )
    }
}

pub fn difference_series(a: &BitSeq, b: &BitSeq) -> DiffReport {
    let series: Vec<u8> = a.iter().zip(b.iter()).map(|(x, y)| u8::from(x != y)).collect();
    DiffReport {
        length_a: a.len(),
        length_b: b.len(),
        hamming: series.iter().map(|&d| d as usize).sum(),
        length_delta: a.len().abs_diff(b.len()),
        series,
    }
}

/// Writes `position,bit_a,bit_b,diff` rows over the common prefix, then a `#` summary row.
pub fn write_difference_csv<W: Write>(mut out: W, a: &BitSeq, b: &BitSeq) -> io::Result<DiffReport> {
    let report = difference_series(a, b);
    writeln!(out, "position,bit_a,bit_b,diff")?;
    for (i, ((x, y), d)) in a.iter().zip(b.iter()).zip(&report.series).enumerate() {
        writeln!(out, "{i},{},{},{d}", u8::from(x), u8::from(y))?;
    }
    writeln!(out, "# {}", report.summary())?;
    Ok(report)
}

/// Result of decrypting a ciphertext with one flipped payload bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvalancheReport {
    pub flip_index: usize,
    pub diff: DiffReport,
    /// Inconsistencies tolerated while decrypting the corrupted payload.
    pub anomalies: Vec<Anomaly>,
}

pub fn avalanche_experiment(
    plaintext: &BitSeq,
    key: &KeySchedule,
    order: BlockOrder,
    flip_index: usize,
) -> Result<AvalancheReport> {
    let mut env = cipher::encrypt(plaintext, key, order)?;
    if flip_index >= env.payload.len() {
        return Err(Error::FlipOutOfRange {
            index: flip_index,
            len: env.payload.len(),
        });
    }
    env.payload.flip(flip_index);
    let (corrupted, anomalies) = cipher::decrypt_lenient(&env, key)?;
    Ok(AvalancheReport {
        flip_index,
        diff: difference_series(plaintext, &corrupted),
        anomalies,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AvalancheSummary {
    pub trials: usize,
    pub mean_fraction: f64,
    pub min_hamming: usize,
    pub max_hamming: usize,
    /// Trials that hit at least one sentinel conflict or non-zero padding.
    pub trials_with_anomalies: usize,
}

impl fmt::Display for AvalancheSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trials={} mean_fraction={:.4} min_hamming={} max_hamming={} anomalous_trials={}",
            self.trials, self.mean_fraction, self.min_hamming, self.max_hamming, self.trials_with_anomalies
        )
    }
}

/// Runs `trials` single-flip experiments at seeded random payload positions.
pub fn avalanche_trials(
    plaintext: &BitSeq,
    key: &KeySchedule,
    order: BlockOrder,
    trials: usize,
    seed: u64,
) -> Result<AvalancheSummary> {
    let payload_len = cipher::encrypt(plaintext, key, order)?.payload.len();
    if payload_len == 0 {
        return Err(Error::FlipOutOfRange { index: 0, len: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flips: Vec<usize> = (0..trials).map(|_| rng.gen_range(0..payload_len)).collect();
    let reports = par::map_indices(trials, |t| avalanche_experiment(plaintext, key, order, flips[t]))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let hammings = reports.iter().map(|r| r.diff.hamming);
    Ok(AvalancheSummary {
        trials,
        mean_fraction: reports.iter().map(|r| r.diff.fraction()).sum::<f64>() / trials.max(1) as f64,
        min_hamming: hammings.clone().min().unwrap_or(0),
        max_hamming: hammings.max().unwrap_or(0),
        trials_with_anomalies: reports.iter().filter(|r| !r.anomalies.is_empty()).count(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionReport {
    pub pairs: usize,
    pub collisions: usize,
    /// Mean Hamming distance between the two digests of a pair.
    pub mean_digest_distance: f64,
}

impl fmt::Display for CollisionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pairs={} collisions={} mean_digest_distance={:.3}",
            self.pairs, self.collisions, self.mean_digest_distance
        )
    }
}

/// Hashes random `input_bits`-bit messages and the same messages with one bit
/// flipped, counting identical digests.
pub fn hash_collision_experiment(
    pairs: usize,
    input_bits: usize,
    key: &KeySchedule,
    order: BlockOrder,
    digest_bits: usize,
    seed: u64,
) -> Result<CollisionReport> {
    if input_bits == 0 {
        return Err(Error::FlipOutOfRange { index: 0, len: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<(BitSeq, usize)> = (0..pairs)
        .map(|_| {
            let m: BitSeq = (0..input_bits).map(|_| rng.gen::<bool>()).collect();
            (m, rng.gen_range(0..input_bits))
        })
        .collect();
    let distances = par::map_indices(pairs, |i| {
        let (m, flip) = &inputs[i];
        let mut other = m.clone();
        other.flip(*flip);
        let a = cipher::hash_digest(m, key, order, digest_bits)?;
        let b = cipher::hash_digest(&other, key, order, digest_bits)?;
        Ok(difference_series(&a, &b).hamming)
    })
    .into_iter()
    .collect::<Result<Vec<usize>>>()?;
    Ok(CollisionReport {
        pairs,
        collisions: distances.iter().filter(|&&d| d == 0).count(),
        mean_digest_distance: distances.iter().sum::<usize>() as f64 / pairs.max(1) as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegenerateWarning {
    AllZeros,
    AllOnes,
}

impl fmt::Display for DegenerateWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self {
            DegenerateWarning::AllZeros => "all zeros",
            DegenerateWarning::AllOnes => "all ones",
        };
        write!(
            f,
            "input is {what}: the payload will be all zeros and only the sentinel metadata carries information"
        )
    }
}

/// Flags non-empty inputs made of a single repeated bit.
pub fn degenerate_check(plaintext: &BitSeq) -> Option<DegenerateWarning> {
    if plaintext.is_empty() {
        return None;
    }
    match plaintext.count_ones() {
        0 => Some(DegenerateWarning::AllZeros),
        ones if ones == plaintext.len() => Some(DegenerateWarning::AllOnes),
        _ => None,
    }
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

    #[test]
    fn plaintext_versus_ciphertext() {
        let r = difference_series(&bits(PLAIN), &bits(CIPHER));
        // XOR of the two strings over the first 24 positions, counted by hand.
        let expected = PLAIN
            .chars()
            .zip(CIPHER.chars())
            .filter(|(a, b)| a != b)
            .count();
        assert_eq!(expected, 12);
        assert_eq!(r.hamming, 12);
        assert_eq!(r.length_delta, 16);
        assert_eq!(r.series.len(), 24);
    }

    #[test]
    fn trivial_diffs() {
        let b = bits("0110");
        let r = difference_series(&b, &b);
        assert_eq!((r.hamming, r.length_delta), (0, 0));
        assert_eq!(difference_series(&bits("000"), &bits("111")).hamming, 3);
    }

    #[test]
    fn csv_layout() {
        let mut out = Vec::new();
        write_difference_csv(&mut out, &bits("01"), &bits("111")).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("position,bit_a,bit_b,diff"));
        assert_eq!(lines.next(), Some("0,0,1,1"));
        assert_eq!(lines.next(), Some("1,1,1,0"));
        assert!(lines.next().unwrap().starts_with("# length_a=2 length_b=3 hamming=1 length_delta=1"));
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn avalanche_on_reference_vector() {
        let k: KeySchedule = "3,5".parse().unwrap();
        let r = avalanche_experiment(&bits(PLAIN), &k, BlockOrder::default(), 0).unwrap();
        assert!(r.diff.hamming >= 1);
        assert_eq!(
            avalanche_experiment(&bits(PLAIN), &k, BlockOrder::default(), 40),
            Err(Error::FlipOutOfRange { index: 40, len: 40 })
        );
    }

    #[test]
    fn double_flip_restores() {
        let k: KeySchedule = "3,5".parse().unwrap();
        let mut env = cipher::encrypt(&bits(PLAIN), &k, BlockOrder::default()).unwrap();
        env.payload.flip(7);
        env.payload.flip(7);
        let back = cipher::decrypt(&env, &k).unwrap();
        assert_eq!(difference_series(&bits(PLAIN), &back).hamming, 0);
    }

    #[test]
    fn trials_are_reproducible() {
        let k: KeySchedule = "3,5".parse().unwrap();
        let a = avalanche_trials(&bits(PLAIN), &k, BlockOrder::default(), 100, 9).unwrap();
        let b = avalanche_trials(&bits(PLAIN), &k, BlockOrder::default(), 100, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.min_hamming >= 1);
        assert!(a.mean_fraction > 0.0);
    }

    #[test]
    fn degenerate() {
        assert_eq!(degenerate_check(&bits("111111111111")), Some(DegenerateWarning::AllOnes));
        assert_eq!(degenerate_check(&bits("000000")), Some(DegenerateWarning::AllZeros));
        assert_eq!(degenerate_check(&bits("1010")), None);
        assert_eq!(degenerate_check(&BitSeq::new()), None);
    }

    #[test]
    fn degenerate_inputs_give_zero_payload() {
        for k in ["3", "3,5", "5,7,2", "13"] {
            let k: KeySchedule = k.parse().unwrap();
            let x = k.levels()[0].exponent() as usize;
            for m in [BitSeq::zeros(x * 20), bits(&"1".repeat(x * 20))] {
                assert!(degenerate_check(&m).is_some());
                let env = cipher::encrypt(&m, &k, BlockOrder::default()).unwrap();
                assert_eq!(env.payload.count_ones(), 0);
                assert_eq!(cipher::decrypt(&env, &k).unwrap(), m);
            }
        }
    }

    proptest! {
        #[test]
        fn diff_is_symmetric(
            a in prop::collection::vec(any::<bool>(), 0..100),
            b in prop::collection::vec(any::<bool>(), 0..100),
        ) {
            let (a, b): (BitSeq, BitSeq) = (a.into_iter().collect(), b.into_iter().collect());
            let ab = difference_series(&a, &b);
            let ba = difference_series(&b, &a);
            prop_assert_eq!(ab.hamming, ba.hamming);
            prop_assert_eq!(ab.length_delta, ba.length_delta);
            prop_assert_eq!(ab.hamming, ab.series.iter().map(|&d| d as usize).sum::<usize>());
            prop_assert!(ab.hamming <= a.len().min(b.len()));
        }
    }
}
