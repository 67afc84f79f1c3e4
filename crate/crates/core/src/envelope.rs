//! Binary `HCT1` container for [`CipherEnvelope`].
//!
//! ```text
//! magic "HCT1" | version u8 | block_order u8 | level_count u8
//! per level: x u8 | orig_bit_len u64 | sentinel_count u32 | sentinel_count * u32
//! payload_bit_len u64 | payload bytes (MSB-first, zero-filled)
//! ```
//! All multi-byte integers are big-endian.

use crate::bitcodec::SentinelSet;
use crate::bitseq::BitSeq;
use crate::cipher::{BlockOrder, CipherEnvelope, LevelRecord};
use crate::error::{EnvelopeDefect, Error, Result};

pub const MAGIC: [u8; 4] = *b"HCT1";
pub const VERSION: u8 = 1;

impl CipherEnvelope {
    pub fn to_bytes(&self) -> Vec<u8> {
        let sentinel_total: usize = self.levels.iter().map(|l| l.sentinels.len()).sum();
        let mut out = Vec::with_capacity(
            7 + self.levels.len() * 13 + sentinel_total * 4 + 8 + self.payload.as_bytes().len(),
        );
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.block_order.get() as u8);
        out.push(self.levels.len() as u8);
        for level in &self.levels {
            out.push(level.exponent as u8);
            out.extend_from_slice(&level.orig_bit_len.to_be_bytes());
            out.extend_from_slice(&(level.sentinels.len() as u32).to_be_bytes());
            for &i in level.sentinels.indices() {
                out.extend_from_slice(&i.to_be_bytes());
            }
        }
        out.extend_from_slice(&(self.payload.len() as u64).to_be_bytes());
        out.extend_from_slice(self.payload.as_bytes());
        out
    }

    /// Parses and fully validates an envelope.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        parse(bytes).map_err(Error::from)
    }
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &'static str) -> std::result::Result<&'a [u8], EnvelopeDefect> {
        if self.buf.len() < n {
            return Err(EnvelopeDefect::Truncated(what));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    fn u8(&mut self, what: &'static str) -> std::result::Result<u8, EnvelopeDefect> {
        Ok(self.take(1, what)?[0])
    }

    fn u32(&mut self, what: &'static str) -> std::result::Result<u32, EnvelopeDefect> {
        Ok(u32::from_be_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &'static str) -> std::result::Result<u64, EnvelopeDefect> {
        Ok(u64::from_be_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

fn parse(bytes: &[u8]) -> std::result::Result<CipherEnvelope, EnvelopeDefect> {
    let mut r = Reader { buf: bytes };
    if r.take(4, "magic")? != MAGIC {
        return Err(EnvelopeDefect::BadMagic);
    }
    let version = r.u8("version")?;
    if version != VERSION {
        return Err(EnvelopeDefect::UnsupportedVersion(version));
    }
    let raw_order = r.u8("block order")?;
    let block_order =
        BlockOrder::new(raw_order as usize).map_err(|_| EnvelopeDefect::BadBlockOrder(raw_order))?;
    let level_count = r.u8("level count")?;
    if level_count == 0 {
        return Err(EnvelopeDefect::NoLevels);
    }
    let mut levels = Vec::with_capacity(level_count as usize);
    for level in 0..level_count as usize {
        let exponent = r.u8("level exponent")? as u32;
        let orig_bit_len = r.u64("level bit length")?;
        let count = r.u32("sentinel count")? as usize;
        // Bound the allocation by what the buffer can actually hold.
        if r.buf.len() / 4 < count {
            return Err(EnvelopeDefect::Truncated("sentinel indices"));
        }
        let indices = (0..count)
            .map(|_| r.u32("sentinel index"))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let sentinels =
            SentinelSet::from_sorted(indices).ok_or(EnvelopeDefect::UnsortedSentinels { level })?;
        levels.push(LevelRecord {
            exponent,
            orig_bit_len,
            sentinels,
        });
    }
    let payload_bits = r.u64("payload bit length")?;
    let expected = payload_bits.div_ceil(8);
    let found = r.buf.len() as u64;
    if found != expected {
        return Err(EnvelopeDefect::PayloadByteCount {
            bits: payload_bits,
            expected,
            found,
        });
    }
    let payload =
        BitSeq::from_packed(r.buf.to_vec(), payload_bits as usize).ok_or(EnvelopeDefect::NonZeroFill)?;
    let env = CipherEnvelope {
        block_order,
        levels,
        payload,
    };
    env.validate()?;
    Ok(env)
}
