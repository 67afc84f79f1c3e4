use thiserror::Error;

/// Structural defects found while parsing or validating a ciphertext envelope.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvelopeDefect {
    #[error("bad magic bytes (expected \"HCT1\")")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),
    #[error("block order {0} is not a supported power of two")]
    BadBlockOrder(u8),
    #[error("envelope declares zero levels")]
    NoLevels,
    #[error("level {level} uses exponent {exponent}, which is not a valid key element")]
    InvalidExponent { level: usize, exponent: u8 },
    #[error("level {level} sentinel indices are not strictly ascending")]
    UnsortedSentinels { level: usize },
    #[error("level {level} sentinel index {index} is outside {groups} padded groups")]
    SentinelOutOfRange { level: usize, index: u32, groups: u64 },
    #[error("level {level} input length {found} bits does not match previous level output of {expected} bits")]
    LevelLengthMismatch { level: usize, expected: u64, found: u64 },
    #[error("payload length {found} bits does not match final level output of {expected} bits")]
    PayloadLengthMismatch { expected: u64, found: u64 },
    #[error("payload bit length {bits} needs {expected} bytes but {found} are present")]
    PayloadByteCount { bits: u64, expected: u64, found: u64 },
    #[error("payload fill bits after the last payload bit are not zero")]
    NonZeroFill,
    #[error("input truncated while reading {0}")]
    Truncated(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid key element {0}: must be a prime x in 2..=31 with 2^x-1 prime")]
    InvalidKeyElement(u64),
    #[error("key must contain at least one exponent")]
    EmptyKey,
    #[error("key has {0} levels; at most 255 are supported")]
    KeyTooLong(usize),
    #[error("cannot parse key: {0}")]
    KeySyntax(String),
    #[error("unsupported block order {0}: expected one of 8, 16, 32, 64, 128")]
    UnsupportedBlockOrder(usize),
    #[error("{value} has no inverse modulo {modulus}")]
    NoInverse { value: u64, modulus: u64 },
    #[error("vector length {found} does not match transform order {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("value {value} does not fit in {width} bits")]
    ValueOverflow { value: u64, width: u32 },
    #[error("sentinel position {index} holds {value}, expected 0")]
    SentinelConflict { index: usize, value: u64 },
    #[error("discarded padding bit {index} is set")]
    NonZeroPadding { index: usize },
    #[error("cannot keep {requested} bits of a {available}-bit sequence")]
    LengthUnderflow { requested: usize, available: usize },
    #[error("key schedule {expected:?} does not match envelope levels {found:?}")]
    KeyMismatch { expected: Vec<u32>, found: Vec<u32> },
    #[error("malformed envelope: {0}")]
    MalformedEnvelope(#[from] EnvelopeDefect),
    #[error("invalid bit character {found:?} at position {position}")]
    InvalidBitChar { position: usize, found: char },
    #[error("digest length must be at least one bit")]
    ZeroDigestBits,
    #[error("flip index {index} is outside the {len}-bit payload")]
    FlipOutOfRange { index: usize, len: usize },
    #[error("input of {groups} groups exceeds the envelope's 32-bit group index space")]
    InputTooLarge { groups: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
