//! Chained Hadamard-transform cipher over Mersenne-prime moduli.
//!
//! A key is a list of exponents `x` with `x` and `2^x - 1` both prime. Each
//! exponent is one level: the bit stream is read as `x`-bit values, padded to
//! chunks of `n` values, and every chunk is multiplied by the `n x n` Hadamard
//! matrix modulo `2^x - 1`. Levels chain, each consuming the previous level's
//! output bits. The [`CipherEnvelope`] carries the per-level lengths and
//! all-ones group positions that decryption needs.
//!
//! ```
//! use chained_hadamard::{decrypt, encrypt, BitSeq, BlockOrder, KeySchedule};
//!
//! let key: KeySchedule = "3,5".parse().unwrap();
//! let plain = BitSeq::parse_text("110010011101111110000011").unwrap();
//! let env = encrypt(&plain, &key, BlockOrder::default()).unwrap();
//! assert_eq!(env.payload.to_text(), "0011010100011110100011101011000011100000");
//! assert_eq!(decrypt(&env, &key).unwrap(), plain);
//! ```
//!
//! This is a linear transform cipher and offers no cryptographic security.

pub mod analysis;
pub mod bitcodec;
pub mod bitseq;
pub mod cipher;
pub mod cli;
pub mod envelope;
pub mod error;
pub mod hadamard;
pub mod modmath;
pub mod par;

pub use bitseq::BitSeq;
pub use cipher::{
    decrypt, decrypt_lenient, decrypt_traced, encrypt, encrypt_traced, hash_digest, BlockOrder,
    CipherEnvelope, KeySchedule, LevelRecord,
};
pub use error::{EnvelopeDefect, Error, Result};
pub use hadamard::{HadamardSpec, Kernel};
pub use modmath::ModulusParams;
