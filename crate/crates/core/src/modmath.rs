//! Exact modular arithmetic over the Mersenne-prime moduli used by the cipher.
//!
//! Every modulus handled here is at most `2^31 - 1`, so a product of two
//! residues always fits in a `u64` without overflow.

use crate::error::{Error, Result};

/// Largest group width accepted as a key element.
pub const MAX_EXPONENT: u32 = 31;

/// All exponents `x <= 31` where both `x` and `2^x - 1` are prime.
pub const SUPPORTED_EXPONENTS: [u32; 8] = [2, 3, 5, 7, 13, 17, 19, 31];

/// A validated key element: group width `x` and modulus `p = 2^x - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModulusParams {
    exponent: u32,
    modulus: u64,
}

impl ModulusParams {
    /// Group width in bits.
    #[inline]
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// The Mersenne prime `2^x - 1`. Also the largest value an `x`-bit group can hold.
    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

// Witnesses that make Miller-Rabin deterministic for every u64.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test valid over the whole `u64` range.
pub fn is_prime(u: u64) -> bool {
    if u < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if u == p {
            return true;
        }
        if u.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = u - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod_u64(a, d, u);
        if x == 1 || x == u - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, u);
            if x == u - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Checks that `x` can serve as one level of a key.
pub fn validate_key_element(x: u64) -> Result<ModulusParams> {
    if !(2..=MAX_EXPONENT as u64).contains(&x) || !is_prime(x) {
        return Err(Error::InvalidKeyElement(x));
    }
    let modulus = (1u64 << x) - 1;
    if !is_prime(modulus) {
        return Err(Error::InvalidKeyElement(x));
    }
    Ok(ModulusParams {
        exponent: x as u32,
        modulus,
    })
}

/// `v mod p`.
#[inline]
pub fn mod_reduce(v: u64, p: u64) -> u64 {
    v % p
}

/// `(a + b) mod p` for residues `a, b < p`.
#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

/// `(a - b) mod p` for residues `a, b < p`, computed as `a + (p - b)`.
#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    add_mod(a, p - b, p)
}

/// `(a * b) mod p` for residues below `2^32`.
#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    debug_assert!(a < 1 << 32 && b < 1 << 32);
    (a * b) % p
}

/// Modular inverse by the extended Euclidean algorithm.
pub fn mod_inverse(a: u64, p: u64) -> Result<u64> {
    let a_red = a % p;
    if a_red == 0 {
        return Err(Error::NoInverse { value: a, modulus: p });
    }
    let (mut old_r, mut r) = (a_red as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NoInverse { value: a, modulus: p });
    }
    Ok(old_s.rem_euclid(p as i128) as u64)
}
