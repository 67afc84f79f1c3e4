//! The Sylvester Hadamard matrix over `Z_p`, with `-1` written as `p - 1`.
//!
//! Entry `(i, j)` is `1` when `popcount(i & j)` is even and `p - 1` otherwise.
//! `H * H = n * I (mod p)`, so the inverse transform is `inv(n) * H`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::modmath::{self, add_mod, mod_inverse, mul_mod, sub_mod, ModulusParams};

/// Transform orders accepted by [`HadamardSpec`].
pub const SUPPORTED_ORDERS: [usize; 5] = [8, 16, 32, 64, 128];

/// Order `n` and modulus `p` of a modular Hadamard transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HadamardSpec {
    order: usize,
    modulus: u64,
}

/// Which matrix-vector kernel to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// O(n^2) row-by-column product.
    Naive,
    /// O(n log n) Walsh-Hadamard butterfly.
    Fast,
}

impl HadamardSpec {
    pub fn new(order: usize, params: ModulusParams) -> Result<Self> {
        if !SUPPORTED_ORDERS.contains(&order) {
            return Err(Error::UnsupportedBlockOrder(order));
        }
        Ok(Self {
            order,
            modulus: params.modulus(),
        })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Matrix entry at row `i`, column `j`.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> u64 {
        debug_assert!(i < self.order && j < self.order);
        if (i & j).count_ones().is_multiple_of(2) {
            1
        } else {
            self.modulus - 1
        }
    }

    /// Materializes the full matrix. Only used for display and checks.
    pub fn build_matrix(&self) -> Vec<Vec<u64>> {
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    /// Matrix rows as space-separated residues, one row per line.
    pub fn matrix_text(&self) -> String {
        let mut out = String::new();
        for row in self.build_matrix() {
            let line: Vec<String> = row.iter().map(u64::to_string).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    /// `n mod p`, the scalar with `H * H = (n mod p) * I`.
    #[inline]
    pub fn scale(&self) -> u64 {
        self.order as u64 % self.modulus
    }

    /// Inverse of [`scale`](Self::scale) modulo `p`.
    pub fn inverse_multiplier(&self) -> u64 {
        // n is a power of two and p is odd, so the inverse always exists.
        mod_inverse(self.scale(), self.modulus).expect("n is invertible modulo an odd prime")
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.order {
            return Err(Error::DimensionMismatch {
                expected: self.order,
                found: len,
            });
        }
        Ok(())
    }

    /// The unreduced integer product `H * v`, with entries taken as `1` or `p - 1`.
    pub fn raw_product(&self, v: &[u64]) -> Result<Vec<u128>> {
        self.check_len(v.len())?;
        Ok((0..self.order)
            .map(|i| {
                v.iter()
                    .enumerate()
                    .map(|(j, &x)| self.entry(i, j) as u128 * x as u128)
                    .sum()
            })
            .collect())
    }

    /// `H * v mod p` by the direct matrix-vector product.
    ///
    /// Input values may equal `p`; they reduce to 0.
    pub fn apply_naive(&self, v: &[u64]) -> Result<Vec<u64>> {
        self.check_len(v.len())?;
        let p = self.modulus;
        Ok((0..self.order)
            .map(|i| {
                v.iter().enumerate().fold(0, |acc, (j, &x)| {
                    add_mod(acc, mul_mod(self.entry(i, j), x % p, p), p)
                })
            })
            .collect())
    }

    /// `H * v mod p` through the butterfly. Same output as [`apply_naive`](Self::apply_naive).
    pub fn apply_fast(&self, v: &[u64]) -> Result<Vec<u64>> {
        self.check_len(v.len())?;
        let mut out = v.to_vec();
        self.forward_in_place(&mut out);
        Ok(out)
    }

    /// Forward transform with the chosen kernel.
    pub fn apply(&self, kernel: Kernel, v: &[u64]) -> Result<Vec<u64>> {
        match kernel {
            Kernel::Naive => self.apply_naive(v),
            Kernel::Fast => self.apply_fast(v),
        }
    }

    /// `inv(n) * H * w mod p`, undoing [`apply_naive`](Self::apply_naive).
    pub fn apply_inverse(&self, w: &[u64]) -> Result<Vec<u64>> {
        self.check_len(w.len())?;
        let mut out = w.to_vec();
        self.inverse_in_place(&mut out);
        Ok(out)
    }

    /// In-place butterfly on one chunk of exactly `order` values.
    pub(crate) fn forward_in_place(&self, data: &mut [u64]) {
        debug_assert_eq!(data.len(), self.order);
        let p = self.modulus;
        for x in data.iter_mut() {
            *x %= p;
        }
        let mut half = 1;
        while half < data.len() {
            for block in data.chunks_exact_mut(half * 2) {
                let (lo, hi) = block.split_at_mut(half);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (u, v) = (*a, *b);
                    *a = add_mod(u, v, p);
                    *b = sub_mod(u, v, p);
                }
            }
            half *= 2;
        }
    }

    pub(crate) fn inverse_in_place(&self, data: &mut [u64]) {
        self.forward_in_place(data);
        let k = self.inverse_multiplier();
        if k != 1 {
            for x in data.iter_mut() {
                *x = mul_mod(*x, k, self.modulus);
            }
        }
    }

    /// Brute-force check that `H * H = (n mod p) * I (mod p)`.
    pub fn self_check(&self) -> bool {
        let p = self.modulus;
        let n = self.order;
        let scale = self.scale();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let dot = (0..n).fold(0, |acc, k| {
                    add_mod(acc, mul_mod(self.entry(i, k), self.entry(k, j), p), p)
                });
                dot == if i == j { scale } else { 0 }
            })
        })
    }
}

/// Convenience constructor from a raw exponent.
pub fn spec_for_exponent(order: usize, exponent: u64) -> Result<HadamardSpec> {
    HadamardSpec::new(order, modmath::validate_key_element(exponent)?)
}
