//! Arithmetic in the prime field `F_p` for a small odd prime chosen at runtime.
//!
//! Residues are plain `u32` values in `0..p`. All products fit in `u64`, so
//! nothing here needs arbitrary precision.

use crate::error::{Error, Result};

/// The prime field `F_p`, `p > 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    p: u32,
}

impl Field {
    pub fn new(p: u32) -> Result<Self> {
        if p <= 2 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        // keeps every product below 2^32 before reduction
        if p > 65_521 {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Field { p })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    /// Reduces an arbitrary signed integer.
    #[inline]
    pub fn reduce(&self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        a * b % self.p
    }

    /// `a * b + c`, all reduced.
    #[inline]
    pub fn mul_add(&self, a: u32, b: u32, c: u32) -> u32 {
        (a * b + c) % self.p
    }

    pub fn pow(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat.
    pub fn inv(&self, a: u32) -> Result<u32> {
        if a.is_multiple_of(self.p) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a % self.p, (self.p - 2) as u64))
    }

    /// `(-1)^k` as a residue.
    #[inline]
    pub fn sign(&self, k: u32) -> u32 {
        if k.is_multiple_of(2) {
            1
        } else {
            self.p - 1
        }
    }

    /// Binomial coefficient `C(a, b) mod p` by Lucas' theorem.
    pub fn binom(&self, mut a: u64, mut b: u64) -> u32 {
        if b > a {
            return 0;
        }
        let p = self.p as u64;
        let mut acc = 1u32;
        while b > 0 {
            let (ad, bd) = (a % p, b % p);
            if bd > ad {
                return 0;
            }
            acc = self.mul(acc, self.small_binom(ad as u32, bd as u32));
            a /= p;
            b /= p;
        }
        acc
    }

    // C(a, b) for 0 <= b <= a < p via the multiplicative formula.
    fn small_binom(&self, a: u32, b: u32) -> u32 {
        let b = b.min(a - b);
        let mut num = 1u32;
        let mut den = 1u32;
        for k in 0..b {
            num = self.mul(num, (a - k) % self.p);
            den = self.mul(den, (k + 1) % self.p);
        }
        // den is a product of integers below p, never zero mod p
        self.mul(num, self.inv(den).expect("nonzero factorial"))
    }

    /// `k!` mod p; zero once `k >= p`.
    pub fn factorial(&self, k: u32) -> u32 {
        (1..=k).fold(1 % self.p, |acc, i| self.mul(acc, i % self.p))
    }

    /// Prints a residue as a signed representative in `(-p/2, p/2]`.
    pub fn signed(&self, a: u32) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
