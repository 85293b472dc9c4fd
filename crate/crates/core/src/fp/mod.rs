//! Exact arithmetic over the prime field F_p, dense matrices, integer
//! matrices and reduced multivariate polynomials.

mod matrix;
pub(crate) mod poly;

pub use matrix::{binomial_transition, kron, sylvester, FpMatrix, IntMatrix};
pub use poly::{reduced_interpolate, ReducedPoly};

use crate::error::{Error, Result};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Largest supported modulus.
pub const MAX_PRIME: u64 = 97;

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// The prime field F_p, carried by value wherever residues are stored as `u8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Field {
    p: u8,
}

impl Field {
    pub fn new(p: u64) -> Result<Field> {
        if p > MAX_PRIME || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field { p: p as u8 })
    }

    #[inline]
    pub fn p(self) -> u8 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        ((a as u16 + b as u16) % self.p as u16) as u8
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        ((a as u16 + self.p as u16 - b as u16) % self.p as u16) as u8
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.p as u16) as u8
    }

    pub fn pow(self, a: u8, mut e: u64) -> u8 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(self, a: u8) -> Option<u8> {
        if a.is_multiple_of(self.p) {
            None
        } else {
            Some(self.pow(a, self.p as u64 - 2))
        }
    }

    pub fn reduce(self, v: i64) -> u8 {
        v.rem_euclid(self.p as i64) as u8
    }

    pub fn elem(self, v: i64) -> Fp {
        Fp {
            value: self.reduce(v),
            p: self.p,
        }
    }

    /// Binomial coefficient C(n, k) mod p by Lucas' theorem.
    pub fn binomial(self, mut n: u64, mut k: u64) -> u8 {
        let p = self.p as u64;
        let mut acc = 1u8;
        while k > 0 || n > 0 {
            let (ni, ki) = (n % p, k % p);
            if ki > ni {
                return 0;
            }
            acc = self.mul(acc, small_binomial(ni, ki, self));
            n /= p;
            k /= p;
        }
        acc
    }
}

fn small_binomial(n: u64, k: u64, f: Field) -> u8 {
    let mut num = 1u8;
    let mut den = 1u8;
    for i in 0..k {
        num = f.mul(num, ((n - i) % f.p as u64) as u8);
        den = f.mul(den, ((i + 1) % f.p as u64) as u8);
    }
    f.mul(num, f.inv(den).expect("k < p"))
}

/// A residue together with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u8,
    p: u8,
}

impl Fp {
    pub fn new(value: i64, p: u64) -> Result<Fp> {
        Ok(Field::new(p)?.elem(value))
    }

    pub fn value(self) -> u8 {
        self.value
    }

    pub fn field(self) -> Field {
        Field { p: self.p }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Option<Fp> {
        self.field().inv(self.value).map(|value| Fp { value, p: self.p })
    }

    pub fn checked_add(self, rhs: Fp) -> Result<Fp> {
        self.same(rhs)?;
        Ok(Fp {
            value: self.field().add(self.value, rhs.value),
            p: self.p,
        })
    }

    pub fn checked_mul(self, rhs: Fp) -> Result<Fp> {
        self.same(rhs)?;
        Ok(Fp {
            value: self.field().mul(self.value, rhs.value),
            p: self.p,
        })
    }

    fn same(self, rhs: Fp) -> Result<()> {
        if self.p != rhs.p {
            return Err(Error::ModulusMismatch(self.p, rhs.p));
        }
        Ok(())
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// The operators panic on mismatched moduli; use the checked_* methods to get an error instead.
impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        self.checked_add(rhs).expect("modulus mismatch")
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self + (-rhs)
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        self.checked_mul(rhs).expect("modulus mismatch")
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            value: self.field().neg(self.value),
            p: self.p,
        }
    }
}
