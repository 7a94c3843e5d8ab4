//! Arithmetic in the prime field F_p for odd primes p < 2^62.
//!
//! [`PrimeModulus`] carries the raw operations on canonical representatives
//! (`u64` values in `[0, p)`); [`Residue`] pairs a value with its modulus and
//! exposes the usual operators. Hot loops elsewhere in the crate work on raw
//! `u64`s through the modulus to avoid carrying the modulus around.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Exclusive upper bound on supported moduli.
pub const MAX_MODULUS: u64 = 1 << 62;

/// An odd prime 3 <= p < 2^62.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if !(3..MAX_MODULUS).contains(&p) {
            return Err(Error::InvalidModulus {
                p,
                reason: "must satisfy 3 <= p < 2^62",
            });
        }
        if !is_prime(p) {
            return Err(Error::InvalidModulus {
                p,
                reason: "not prime",
            });
        }
        Ok(Self(p))
    }

    /// Smallest odd prime modulus >= `n`.
    pub fn at_least(n: u64) -> Result<Self> {
        Self::new(next_prime(n.max(3))?)
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// (p - 1) / 2, the largest canonical square root.
    #[inline]
    pub fn half(self) -> u64 {
        (self.0 - 1) / 2
    }

    #[inline]
    pub fn reduce(self, v: u64) -> u64 {
        v % self.0
    }

    #[inline]
    pub fn reduce_i64(self, v: i64) -> u64 {
        v.rem_euclid(self.0 as i64) as u64
    }

    pub fn residue(self, v: u64) -> Residue {
        Residue {
            value: self.reduce(v),
            modulus: self,
        }
    }

    pub fn residue_i64(self, v: i64) -> Residue {
        Residue {
            value: self.reduce_i64(v),
            modulus: self,
        }
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        if self.0 <= u32::MAX as u64 {
            (a * b) % self.0
        } else {
            ((a as u128 * b as u128) % self.0 as u128) as u64
        }
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.0;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse by the extended Euclidean algorithm; `None` for zero.
    pub fn inv(self, a: u64) -> Option<u64> {
        let a = a % self.0;
        if a == 0 {
            return None;
        }
        let (mut r0, mut r1) = (self.0 as i128, a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Some(s0.rem_euclid(self.0 as i128) as u64)
    }

    /// Legendre symbol (a | p) in {-1, 0, 1}, via the binary Jacobi algorithm.
    pub fn legendre(self, a: u64) -> i32 {
        jacobi(a % self.0, self.0)
    }

    /// The square root of `a` lying in [0, (p-1)/2], if `a` is a square.
    pub fn sqrt(self, a: u64) -> Option<u64> {
        let a = a % self.0;
        if a == 0 {
            return Some(0);
        }
        if self.legendre(a) != 1 {
            return None;
        }
        let root = self.tonelli_shanks(a);
        debug_assert_eq!(self.mul(root, root), a);
        Some(root.min(self.0 - root))
    }

    // `a` must be a nonzero quadratic residue.
    fn tonelli_shanks(self, a: u64) -> u64 {
        let p = self.0;
        if p & 3 == 3 {
            return self.pow(a, (p + 1) / 4);
        }
        let s = (p - 1).trailing_zeros();
        let q = (p - 1) >> s;
        let z = (2..p)
            .find(|&z| self.legendre(z) == -1)
            .expect("odd prime has a non-residue");

        let mut m = s;
        let mut c = self.pow(z, q);
        let mut t = self.pow(a, q);
        let mut r = self.pow(a, q.div_ceil(2));
        while t != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = self.mul(t2, t2);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = self.mul(b, b);
            }
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        r
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn jacobi(mut a: u64, mut n: u64) -> i32 {
    let mut sign = 1;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz & 1 == 1 && matches!(n & 7, 3 | 5) {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        if a & 3 == 3 && n & 3 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

fn mul_mod_u64(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, n);
        }
        base = mul_mod_u64(base, base, n);
        exp >>= 1;
    }
    acc
}

// The first twelve primes as Miller-Rabin witnesses are a deterministic
// certificate for every n < 3.3 * 10^24, which covers all of u64.
const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality test for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n == w {
            return true;
        }
        if n.is_multiple_of(w) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &w in &WITNESSES {
        let mut x = pow_mod_u64(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime >= `n`, for 2 <= n < 2^62.
pub fn next_prime(n: u64) -> Result<u64> {
    if n >= MAX_MODULUS {
        return Err(Error::OutOfRange(n));
    }
    let mut c = n.max(2);
    while !is_prime(c) {
        c += 1;
        if c >= MAX_MODULUS {
            return Err(Error::OutOfRange(n));
        }
    }
    Ok(c)
}

/// A canonical element of F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: PrimeModulus,
}

impl Residue {
    pub fn new(value: u64, modulus: PrimeModulus) -> Self {
        modulus.residue(value)
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_modulus(self, other: Residue) -> Result<PrimeModulus> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.get(),
                right: other.modulus.get(),
            });
        }
        Ok(self.modulus)
    }

    pub fn checked_add(self, other: Residue) -> Result<Residue> {
        let m = self.same_modulus(other)?;
        Ok(Residue {
            value: m.add(self.value, other.value),
            modulus: m,
        })
    }

    pub fn checked_sub(self, other: Residue) -> Result<Residue> {
        let m = self.same_modulus(other)?;
        Ok(Residue {
            value: m.sub(self.value, other.value),
            modulus: m,
        })
    }

    pub fn checked_mul(self, other: Residue) -> Result<Residue> {
        let m = self.same_modulus(other)?;
        Ok(Residue {
            value: m.mul(self.value, other.value),
            modulus: m,
        })
    }

    pub fn pow(self, exp: u64) -> Residue {
        Residue {
            value: self.modulus.pow(self.value, exp),
            modulus: self.modulus,
        }
    }

    pub fn inv(self) -> Result<Residue> {
        let value = self
            .modulus
            .inv(self.value)
            .ok_or(Error::NotInvertible(self.value))?;
        Ok(Residue {
            value,
            modulus: self.modulus,
        })
    }

    pub fn legendre(self) -> i32 {
        self.modulus.legendre(self.value)
    }

    /// Canonical square root in [0, (p-1)/2].
    pub fn sqrt(self) -> Option<Residue> {
        self.modulus.sqrt(self.value).map(|value| Residue {
            value,
            modulus: self.modulus,
        })
    }
}

// Operators panic on mismatched moduli; use the `checked_*` forms to get an error.
impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        self.checked_add(rhs).expect("residue modulus mismatch")
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        self.checked_sub(rhs).expect("residue modulus mismatch")
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        self.checked_mul(rhs).expect("residue modulus mismatch")
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue {
            value: self.modulus.neg(self.value),
            modulus: self.modulus,
        }
    }
}

impl PartialOrd for Residue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.modulus == other.modulus {
            Some(self.value.cmp(&other.value))
        } else {
            None
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
