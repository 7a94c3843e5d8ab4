//! Dense univariate polynomials over F_p.

use std::fmt;

use crate::error::{Error, Result};
use crate::fp::{PrimeModulus, Residue};

/// Coefficients low degree first; trailing coefficient nonzero. The zero
/// polynomial has an empty coefficient list and no degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<u64>,
    modulus: PrimeModulus,
}

impl Polynomial {
    pub fn new(coeffs: Vec<u64>, modulus: PrimeModulus) -> Self {
        let coeffs = coeffs.into_iter().map(|c| modulus.reduce(c)).collect();
        let mut poly = Self { coeffs, modulus };
        poly.trim();
        poly
    }

    pub fn from_i64(coeffs: &[i64], modulus: PrimeModulus) -> Self {
        Self::new(
            coeffs.iter().map(|&c| modulus.reduce_i64(c)).collect(),
            modulus,
        )
    }

    pub fn zero(modulus: PrimeModulus) -> Self {
        Self {
            coeffs: Vec::new(),
            modulus,
        }
    }

    pub fn constant(c: u64, modulus: PrimeModulus) -> Self {
        Self::new(vec![c], modulus)
    }

    /// Parses a comma-separated coefficient list, low degree first ("1,0,0,1" = x^3 + 1).
    pub fn parse(text: &str, modulus: PrimeModulus) -> Result<Self> {
        let coeffs = text
            .split(',')
            .map(|s| {
                s.trim().parse::<i64>().map_err(|_| {
                    Error::Config(format!("bad polynomial coefficient `{}`", s.trim()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_i64(&coeffs, modulus))
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coefficient(&self, i: usize) -> Residue {
        self.modulus
            .residue(self.coeffs.get(i).copied().unwrap_or(0))
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    /// Horner evaluation at a raw canonical value.
    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        let m = self.modulus;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| m.add(m.mul(acc, x), c))
    }

    pub fn eval_residue(&self, x: Residue) -> Result<Residue> {
        if x.modulus() != self.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.get(),
                right: x.modulus().get(),
            });
        }
        Ok(self.modulus.residue(self.eval(x.value())))
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self.modulus;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                m.add(
                    self.coeffs.get(i).copied().unwrap_or(0),
                    other.coeffs.get(i).copied().unwrap_or(0),
                )
            })
            .collect();
        Self::new(coeffs, m)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let m = self.modulus;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                m.sub(
                    self.coeffs.get(i).copied().unwrap_or(0),
                    other.coeffs.get(i).copied().unwrap_or(0),
                )
            })
            .collect();
        Self::new(coeffs, m)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.modulus;
        if self.is_zero() || other.is_zero() {
            return Self::zero(m);
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = m.add(out[i + j], m.mul(a, b));
            }
        }
        Self::new(out, m)
    }

    pub fn scale(&self, c: u64) -> Self {
        let m = self.modulus;
        Self::new(self.coeffs.iter().map(|&a| m.mul(a, c)).collect(), m)
    }

    pub fn monic(&self) -> Self {
        match self.modulus.inv(self.leading()) {
            Some(inv) => self.scale(inv),
            None => self.clone(),
        }
    }

    pub fn derivative(&self) -> Self {
        let m = self.modulus;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| m.mul(c, m.reduce(i as u64)))
            .collect();
        Self::new(coeffs, m)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let m = self.modulus;
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead_inv = m
            .inv(divisor.leading())
            .expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(m), self.clone());
        }
        let mut quot = vec![0u64; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = m.mul(rem[k + dd], lead_inv);
            quot[k] = c;
            if c != 0 {
                for (j, &b) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = m.sub(rem[k + j], m.mul(c, b));
                }
            }
        }
        rem.truncate(dd);
        (Self::new(quot, m), Self::new(rem, m))
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: monic `a_1, ..., a_k` with
    /// `f = lc(f) * a_1 * a_2^2 * ... * a_k^k`. Requires `deg f < p`.
    pub fn squarefree_decomposition(&self) -> Result<Vec<Polynomial>> {
        let deg = match self.degree() {
            None | Some(0) => return Ok(Vec::new()),
            Some(d) => d,
        };
        if deg as u64 >= self.modulus.get() {
            return Err(Error::Unsupported(format!(
                "degree {deg} is not below the characteristic {}",
                self.modulus
            )));
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let c = df.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut factors = Vec::new();
        loop {
            let a = b.gcd(&d);
            b = b.div_rem(&a).0;
            let c = d.div_rem(&a).0;
            factors.push(a);
            if b.degree() == Some(0) {
                break;
            }
            d = c.sub(&b.derivative());
        }
        Ok(factors)
    }

    /// True iff `f = c * g^2` over the algebraic closure, i.e. every
    /// irreducible factor appears with even multiplicity.
    pub fn is_square_in_closure(&self) -> Result<bool> {
        Ok(self.square_root_certificate()?.is_some())
    }

    /// When `f` is a square in the closure, returns `(c, g)` with `f = c * g^2`.
    pub fn square_root_certificate(&self) -> Result<Option<(u64, Polynomial)>> {
        let m = self.modulus;
        if self.is_zero() {
            return Ok(Some((0, Self::zero(m))));
        }
        let factors = self.squarefree_decomposition()?;
        if factors
            .iter()
            .enumerate()
            .any(|(i, a)| i % 2 == 0 && a.degree() != Some(0))
        {
            return Ok(None);
        }
        let mut g = Self::constant(1, m);
        for (i, a) in factors.iter().enumerate() {
            for _ in 0..i.div_ceil(2) {
                g = g.mul(a);
            }
        }
        Ok(Some((self.leading(), g)))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, c) => write!(f, "{c}*x")?,
                (i, 1) => write!(f, "x^{i}")?,
                (i, c) => write!(f, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}
