//! Sparse multivariate polynomials over F_p in (x, y, x0, y0) and formal
//! fractions of them, used for degree computation and equivalence checks.

use std::collections::BTreeMap;

use super::{RationalMapExpr, Var};
use crate::error::{Error, Result};
use crate::fp::PrimeModulus;

const MAX_DEGREE: u32 = 4096;

type Monomial = [u32; 4];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, u64>,
    modulus: PrimeModulus,
}

impl MultiPoly {
    pub fn zero(modulus: PrimeModulus) -> Self {
        Self {
            terms: BTreeMap::new(),
            modulus,
        }
    }

    pub fn constant(c: u64, modulus: PrimeModulus) -> Self {
        let mut p = Self::zero(modulus);
        let c = modulus.reduce(c);
        if c != 0 {
            p.terms.insert([0; 4], c);
        }
        p
    }

    pub fn var(v: Var, modulus: PrimeModulus) -> Self {
        let mut mono = [0; 4];
        mono[v.index()] = 1;
        let mut p = Self::zero(modulus);
        p.terms.insert(mono, 1);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    fn insert(&mut self, mono: Monomial, c: u64) {
        let m = self.modulus;
        let entry = self.terms.entry(mono).or_insert(0);
        *entry = m.add(*entry, c);
        if *entry == 0 {
            self.terms.remove(&mono);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&mono, &c) in &other.terms {
            out.insert(mono, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus;
        Self {
            terms: self.terms.iter().map(|(&k, &c)| (k, m.neg(c))).collect(),
            modulus: m,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.modulus;
        let mut out = Self::zero(m);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let mono = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
                out.insert(mono, m.mul(ca, cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        if self.total_degree().saturating_mul(e) > MAX_DEGREE {
            return Err(Error::Unsupported(format!(
                "expanded degree exceeds {MAX_DEGREE}"
            )));
        }
        let mut acc = Self::constant(1, self.modulus);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        Ok(acc)
    }
}

/// num / den with den nonzero; no cancellation is attempted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fraction {
    pub num: MultiPoly,
    pub den: MultiPoly,
}

impl Fraction {
    /// Builds the single fraction for `expr`. With `shift = Some(h)` the
    /// variable x0 is replaced by x + h before expansion.
    pub fn from_expr(expr: &RationalMapExpr, m: PrimeModulus, shift: Option<u64>) -> Result<Self> {
        let mut env = [Var::X, Var::Y, Var::X0, Var::Y0].map(|v| MultiPoly::var(v, m));
        if let Some(h) = shift {
            env[Var::X0.index()] = MultiPoly::var(Var::X, m).add(&MultiPoly::constant(h, m));
        }
        build(expr, m, &env)
    }

    pub fn degree(&self) -> u32 {
        self.num.total_degree().max(self.den.total_degree())
    }

    /// num1 * den2 == num2 * den1
    pub fn same_function(&self, other: &Fraction) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

fn build(expr: &RationalMapExpr, m: PrimeModulus, env: &[MultiPoly; 4]) -> Result<Fraction> {
    use RationalMapExpr::*;
    let one = || MultiPoly::constant(1, m);
    Ok(match expr {
        Const(c) => Fraction {
            num: MultiPoly::constant(*c, m),
            den: one(),
        },
        Var(v) => Fraction {
            num: env[v.index()].clone(),
            den: one(),
        },
        Neg(a) => {
            let a = build(a, m, env)?;
            Fraction {
                num: a.num.neg(),
                den: a.den,
            }
        }
        Add(a, b) | Sub(a, b) => {
            let (a, b) = (build(a, m, env)?, build(b, m, env)?);
            let left = a.num.mul(&b.den);
            let right = b.num.mul(&a.den);
            Fraction {
                num: if matches!(expr, Add(..)) {
                    left.add(&right)
                } else {
                    left.sub(&right)
                },
                den: a.den.mul(&b.den),
            }
        }
        Mul(a, b) => {
            let (a, b) = (build(a, m, env)?, build(b, m, env)?);
            Fraction {
                num: a.num.mul(&b.num),
                den: a.den.mul(&b.den),
            }
        }
        Div(a, b) => {
            let (a, b) = (build(a, m, env)?, build(b, m, env)?);
            if b.num.is_zero() {
                return Err(Error::ZeroDenominator);
            }
            Fraction {
                num: a.num.mul(&b.den),
                den: a.den.mul(&b.num),
            }
        }
        Pow(a, e) => {
            let a = build(a, m, env)?;
            Fraction {
                num: a.num.pow(*e)?,
                den: a.den.pow(*e)?,
            }
        }
    })
}
