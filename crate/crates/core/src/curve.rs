//! The curve y^2 = f(x) over F_p, its affine points, and the restricted
//! x-coordinate sets S_I.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fp::{PrimeModulus, Residue};
use crate::poly::Polynomial;

const CHUNK: u64 = 1 << 14;

/// Half-open integer range `{lo, ..., hi - 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: u64,
    hi: u64,
}

impl Interval {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo > hi {
            return Err(Error::Precondition(format!(
                "interval {lo}:{hi} has lo > hi"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn full(modulus: PrimeModulus) -> Self {
        Self {
            lo: 0,
            hi: modulus.get(),
        }
    }

    /// `[0, (p+1)/2)`: every canonical square root.
    pub fn half(modulus: PrimeModulus) -> Self {
        Self {
            lo: 0,
            hi: modulus.half() + 1,
        }
    }

    pub fn empty() -> Self {
        Self { lo: 0, hi: 0 }
    }

    #[inline]
    pub fn lo(self) -> u64 {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> u64 {
        self.hi
    }

    /// Number of integers in the interval.
    #[inline]
    pub fn len(self) -> u64 {
        self.hi - self.lo
    }

    pub fn is_empty(self) -> bool {
        self.lo == self.hi
    }

    #[inline]
    pub fn contains(self, v: u64) -> bool {
        self.lo <= v && v < self.hi
    }

    pub fn is_subset_of(self, other: Interval) -> bool {
        self.is_empty() || (other.lo <= self.lo && self.hi <= other.hi)
    }

    pub fn is_full(self, modulus: PrimeModulus) -> bool {
        self.lo == 0 && self.hi == modulus.get()
    }

    /// Errors unless the interval lies in `[0, p)`.
    pub fn check_within(self, modulus: PrimeModulus) -> Result<()> {
        if self.hi > modulus.get() {
            return Err(Error::Precondition(format!(
                "interval {self} exceeds [0, {modulus})"
            )));
        }
        Ok(())
    }

    /// Errors unless the interval lies in `[0, (p-1)/2]`.
    pub fn check_half(self, modulus: PrimeModulus) -> Result<()> {
        if !self.is_subset_of(Self::half(modulus)) {
            return Err(Error::Precondition(format!(
                "interval {self} is not inside [0, (p-1)/2] for p = {modulus}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl FromStr for Interval {
    type Err = Error;

    /// Parses `lo:hi`.
    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("interval `{s}` is not of the form lo:hi")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<u64>()
                .map_err(|_| Error::Config(format!("bad interval bound `{v}`")))
        };
        Interval::new(parse(lo)?, parse(hi)?)
    }
}

/// A point with raw canonical coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurvePoint {
    pub x: u64,
    pub y: u64,
}

/// y^2 = f(x) with f not a square over the algebraic closure and 1 <= deg f < p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperellipticCurve {
    f: Polynomial,
}

impl HyperellipticCurve {
    pub fn new(f: Polynomial) -> Result<Self> {
        let d = match f.degree() {
            None | Some(0) => {
                return Err(Error::Precondition(
                    "f must have degree at least 1".to_string(),
                ))
            }
            Some(d) => d,
        };
        if d as u64 >= f.modulus().get() {
            return Err(Error::Unsupported(format!(
                "degree {d} must be below p = {}",
                f.modulus()
            )));
        }
        if let Some((c, g)) = f.square_root_certificate()? {
            return Err(Error::SquarePolynomial(format!("{f} = {c} * ({g})^2")));
        }
        Ok(Self { f })
    }

    /// Convenience constructor from signed coefficients, low degree first.
    pub fn from_coeffs(coeffs: &[i64], p: u64) -> Result<Self> {
        let modulus = PrimeModulus::new(p)?;
        Self::new(Polynomial::from_i64(coeffs, modulus))
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.f.modulus()
    }

    pub fn f(&self) -> &Polynomial {
        &self.f
    }

    pub fn degree(&self) -> usize {
        self.f.degree().expect("curve polynomial is nonzero")
    }

    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        self.f.eval(x)
    }

    /// The canonical y in `[0, (p-1)/2]` with y^2 = f(x), if any.
    #[inline]
    pub fn canonical_y(&self, x: u64) -> Option<u64> {
        self.modulus().sqrt(self.f.eval(x))
    }

    /// All y with y^2 = f(x): none, one (y = 0) or two.
    pub fn ys(&self, x: u64) -> impl Iterator<Item = u64> {
        let p = self.modulus().get();
        let (a, b) = match self.canonical_y(x) {
            None => (None, None),
            Some(0) => (Some(0), None),
            Some(y) => (Some(y), Some(p - y)),
        };
        a.into_iter().chain(b)
    }

    pub fn contains(&self, point: CurvePoint) -> bool {
        let m = self.modulus();
        m.mul(point.y, point.y) == self.f.eval(point.x)
    }

    fn chunks(&self) -> Vec<(u64, u64)> {
        let p = self.modulus().get();
        (0..p.div_ceil(CHUNK))
            .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(p)))
            .collect()
    }

    /// #{(x, y) in F_p^2 : y^2 = f(x)} = sum over x of 1 + (f(x) | p).
    pub fn affine_point_count(&self) -> u64 {
        let m = self.modulus();
        self.chunks()
            .par_iter()
            .map(|&(lo, hi)| {
                (lo..hi)
                    .map(|x| (1 + m.legendre(self.f.eval(x))) as u64)
                    .sum::<u64>()
            })
            .sum()
    }

    /// S_I: all x with a point (x, y), y in I. Requires I inside [0, (p-1)/2],
    /// where the canonical root is the only candidate.
    pub fn x_coordinate_set(&self, interval: Interval) -> Result<XCoordinateSet> {
        let m = self.modulus();
        interval.check_half(m)?;
        let points = if interval.is_empty() {
            Vec::new()
        } else {
            let parts: Vec<Vec<CurvePoint>> = self
                .chunks()
                .par_iter()
                .map(|&(lo, hi)| {
                    (lo..hi)
                        .filter_map(|x| {
                            self.canonical_y(x)
                                .filter(|&y| interval.contains(y))
                                .map(|y| CurvePoint { x, y })
                        })
                        .collect()
                })
                .collect();
            parts.concat()
        };
        Ok(XCoordinateSet {
            points,
            interval,
            modulus: m,
        })
    }

    /// Observed |S_I|, the main term |I|, and the explicit deviation bound
    /// 4 d (d - 1) sqrt(p) ln^2 p.
    pub fn cardinality_deviation(&self, interval: Interval) -> Result<CardinalityDeviation> {
        let set = self.x_coordinate_set(interval)?;
        let d = self.degree() as f64;
        let p = self.modulus().get() as f64;
        Ok(CardinalityDeviation {
            observed: set.len() as u64,
            main_term: interval.len(),
            bound: 4.0 * d * (d - 1.0) * p.sqrt() * p.ln().powi(2),
        })
    }
}

impl fmt::Display for HyperellipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = {} over F_{}", self.f, self.modulus())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CardinalityDeviation {
    pub observed: u64,
    pub main_term: u64,
    pub bound: f64,
}

impl CardinalityDeviation {
    pub fn deviation(&self) -> u64 {
        self.observed.abs_diff(self.main_term)
    }

    pub fn within_bound(&self) -> bool {
        (self.deviation() as f64) <= self.bound
    }
}

/// S_I with the unique y in I attached to each x, sorted by x.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XCoordinateSet {
    points: Vec<CurvePoint>,
    interval: Interval,
    modulus: PrimeModulus,
}

impl XCoordinateSet {
    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn xs(&self) -> impl Iterator<Item = u64> + '_ {
        self.points.iter().map(|pt| pt.x)
    }

    pub fn residues(&self) -> impl Iterator<Item = (Residue, Residue)> + '_ {
        let m = self.modulus;
        self.points
            .iter()
            .map(move |pt| (m.residue(pt.x), m.residue(pt.y)))
    }

    /// The y attached to `x`, if `x` is in the set.
    pub fn y_of(&self, x: u64) -> Option<u64> {
        self.points
            .binary_search_by_key(&x, |pt| pt.x)
            .ok()
            .map(|i| self.points[i].y)
    }

    pub fn contains(&self, x: u64) -> bool {
        self.y_of(x).is_some()
    }
}
