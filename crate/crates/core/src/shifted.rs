//! Counts on the x-shifted curve C_H.
//!
//! For a base point P = (x, y) with x in S_I, a shifted coordinate x + h is
//! "in" when it lies in S_{I,J,P}: it belongs to S_I with attached point
//! P0 = (x + h, y0), and g(P, P0) is defined and lands in J. N(H) counts base
//! points for which every shift is in; N(A, B) additionally requires every
//! shift in B to be out. Both are computed by a single pass over S_I, and
//! N(A, B) also by inclusion-exclusion over subsets of B.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};
use rayon::prelude::*;

use crate::curve::{CurvePoint, HyperellipticCurve, Interval, XCoordinateSet};
use crate::error::{Error, Result};
use crate::fp::PrimeModulus;
use crate::rational_map::{numeric_rank_check, RankVerdict, RationalMapExpr};

/// Largest |B| accepted by the inclusion-exclusion count.
pub const MAX_EXCLUSION_SET: usize = 20;

/// Distinct nonzero shifts h_1, ..., h_r mod p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShiftSet {
    shifts: Vec<u64>,
    modulus: PrimeModulus,
}

impl ShiftSet {
    pub fn new(shifts: &[i64], modulus: PrimeModulus) -> Result<Self> {
        let reduced: Vec<u64> = shifts.iter().map(|&h| modulus.reduce_i64(h)).collect();
        Self::from_residues(reduced, modulus)
    }

    pub fn from_residues(shifts: Vec<u64>, modulus: PrimeModulus) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &h in &shifts {
            if h >= modulus.get() {
                return Err(Error::Precondition(format!(
                    "shift {h} is not reduced mod {modulus}"
                )));
            }
            if h == 0 {
                return Err(Error::Precondition(
                    "shifts must be nonzero mod p".to_string(),
                ));
            }
            if !seen.insert(h) {
                return Err(Error::Precondition(format!("shift {h} repeated mod p")));
            }
        }
        Ok(Self { shifts, modulus })
    }

    pub fn empty(modulus: PrimeModulus) -> Self {
        Self {
            shifts: Vec::new(),
            modulus,
        }
    }

    pub fn shifts(&self) -> &[u64] {
        &self.shifts
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_disjoint(&self, other: &ShiftSet) -> bool {
        self.shifts.iter().all(|h| !other.shifts.contains(h))
    }

    pub fn union(&self, other: &ShiftSet) -> Result<ShiftSet> {
        let mut all = self.shifts.clone();
        all.extend_from_slice(&other.shifts);
        Self::from_residues(all, self.modulus)
    }
}

/// C_H together with its degree D = 2^r d.
#[derive(Clone, Debug)]
pub struct ShiftedCurveSpec<'a> {
    pub curve: &'a HyperellipticCurve,
    pub shifts: &'a ShiftSet,
}

impl<'a> ShiftedCurveSpec<'a> {
    pub fn new(curve: &'a HyperellipticCurve, shifts: &'a ShiftSet) -> Result<Self> {
        if curve.modulus() != shifts.modulus() {
            return Err(Error::ModulusMismatch {
                left: curve.modulus().get(),
                right: shifts.modulus().get(),
            });
        }
        Ok(Self { curve, shifts })
    }

    pub fn r(&self) -> usize {
        self.shifts.len()
    }

    pub fn degree(&self) -> u64 {
        (1u64 << self.r()) * self.curve.degree() as u64
    }
}

/// S_I with the distortion (J, g) attached: membership in S_{I,J,P}.
#[derive(Clone, Debug)]
pub struct DistortedSet<'a> {
    set: &'a XCoordinateSet,
    j: Interval,
    g: &'a RationalMapExpr,
}

impl<'a> DistortedSet<'a> {
    pub fn new(set: &'a XCoordinateSet, j: Interval, g: &'a RationalMapExpr) -> Result<Self> {
        j.check_within(set.modulus())?;
        Ok(Self { set, j, g })
    }

    pub fn set(&self) -> &XCoordinateSet {
        self.set
    }

    pub fn j(&self) -> Interval {
        self.j
    }

    pub fn map(&self) -> &RationalMapExpr {
        self.g
    }

    /// g(P, P0) is defined and lies in J.
    #[inline]
    pub fn accepts(&self, base: CurvePoint, other: CurvePoint) -> bool {
        self.g
            .eval_raw(self.set.modulus(), [base.x, base.y, other.x, other.y])
            .is_some_and(|v| self.j.contains(v))
    }

    /// `x0` is in S_{I,J,P} for the base point P.
    #[inline]
    pub fn contains_relative(&self, base: CurvePoint, x0: u64) -> bool {
        match self.set.y_of(x0) {
            Some(y0) => self.accepts(base, CurvePoint { x: x0, y: y0 }),
            None => false,
        }
    }

    fn shifted(&self, base: CurvePoint, h: u64) -> u64 {
        self.set.modulus().add(base.x, h)
    }

    fn count_where<F>(&self, pred: F) -> u64
    where
        F: Fn(CurvePoint) -> bool + Sync,
    {
        self.set.points().par_iter().filter(|&&pt| pred(pt)).count() as u64
    }

    /// N(H): base points whose shifts by every h in H are in S_{I,J,P}.
    pub fn count_n_h(&self, shifts: &ShiftSet) -> u64 {
        self.count_where(|pt| {
            shifts
                .shifts()
                .iter()
                .all(|&h| self.contains_relative(pt, self.shifted(pt, h)))
        })
    }

    /// N(A, B) by direct enumeration.
    pub fn count_n_ab_direct(&self, a: &ShiftSet, b: &ShiftSet) -> Result<u64> {
        check_ab(a, b)?;
        Ok(self.count_where(|pt| {
            a.shifts()
                .iter()
                .all(|&h| self.contains_relative(pt, self.shifted(pt, h)))
                && b.shifts()
                    .iter()
                    .all(|&h| !self.contains_relative(pt, self.shifted(pt, h)))
        }))
    }

    /// N(A, B) = sum over C subset of B of (-1)^|C| N(A u C).
    pub fn count_n_ab_inclusion_exclusion(&self, a: &ShiftSet, b: &ShiftSet) -> Result<i64> {
        check_ab(a, b)?;
        if b.len() > MAX_EXCLUSION_SET {
            return Err(Error::Precondition(format!(
                "|B| = {} exceeds {MAX_EXCLUSION_SET}",
                b.len()
            )));
        }
        let mut total = 0i64;
        for mask in 0u32..(1u32 << b.len()) {
            let chosen: Vec<u64> = (0..b.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| b.shifts()[i])
                .collect();
            let c = ShiftSet::from_residues(chosen, b.modulus())?;
            let n = self.count_n_h(&a.union(&c)?) as i64;
            if mask.count_ones() % 2 == 0 {
                total += n;
            } else {
                total -= n;
            }
        }
        Ok(total)
    }
}

fn check_ab(a: &ShiftSet, b: &ShiftSet) -> Result<()> {
    if !a.is_disjoint(b) {
        return Err(Error::Precondition("A and B overlap".to_string()));
    }
    Ok(())
}

fn build_set(curve: &HyperellipticCurve, i: Interval, j: Interval) -> Result<XCoordinateSet> {
    j.check_within(curve.modulus())?;
    curve.x_coordinate_set(i)
}

/// N(H) for the curve, shifts, intervals and map.
pub fn count_n_h(
    curve: &HyperellipticCurve,
    shifts: &ShiftSet,
    i: Interval,
    j: Interval,
    g: &RationalMapExpr,
) -> Result<u64> {
    ShiftedCurveSpec::new(curve, shifts)?;
    let set = build_set(curve, i, j)?;
    Ok(DistortedSet::new(&set, j, g)?.count_n_h(shifts))
}

pub fn count_n_ab_direct(
    curve: &HyperellipticCurve,
    a: &ShiftSet,
    b: &ShiftSet,
    i: Interval,
    j: Interval,
    g: &RationalMapExpr,
) -> Result<u64> {
    let set = build_set(curve, i, j)?;
    DistortedSet::new(&set, j, g)?.count_n_ab_direct(a, b)
}

pub fn count_n_ab_inclusion_exclusion(
    curve: &HyperellipticCurve,
    a: &ShiftSet,
    b: &ShiftSet,
    i: Interval,
    j: Interval,
    g: &RationalMapExpr,
) -> Result<i64> {
    let set = build_set(curve, i, j)?;
    DistortedSet::new(&set, j, g)?.count_n_ab_inclusion_exclusion(a, b)
}

/// Main term (exact) and explicit leading error bound of a count.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub main_term: BigRational,
    pub bound: f64,
}

impl Prediction {
    pub fn main_term_f64(&self) -> f64 {
        ratio_to_f64(&self.main_term)
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

fn big(v: u64) -> BigInt {
    BigInt::from(v)
}

/// |I|^{r+1} |J|^r / p^{2r}, with bound 2^{3r+2} d (2^r d - 1) sqrt(p) ln^{2r+2} p.
pub fn predicted_n_h(p: u64, d: u64, r: u32, i_len: u64, j_len: u64) -> Prediction {
    let main_term = BigRational::new(
        Pow::pow(big(i_len), r + 1) * Pow::pow(big(j_len), r),
        Pow::pow(big(p), 2 * r),
    );
    let (pf, df) = (p as f64, d as f64);
    let bound = 2f64.powi(3 * r as i32 + 2)
        * df
        * (2f64.powi(r as i32) * df - 1.0)
        * pf.sqrt()
        * pf.ln().powi(2 * r as i32 + 2);
    Prediction { main_term, bound }
}

/// |I| q^{|A|} (1 - q)^{|B|} with q = |I||J|/p^2, and the explicit bound
/// 2^{3|A|+4|B|+1} d (2^{|A|+|B|} d - 1) sqrt(p) ln^{2|A|+2|B|+2} p.
pub fn predicted_n_ab(p: u64, d: u64, a: u32, b: u32, i_len: u64, j_len: u64) -> Prediction {
    let q = BigRational::new(big(i_len) * big(j_len), big(p) * big(p));
    let one_minus_q = BigRational::one() - &q;
    let main_term =
        BigRational::from_integer(big(i_len)) * Pow::pow(q, a) * Pow::pow(one_minus_q, b);
    let (pf, df) = (p as f64, d as f64);
    let bound = 2f64.powi(3 * a as i32 + 4 * b as i32 + 1)
        * df
        * (2f64.powi((a + b) as i32) * df - 1.0)
        * pf.sqrt()
        * pf.ln().powi(2 * (a + b) as i32 + 2);
    Prediction { main_term, bound }
}

/// An observed count with its model prediction and hypothesis warnings.
#[derive(Clone, Debug, PartialEq)]
pub struct CountReport {
    pub observed: i64,
    pub main_term: BigRational,
    pub explicit_bound: f64,
    pub hypothesis_flags: Vec<String>,
}

impl CountReport {
    pub fn deviation(&self) -> f64 {
        ratio_to_f64(&(BigRational::from_integer(BigInt::from(self.observed)) - &self.main_term))
            .abs()
    }

    pub fn within_bound(&self) -> bool {
        self.deviation() <= self.explicit_bound
    }
}

/// Warnings for the counting hypotheses: 1 <= deg g_i < D and the numeric
/// independence probe for {1, g_1, ..., g_r}. Both are vacuous when J is full.
pub fn hypothesis_flags(
    curve: &HyperellipticCurve,
    shifts: &ShiftSet,
    j: Interval,
    g: &RationalMapExpr,
) -> Vec<String> {
    let m = curve.modulus();
    let mut flags = Vec::new();
    if shifts.is_empty() || j.is_full(m) {
        return flags;
    }
    let big_d = (1u64 << shifts.len()) * curve.degree() as u64;
    for &h in shifts.shifts() {
        match g.shifted_degree(m, h) {
            Ok(deg) if deg >= 1 && (deg as u64) < big_d => {}
            Ok(deg) => flags.push(format!("deg g_{h} = {deg} outside [1, {big_d})")),
            Err(e) => flags.push(format!("deg g_{h} unavailable: {e}")),
        }
    }
    let samples = 8 * (shifts.len() + 2);
    match numeric_rank_check(curve, shifts, g, samples, 0x5eed) {
        Ok(probe) if probe.verdict == RankVerdict::Independent => {}
        Ok(probe) => flags.push(format!("independence probe: {:?}", probe.verdict)),
        Err(e) => flags.push(format!("independence probe failed: {e}")),
    }
    flags
}

pub fn n_h_report(
    curve: &HyperellipticCurve,
    shifts: &ShiftSet,
    i: Interval,
    j: Interval,
    g: &RationalMapExpr,
) -> Result<CountReport> {
    let observed = count_n_h(curve, shifts, i, j, g)? as i64;
    let pred = predicted_n_h(
        curve.modulus().get(),
        curve.degree() as u64,
        shifts.len() as u32,
        i.len(),
        j.len(),
    );
    Ok(CountReport {
        observed,
        main_term: pred.main_term,
        explicit_bound: pred.bound,
        hypothesis_flags: hypothesis_flags(curve, shifts, j, g),
    })
}

pub fn n_ab_report(
    curve: &HyperellipticCurve,
    a: &ShiftSet,
    b: &ShiftSet,
    i: Interval,
    j: Interval,
    g: &RationalMapExpr,
) -> Result<CountReport> {
    let observed = count_n_ab_direct(curve, a, b, i, j, g)? as i64;
    let pred = predicted_n_ab(
        curve.modulus().get(),
        curve.degree() as u64,
        a.len() as u32,
        b.len() as u32,
        i.len(),
        j.len(),
    );
    Ok(CountReport {
        observed,
        main_term: pred.main_term,
        explicit_bound: pred.bound,
        hypothesis_flags: hypothesis_flags(curve, &a.union(b)?, j, g),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational_map::builtin;

    fn x3p1() -> HyperellipticCurve {
        HyperellipticCurve::from_coeffs(&[1, 0, 0, 1], 7).unwrap()
    }

    fn iv(lo: u64, hi: u64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn shift_set_validation() {
        let m = PrimeModulus::new(7).unwrap();
        assert!(ShiftSet::new(&[1, 8], m).is_err());
        assert!(ShiftSet::new(&[7], m).is_err());
        assert_eq!(ShiftSet::new(&[-1], m).unwrap().shifts(), &[6]);
    }

    #[test]
    fn n_h_small() {
        let c = x3p1();
        let m = c.modulus();
        let g = builtin("xcoord").unwrap();
        let empty = ShiftSet::empty(m);
        assert_eq!(
            count_n_h(&c, &empty, iv(1, 4), Interval::full(m), &g).unwrap(),
            4
        );
        let h1 = ShiftSet::new(&[1], m).unwrap();
        assert_eq!(
            count_n_h(&c, &h1, iv(0, 4), Interval::full(m), &g).unwrap(),
            7
        );
        assert_eq!(
            count_n_h(&c, &h1, iv(0, 4), Interval::empty(), &g).unwrap(),
            0
        );
    }

    #[test]
    fn n_ab_small() {
        let c = x3p1();
        let m = c.modulus();
        let g = builtin("xcoord").unwrap();
        let a = ShiftSet::new(&[1], m).unwrap();
        let b = ShiftSet::new(&[2], m).unwrap();
        let full = Interval::full(m);
        assert_eq!(
            count_n_ab_direct(&c, &a, &b, iv(0, 4), full, &g).unwrap(),
            0
        );
        assert_eq!(
            count_n_ab_inclusion_exclusion(&c, &a, &b, iv(0, 4), full, &g).unwrap(),
            0
        );
        assert!(count_n_ab_direct(&c, &a, &a, iv(0, 4), full, &g).is_err());
        let none = ShiftSet::empty(m);
        assert_eq!(
            count_n_ab_direct(&c, &a, &none, iv(0, 4), full, &g).unwrap(),
            count_n_h(&c, &a, iv(0, 4), full, &g).unwrap()
        );
    }

    #[test]
    fn inclusion_exclusion_size_guard() {
        let c = HyperellipticCurve::from_coeffs(&[1, 1, 0, 1], 101).unwrap();
        let m = c.modulus();
        let b: Vec<i64> = (1..=21).collect();
        let b = ShiftSet::new(&b, m).unwrap();
        let g = builtin("xcoord").unwrap();
        let r = count_n_ab_inclusion_exclusion(
            &c,
            &ShiftSet::empty(m),
            &b,
            iv(0, 10),
            Interval::full(m),
            &g,
        );
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn main_terms() {
        assert_eq!(predicted_n_h(7, 3, 0, 4, 7).main_term, rat(4, 1));
        assert_eq!(predicted_n_h(7, 3, 1, 4, 7).main_term, rat(16, 7));
        // |I|^2 |J| / p^2 = 10^15 / 1000003^2
        let big = predicted_n_h(1_000_003, 3, 1, 100_000, 100_000);
        assert!((big.main_term_f64() - 999.994_000_027).abs() < 1e-8);
        assert_eq!(predicted_n_ab(7, 3, 0, 0, 4, 7).main_term, rat(4, 1));
        assert_eq!(predicted_n_ab(7, 3, 1, 1, 4, 7).main_term, rat(48, 49));
        // q = 1 kills any positive power of (1 - q)
        assert_eq!(predicted_n_ab(7, 3, 1, 2, 7, 7).main_term, rat(0, 1));
    }

    #[test]
    fn bounds_formula() {
        let p = 1_000_003f64;
        let pred = predicted_n_ab(1_000_003, 3, 1, 1, 10, 10);
        let expected = 256.0 * 3.0 * 11.0 * p.sqrt() * p.ln().powi(6);
        assert!((pred.bound - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn degree_of_shifted_curve() {
        let c = x3p1();
        let h = ShiftSet::new(&[1, 2], c.modulus()).unwrap();
        assert_eq!(ShiftedCurveSpec::new(&c, &h).unwrap().degree(), 12);
    }
}
