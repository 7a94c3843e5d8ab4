//! Exponential sums e_p(z) = exp(2 pi i z / p): interval sums, complete sums
//! along C_H, the Fourier reconstruction of N(H), and the explicit bound
//! checks for both kinds of sum.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::curve::{HyperellipticCurve, Interval};
use crate::error::{Error, Result};
use crate::fp::PrimeModulus;
use crate::rational_map::RationalMapExpr;
use crate::shifted::{ShiftSet, ShiftedCurveSpec};

pub type ComplexValue = Complex64;

/// Full enumeration of C_H is allowed while p * 2^r stays below this.
pub const ENUMERATION_LIMIT: u64 = 100_000;

/// Largest p accepted by [`reconstruct_n_via_dft`].
pub const DFT_MAX_P: u64 = 31;

/// e_p(k) computed from the reduced residue k mod p.
pub fn e_p(m: PrimeModulus, k: i64) -> Complex64 {
    let k = m.reduce_i64(k);
    Complex64::from_polar(1.0, TAU * k as f64 / m.get() as f64)
}

/// Table of the p-th roots of unity e_p(0), ..., e_p(p - 1).
#[derive(Clone, Debug)]
pub struct RootsOfUnity {
    table: Vec<Complex64>,
}

impl RootsOfUnity {
    pub fn new(m: PrimeModulus) -> Self {
        let p = m.get();
        Self {
            table: (0..p)
                .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / p as f64))
                .collect(),
        }
    }

    #[inline]
    pub fn get(&self, k: u64) -> Complex64 {
        self.table[k as usize]
    }
}

fn check_frequency(m: PrimeModulus, t: i64) -> Result<()> {
    if t.unsigned_abs() > m.half() {
        return Err(Error::Precondition(format!(
            "frequency {t} outside [-(p-1)/2, (p-1)/2]"
        )));
    }
    Ok(())
}

/// sum over m in I of e_p(t m), by the geometric closed form.
pub fn interval_exp_sum(i: Interval, t: i64, m: PrimeModulus) -> Result<Complex64> {
    check_frequency(m, t)?;
    i.check_within(m)?;
    if t == 0 {
        return Ok(Complex64::new(i.len() as f64, 0.0));
    }
    if i.is_full(m) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (lo, h) = (i.lo() as i128, i.len() as i128);
    let p = m.get() as i128;
    let start = e_p(m, ((t as i128 * lo).rem_euclid(p)) as i64);
    let numer = Complex64::new(1.0, 0.0) - e_p(m, ((t as i128 * h).rem_euclid(p)) as i64);
    let denom = Complex64::new(1.0, 0.0) - e_p(m, t);
    Ok(start * numer / denom)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

impl BoundCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            ok: lhs <= rhs,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

/// sum over 1 <= |t| <= (p-1)/2 of |sum_{m in I} e_p(t m)| against 2 p ln p.
pub fn interval_sum_bound_check(i: Interval, m: PrimeModulus) -> Result<BoundCheck> {
    let half = m.half() as i64;
    let mut lhs = 0.0;
    for t in 1..=half {
        lhs += interval_exp_sum(i, t, m)?.norm();
        lhs += interval_exp_sum(i, -t, m)?.norm();
    }
    let p = m.get() as f64;
    Ok(BoundCheck::new(lhs, 2.0 * p * p.ln()))
}

/// Frequencies for the r + 2 coordinates (x, y, y_1, ..., y_r) and the r map
/// values g_1, ..., g_r of C_H.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrequencyVector {
    pub t: Vec<i64>,
    pub u: Vec<i64>,
}

impl FrequencyVector {
    pub fn new(t: Vec<i64>, u: Vec<i64>, m: PrimeModulus) -> Result<Self> {
        if t.len() != u.len() + 2 {
            return Err(Error::Precondition(format!(
                "{} coordinate frequencies for {} map frequencies; expected r + 2 and r",
                t.len(),
                u.len()
            )));
        }
        for &f in t.iter().chain(&u) {
            check_frequency(m, f)?;
        }
        Ok(Self { t, u })
    }

    pub fn zero(r: usize) -> Self {
        Self {
            t: vec![0; r + 2],
            u: vec![0; r],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.t.iter().chain(&self.u).all(|&f| f == 0)
    }

    pub fn negated(&self) -> Self {
        Self {
            t: self.t.iter().map(|f| -f).collect(),
            u: self.u.iter().map(|f| -f).collect(),
        }
    }
}

/// Every F_p-point of C_H (all sign choices), with the map values g_i at
/// pole-free points. Points where some g_i has a pole are dropped.
#[derive(Clone, Debug)]
pub struct ShiftedCurvePoints {
    r: usize,
    modulus: PrimeModulus,
    coords: Vec<u64>,
    map_values: Vec<u64>,
    poles: usize,
}

impl ShiftedCurvePoints {
    pub fn enumerate(
        curve: &HyperellipticCurve,
        shifts: &ShiftSet,
        g: &RationalMapExpr,
    ) -> Result<Self> {
        let spec = ShiftedCurveSpec::new(curve, shifts)?;
        let m = curve.modulus();
        let r = spec.r();
        if r >= 20 || m.get() << r > ENUMERATION_LIMIT {
            return Err(Error::Infeasible(format!(
                "enumerating C_H needs p * 2^r <= {ENUMERATION_LIMIT} (p = {m}, r = {r})"
            )));
        }
        let mut out = Self {
            r,
            modulus: m,
            coords: Vec::new(),
            map_values: Vec::new(),
            poles: 0,
        };
        let mut fiber: Vec<Vec<u64>> = vec![Vec::new(); r + 1];
        for x in 0..m.get() {
            fiber[0] = curve.ys(x).collect();
            for (k, &h) in shifts.shifts().iter().enumerate() {
                fiber[k + 1] = curve.ys(m.add(x, h)).collect();
            }
            if fiber.iter().any(Vec::is_empty) {
                continue;
            }
            let mut idx = vec![0usize; r + 1];
            'combos: loop {
                let ys: Vec<u64> = idx.iter().zip(&fiber).map(|(&i, f)| f[i]).collect();
                let values: Option<Vec<u64>> = shifts
                    .shifts()
                    .iter()
                    .zip(&ys[1..])
                    .map(|(&h, &yi)| g.eval_raw(m, [x, ys[0], m.add(x, h), yi]))
                    .collect();
                match values {
                    Some(values) => {
                        out.coords.push(x);
                        out.coords.extend_from_slice(&ys);
                        out.map_values.extend(values);
                    }
                    None => out.poles += 1,
                }
                for k in 0..=r {
                    idx[k] += 1;
                    if idx[k] < fiber[k].len() {
                        continue 'combos;
                    }
                    idx[k] = 0;
                }
                break;
            }
        }
        Ok(out)
    }

    /// Pole-free points.
    pub fn len(&self) -> usize {
        self.coords.len() / (self.r + 2)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn poles(&self) -> usize {
        self.poles
    }

    /// sum over points of e_p(-u.g - t.coords).
    pub fn exp_sum(&self, freq: &FrequencyVector, roots: &RootsOfUnity) -> Result<Complex64> {
        if freq.t.len() != self.r + 2 || freq.u.len() != self.r {
            return Err(Error::Precondition(format!(
                "frequency vector does not match r = {}",
                self.r
            )));
        }
        let m = self.modulus;
        let t: Vec<u64> = freq.t.iter().map(|&f| m.reduce_i64(-f)).collect();
        let u: Vec<u64> = freq.u.iter().map(|&f| m.reduce_i64(-f)).collect();
        let mut sum = Complex64::new(0.0, 0.0);
        let coords = self.coords.chunks_exact(self.r + 2);
        let values = self.map_values.chunks(self.r.max(1));
        for (c, v) in coords.zip(values.chain(std::iter::repeat(&[][..]))) {
            let mut k = 0;
            for (&ci, &ti) in c.iter().zip(&t) {
                k = m.add(k, m.mul(ci, ti));
            }
            for (&vi, &ui) in v.iter().zip(&u) {
                k = m.add(k, m.mul(vi, ui));
            }
            sum += roots.get(k);
        }
        Ok(sum)
    }
}

/// Complete sum over C_H of e_p(-sum u_j g_j - t_x x - t_y y - sum t_i y_i).
pub fn curve_exp_sum(
    curve: &HyperellipticCurve,
    shifts: &ShiftSet,
    g: &RationalMapExpr,
    freq: &FrequencyVector,
) -> Result<Complex64> {
    let points = ShiftedCurvePoints::enumerate(curve, shifts, g)?;
    points.exp_sum(freq, &RootsOfUnity::new(curve.modulus()))
}

/// |curve_exp_sum| against D(D - 1) sqrt(p) + D^2 / 2 with D = 2^r d.
pub fn bombieri_bound_check(
    curve: &HyperellipticCurve,
    shifts: &ShiftSet,
    g: &RationalMapExpr,
    freq: &FrequencyVector,
) -> Result<BoundCheck> {
    if freq.is_zero() {
        return Err(Error::Precondition(
            "the bound needs a nonzero frequency vector".to_string(),
        ));
    }
    let big_d = ShiftedCurveSpec::new(curve, shifts)?.degree() as f64;
    let sum = curve_exp_sum(curve, shifts, g, freq)?;
    let p = curve.modulus().get() as f64;
    Ok(BoundCheck::new(
        sum.norm(),
        big_d * (big_d - 1.0) * p.sqrt() + big_d * big_d / 2.0,
    ))
}

/// The nonzero part of an interval's spectrum: (t, sum_{m in I} e_p(t m)).
fn spectrum(i: Interval, m: PrimeModulus) -> Result<Vec<(i64, Complex64)>> {
    let half = m.half() as i64;
    let mut out = Vec::new();
    for t in -half..=half {
        let s = interval_exp_sum(i, t, m)?;
        if s != Complex64::new(0.0, 0.0) {
            out.push((t, s));
        }
    }
    Ok(out)
}

/// N(H) rebuilt from its Fourier expansion over C_H with coordinate boxes
/// [0, p) x I^{r+1} and map box J^r. Terms whose interval factor vanishes
/// identically (full intervals at nonzero frequency) are skipped.
pub fn reconstruct_n_via_dft(
    curve: &HyperellipticCurve,
    shifts: &ShiftSet,
    i: Interval,
    j: Interval,
    g: &RationalMapExpr,
) -> Result<f64> {
    let m = curve.modulus();
    let r = shifts.len();
    if m.get() > DFT_MAX_P || r > 1 {
        return Err(Error::Infeasible(format!(
            "Fourier reconstruction needs p <= {DFT_MAX_P} and r <= 1 (p = {m}, r = {r})"
        )));
    }
    i.check_within(m)?;
    j.check_within(m)?;
    let points = ShiftedCurvePoints::enumerate(curve, shifts, g)?;
    let roots = RootsOfUnity::new(m);

    let mut axes = vec![spectrum(Interval::full(m), m)?];
    for _ in 0..=r {
        axes.push(spectrum(i, m)?);
    }
    for _ in 0..r {
        axes.push(spectrum(j, m)?);
    }
    if axes.iter().any(Vec::is_empty) {
        return Ok(0.0);
    }

    let combos: Vec<Vec<usize>> = axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.into_iter()
            .flat_map(|prefix| {
                (0..axis.len()).map(move |k| {
                    let mut next = prefix.clone();
                    next.push(k);
                    next
                })
            })
            .collect()
    });
    let terms: Vec<Complex64> = combos
        .par_iter()
        .map(|combo| {
            let mut coefficient = Complex64::new(1.0, 0.0);
            let mut freqs = Vec::with_capacity(combo.len());
            for (axis, &k) in axes.iter().zip(combo) {
                let (f, s) = axis[k];
                coefficient *= s;
                freqs.push(f);
            }
            let u = freqs.split_off(r + 2);
            let freq = FrequencyVector { t: freqs, u };
            points
                .exp_sum(&freq, &roots)
                .map(|s| coefficient * s)
                .unwrap_or_default()
        })
        .collect();
    let total: Complex64 = terms.iter().sum();
    let scale = (m.get() as f64).powi(2 * r as i32 + 2);
    Ok(total.re / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational_map::builtin;

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn iv(lo: u64, hi: u64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn interval_sum_at_zero_is_length() {
        assert_eq!(interval_exp_sum(iv(3, 11), 0, m(13)).unwrap().re, 8.0);
    }

    #[test]
    fn full_interval_vanishes() {
        for t in 1..=6 {
            assert!(
                interval_exp_sum(Interval::full(m(13)), t, m(13))
                    .unwrap()
                    .norm()
                    < 1e-9 * 13.0
            );
        }
    }

    #[test]
    fn frequency_range_enforced() {
        assert!(interval_exp_sum(iv(0, 3), 7, m(13)).is_err());
    }

    #[test]
    fn interval_sum_trivial_cases() {
        let c = interval_sum_bound_check(Interval::empty(), m(31)).unwrap();
        assert_eq!(c.lhs, 0.0);
        assert!(c.ok);
        let full = interval_sum_bound_check(Interval::full(m(31)), m(31)).unwrap();
        assert!(full.lhs < 1e-9 && full.ok);
    }

    #[test]
    fn zero_frequency_counts_points() {
        let c = HyperellipticCurve::from_coeffs(&[1, 0, 0, 1], 13).unwrap();
        let h = ShiftSet::new(&[1], c.modulus()).unwrap();
        let g = builtin("ell_diff").unwrap();
        let points = ShiftedCurvePoints::enumerate(&c, &h, &g).unwrap();
        let s = curve_exp_sum(&c, &h, &g, &FrequencyVector::zero(1)).unwrap();
        assert_eq!(s.re, points.len() as f64);
        assert!(s.im.abs() < 1e-12);
    }

    #[test]
    fn conjugate_symmetry() {
        let c = HyperellipticCurve::from_coeffs(&[2, 5, 0, 1], 101).unwrap();
        let h = ShiftSet::new(&[3], c.modulus()).unwrap();
        let g = builtin("ell_diff").unwrap();
        let f = FrequencyVector::new(vec![4, -7, 12], vec![9], c.modulus()).unwrap();
        let a = curve_exp_sum(&c, &h, &g, &f).unwrap();
        let b = curve_exp_sum(&c, &h, &g, &f.negated()).unwrap();
        assert!((a - b.conj()).norm() < 1e-9);
    }

    #[test]
    fn guards() {
        let c = HyperellipticCurve::from_coeffs(&[1, 1, 0, 1], 100_003).unwrap();
        let h = ShiftSet::new(&[1], c.modulus()).unwrap();
        let g = builtin("ell_diff").unwrap();
        assert!(matches!(
            curve_exp_sum(&c, &h, &g, &FrequencyVector::zero(1)),
            Err(Error::Infeasible(_))
        ));
        let small = HyperellipticCurve::from_coeffs(&[1, 1, 0, 1], 37).unwrap();
        assert!(matches!(
            reconstruct_n_via_dft(
                &small,
                &ShiftSet::empty(small.modulus()),
                iv(0, 5),
                Interval::full(small.modulus()),
                &g
            ),
            Err(Error::Infeasible(_))
        ));
        let z = FrequencyVector::zero(0);
        assert!(bombieri_bound_check(&small, &ShiftSet::empty(small.modulus()), &g, &z).is_err());
    }

    #[test]
    fn reconstruction_trivial_cases() {
        let c = HyperellipticCurve::from_coeffs(&[1, 0, 0, 1], 13).unwrap();
        let md = c.modulus();
        let g = builtin("xcoord").unwrap();
        let none = ShiftSet::empty(md);
        let all =
            reconstruct_n_via_dft(&c, &none, Interval::full(md), Interval::full(md), &g).unwrap();
        assert!((all - c.affine_point_count() as f64).abs() < 1e-6);
        let h = ShiftSet::new(&[1], md).unwrap();
        let zero = reconstruct_n_via_dft(&c, &h, iv(0, 6), Interval::empty(), &g).unwrap();
        assert!(zero.abs() < 1e-6);
    }
}
