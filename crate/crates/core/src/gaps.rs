//! Spacing statistics of S_I: wraparound gaps, the mu statistics, the
//! short-window counts P_k(t), and the binomial and Poisson models.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::curve::{CurvePoint, HyperellipticCurve, Interval, XCoordinateSet};
use crate::error::{Error, Result};
use crate::rational_map::RationalMapExpr;

#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    pub m: usize,
    pub gaps: Vec<u64>,
    /// p / |S_I|
    pub mean_gap: BigRational,
    pub lambda_grid: Vec<f64>,
    pub mu_values: Vec<f64>,
}

fn require_points(s: &XCoordinateSet) -> Result<()> {
    if s.is_empty() {
        return Err(Error::NoPoints(format!(
            "S_I is empty for I = {} mod {}",
            s.interval(),
            s.modulus()
        )));
    }
    Ok(())
}

/// Consecutive differences of the sorted x-list, closing with x_1 + p - x_m.
pub fn gaps_with_wrap(s: &XCoordinateSet) -> Result<GapReport> {
    require_points(s)?;
    let p = s.modulus().get();
    let xs: Vec<u64> = s.xs().collect();
    let mut gaps: Vec<u64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.push(xs[0] + p - xs[xs.len() - 1]);
    Ok(GapReport {
        m: xs.len(),
        gaps,
        mean_gap: BigRational::new(BigInt::from(p), BigInt::from(xs.len())),
        lambda_grid: Vec::new(),
        mu_values: Vec::new(),
    })
}

/// Gap report with mu evaluated on a grid of lambda values.
pub fn gap_report(s: &XCoordinateSet, lambdas: &[f64]) -> Result<GapReport> {
    let mut report = gaps_with_wrap(s)?;
    report.mu_values = lambdas.iter().map(|&l| mu(s, l)).collect::<Result<_>>()?;
    report.lambda_grid = lambdas.to_vec();
    Ok(report)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Precondition(format!(
            "lambda must be finite and non-negative, got {lambda}"
        )));
    }
    Ok(())
}

/// gap >= lambda p / |I|, tested as gap |I| >= lambda p.
#[inline]
fn long_gap(gap: u64, lambda: f64, p: u64, i_len: u64) -> bool {
    gap as f64 * i_len as f64 >= lambda * p as f64
}

/// Proportion of wraparound gaps at least lambda p / |I|.
pub fn mu(s: &XCoordinateSet, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let report = gaps_with_wrap(s)?;
    let (p, i_len) = (s.modulus().get(), s.interval().len());
    let hits = report
        .gaps
        .iter()
        .filter(|&&g| long_gap(g, lambda, p, i_len))
        .count();
    Ok(hits as f64 / report.m as f64)
}

/// Like [`mu`], but a gap from P_i to P_{i+1} also needs g(P_i, P_{i+1}) in J.
/// The closing gap pairs P_m with P_1. Pairs at a pole of g never count.
pub fn mu_distorted(
    s: &XCoordinateSet,
    lambda: f64,
    j: Interval,
    g: &RationalMapExpr,
) -> Result<f64> {
    check_lambda(lambda)?;
    require_points(s)?;
    let m = s.modulus();
    j.check_within(m)?;
    let (p, i_len) = (m.get(), s.interval().len());
    let pts = s.points();
    let hits = (0..pts.len())
        .into_par_iter()
        .filter(|&i| {
            let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
            let gap = if i + 1 < pts.len() {
                b.x - a.x
            } else {
                b.x + p - a.x
            };
            long_gap(gap, lambda, p, i_len)
                && g.eval_raw(m, [a.x, a.y, b.x, b.y])
                    .is_some_and(|v| j.contains(v))
        })
        .count();
    Ok(hits as f64 / pts.len() as f64)
}

/// The g-distortion (J, g). `None` means the undistorted statistic.
pub type Distortion<'a> = Option<(Interval, &'a RationalMapExpr)>;

/// Histogram of window counts: counts[k] base points of S_I see exactly k
/// elements of S_{I,J,P} in (x, x + t].
#[derive(Clone, Debug, PartialEq)]
pub struct PkTable {
    pub t: f64,
    pub p: u64,
    pub i_len: u64,
    pub j_len: u64,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl PkTable {
    /// floor(t)
    pub fn window(&self) -> u64 {
        self.t.floor() as u64
    }

    pub fn lambda(&self) -> f64 {
        self.t * self.i_len as f64 / self.p as f64
    }

    pub fn lambda_prime(&self) -> f64 {
        self.lambda() * self.j_len as f64 / self.p as f64
    }

    /// |I||J| / p^2
    pub fn q(&self) -> f64 {
        let p = self.p as f64;
        (self.i_len as f64 / p) * (self.j_len as f64 / p)
    }

    pub fn empirical(&self, k: usize) -> f64 {
        self.counts.get(k).copied().unwrap_or(0) as f64 / self.total as f64
    }

    pub fn empirical_exact(&self, k: usize) -> BigRational {
        BigRational::new(
            BigInt::from(self.counts.get(k).copied().unwrap_or(0)),
            BigInt::from(self.total),
        )
    }

    pub fn binomial(&self, k: usize) -> f64 {
        binomial_model(self.t, k, self.q())
    }

    pub fn poisson(&self, k: usize) -> f64 {
        poisson_model(self.lambda_prime(), k)
    }

    pub fn model(&self, model: PkModel, k: usize) -> f64 {
        match model {
            PkModel::Binomial => self.binomial(k),
            PkModel::Poisson => self.poisson(k),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PkModel {
    Binomial,
    Poisson,
}

/// All P_k(t) at once. Each base point walks forward through the sorted
/// x-list (wrapping mod p) until the distance exceeds floor(t).
pub fn p_k_table(s: &XCoordinateSet, distortion: Distortion<'_>, t: f64) -> Result<PkTable> {
    require_points(s)?;
    let m = s.modulus();
    let p = m.get();
    if !(t >= 1.0 && t.is_finite()) {
        return Err(Error::Precondition(format!(
            "t must be at least 1, got {t}"
        )));
    }
    let window = t.floor() as u64;
    if window >= p {
        return Err(Error::Precondition(format!(
            "floor(t) = {window} must be below p = {p}"
        )));
    }
    let j_len = match distortion {
        Some((j, _)) => {
            j.check_within(m)?;
            j.len()
        }
        None => p,
    };
    let pts = s.points();
    let n = pts.len();
    let accepts = |base: CurvePoint, other: CurvePoint| match distortion {
        None => true,
        Some((j, g)) => g
            .eval_raw(m, [base.x, base.y, other.x, other.y])
            .is_some_and(|v| j.contains(v)),
    };
    let counts = (0..n)
        .into_par_iter()
        .fold(
            || vec![0u64; window as usize + 1],
            |mut hist, i| {
                let base = pts[i];
                let mut k = 0;
                for step in 1..n {
                    let other = pts[(i + step) % n];
                    let dist = if other.x > base.x {
                        other.x - base.x
                    } else {
                        other.x + p - base.x
                    };
                    if dist > window {
                        break;
                    }
                    if accepts(base, other) {
                        k += 1;
                    }
                }
                hist[k] += 1;
                hist
            },
        )
        .reduce(
            || vec![0u64; window as usize + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(PkTable {
        t,
        p,
        i_len: s.interval().len(),
        j_len,
        counts,
        total: n as u64,
    })
}

/// Proportion of x in S_I whose window (x, x + t] holds exactly k points of
/// S_{I,J,P}.
pub fn p_k_t(s: &XCoordinateSet, distortion: Distortion<'_>, t: f64, k: usize) -> Result<f64> {
    Ok(p_k_table(s, distortion, t)?.empirical(k))
}

/// C(floor t, k) q^k (1 - q)^(floor t - k); zero when k > floor t.
pub fn binomial_model(t: f64, k: usize, q: f64) -> f64 {
    let n = t.floor() as usize;
    if k > n {
        return 0.0;
    }
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c * q.powi(k as i32) * (1.0 - q).powi((n - k) as i32)
}

/// e^(-l) l^k / k!
pub fn poisson_model(lambda_prime: f64, k: usize) -> f64 {
    let mut term = (-lambda_prime).exp();
    for i in 1..=k {
        term *= lambda_prime / i as f64;
    }
    term
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Distance {
    pub sup: f64,
    /// Half the L1 distance.
    pub total_variation: f64,
}

/// Sup and half-L1 distances between two sequences over k <= kmax. Missing
/// entries count as 0.
pub fn sequence_distance(a: &[f64], b: &[f64], kmax: usize) -> Distance {
    let at = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
    let diffs = (0..=kmax).map(|k| (at(a, k) - at(b, k)).abs());
    let (sup, l1) = diffs.fold((0.0f64, 0.0), |(s, l), d| (s.max(d), l + d));
    Distance {
        sup,
        total_variation: l1 / 2.0,
    }
}

pub fn distribution_distance(empirical: &PkTable, model: PkModel, kmax: usize) -> Distance {
    let emp: Vec<f64> = (0..=kmax).map(|k| empirical.empirical(k)).collect();
    let mdl: Vec<f64> = (0..=kmax).map(|k| empirical.model(model, k)).collect();
    sequence_distance(&emp, &mdl, kmax)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BigIntervalReport {
    pub table: PkTable,
    pub observed: f64,
    /// (1 - (beta - alpha) / 2)^floor(t)
    pub model: f64,
    /// e^(-t|I|/p), the Poisson guess that does not apply here.
    pub poisson_guess: f64,
}

/// P_0(t) for I = [0, (p - 1)/2] next to the limit (1 - (beta - alpha)/2)^floor(t).
pub fn big_interval_regime(
    curve: &HyperellipticCurve,
    t: f64,
    distortion: Distortion<'_>,
) -> Result<BigIntervalReport> {
    let m = curve.modulus();
    let s = curve.x_coordinate_set(Interval::half(m))?;
    let table = p_k_table(&s, distortion, t)?;
    let width = table.j_len as f64 / m.get() as f64;
    Ok(BigIntervalReport {
        observed: table.empirical(0),
        model: (1.0 - width / 2.0).powi(table.window() as i32),
        poisson_guess: (-table.lambda()).exp(),
        table,
    })
}

/// Which of the two size conditions |I| >= p / ln ln p and
/// |I| >= p (ln ln p)^2 / ln p hold.
pub fn interval_size_conditions(p: u64, i_len: u64) -> (bool, bool) {
    let pf = p as f64;
    let lnln = pf.ln().ln();
    let size = i_len as f64;
    (size >= pf / lnln, size >= pf * lnln * lnln / pf.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational_map::builtin;

    fn example() -> XCoordinateSet {
        let c = HyperellipticCurve::from_coeffs(&[1, 0, 0, 1], 7).unwrap();
        c.x_coordinate_set(Interval::new(1, 4).unwrap()).unwrap()
    }

    #[test]
    fn wraparound_gaps() {
        let r = gaps_with_wrap(&example()).unwrap();
        assert_eq!(r.gaps, vec![1, 1, 2, 3]);
        assert_eq!(r.gaps.iter().sum::<u64>(), 7);
        assert_eq!(r.mean_gap, BigRational::new(7.into(), 4.into()));
    }

    #[test]
    fn single_point_gap_is_p() {
        // y^2 = x over F_7 with I = [0, 1): only x = 0.
        let c = HyperellipticCurve::from_coeffs(&[0, 1], 7).unwrap();
        let s = c.x_coordinate_set(Interval::new(0, 1).unwrap()).unwrap();
        assert_eq!(gaps_with_wrap(&s).unwrap().gaps, vec![7]);
    }

    #[test]
    fn empty_set_has_no_gaps() {
        let c = HyperellipticCurve::from_coeffs(&[1, 0, 0, 1], 7).unwrap();
        let s = c.x_coordinate_set(Interval::empty()).unwrap();
        assert!(matches!(gaps_with_wrap(&s), Err(Error::NoPoints(_))));
    }

    #[test]
    fn mu_examples() {
        let s = example();
        assert_eq!(mu(&s, 0.0).unwrap(), 1.0);
        assert_eq!(mu(&s, 1.0).unwrap(), 0.25);
        assert_eq!(mu(&s, 100.0).unwrap(), 0.0);
        assert!(mu(&s, -1.0).is_err());
    }

    #[test]
    fn mu_distorted_extremes() {
        let s = example();
        let g = builtin("xcoord").unwrap();
        let full = Interval::full(s.modulus());
        for l in [0.0, 0.5, 1.0, 2.0] {
            assert_eq!(mu_distorted(&s, l, full, &g).unwrap(), mu(&s, l).unwrap());
            assert_eq!(mu_distorted(&s, l, Interval::empty(), &g).unwrap(), 0.0);
        }
    }

    #[test]
    fn pk_table_sums_to_one() {
        let c = HyperellipticCurve::from_coeffs(&[5, 3, 0, 1], 101).unwrap();
        let s = c.x_coordinate_set(Interval::new(0, 40).unwrap()).unwrap();
        let g = builtin("ell_diff").unwrap();
        let j = Interval::new(0, 50).unwrap();
        let table = p_k_table(&s, Some((j, &g)), 7.5).unwrap();
        assert_eq!(table.counts.len(), 8);
        assert_eq!(table.counts.iter().sum::<u64>(), table.total);
    }

    #[test]
    fn p0_matches_mu_off_integers() {
        let c = HyperellipticCurve::from_coeffs(&[5, 3, 0, 1], 101).unwrap();
        let s = c.x_coordinate_set(Interval::new(0, 40).unwrap()).unwrap();
        for lambda in [0.7, 0.9, 1.7] {
            let t = lambda * 101.0 / 40.0;
            assert_eq!(p_k_t(&s, None, t, 0).unwrap(), mu(&s, lambda).unwrap());
        }
    }

    #[test]
    fn window_must_fit() {
        let s = example();
        assert!(p_k_table(&s, None, 0.5).is_err());
        assert!(p_k_table(&s, None, 7.0).is_err());
        assert!(p_k_table(&s, None, 6.9).is_ok());
    }

    #[test]
    fn binomial_examples() {
        assert!((binomial_model(3.7, 1, 0.25) - 27.0 / 64.0).abs() < 1e-15);
        assert_eq!(binomial_model(5.0, 0, 0.0), 1.0);
        assert!((binomial_model(4.0, 0, 0.5) - 0.0625).abs() < 1e-15);
        assert_eq!(binomial_model(2.0, 3, 0.5), 0.0);
    }

    #[test]
    fn poisson_examples() {
        assert!((poisson_model(1.0, 0) - 0.367_879_441_171_442_3).abs() < 1e-12);
        assert_eq!(poisson_model(0.0, 0), 1.0);
        assert_eq!(poisson_model(0.0, 3), 0.0);
        let total: f64 = (0..=60).map(|k| poisson_model(2.5, k)).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn distances() {
        let point_mass = [1.0];
        let pois: Vec<f64> = (0..=20).map(|k| poisson_model(1.0, k)).collect();
        let d = sequence_distance(&point_mass, &pois, 20);
        assert!((d.sup - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        let same = sequence_distance(&pois, &pois, 20);
        assert_eq!((same.sup, same.total_variation), (0.0, 0.0));
    }

    #[test]
    fn big_interval_model() {
        let c = HyperellipticCurve::from_coeffs(&[1, 2, 0, 0, 0, 1], 1009).unwrap();
        let r = big_interval_regime(&c, 10.0, None).unwrap();
        assert_eq!(r.model, 2f64.powi(-10));
    }

    #[test]
    fn size_conditions() {
        assert_eq!(interval_size_conditions(1_000_003, 0), (false, false));
        assert_eq!(interval_size_conditions(1_000_003, 1_000_003), (true, true));
    }
}
