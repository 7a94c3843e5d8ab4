//! Fixed verification matrices: exact identities, explicit bounds, Weil
//! counts and the independence probe.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::output::{ResultRow, RowContext};
use crate::curve::{HyperellipticCurve, Interval};
use crate::error::{Error, Result};
use crate::expsum::{
    bombieri_bound_check, interval_sum_bound_check, reconstruct_n_via_dft, FrequencyVector,
};
use crate::fp::{is_prime, PrimeModulus};
use crate::rational_map::{builtin, numeric_rank_check, RankVerdict, RationalMapExpr};
use crate::shifted::{count_n_ab_direct, count_n_ab_inclusion_exclusion, count_n_h, ShiftSet};

pub const DEFAULT_VERIFY_SEED: u64 = 0x5eed_2011;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Bounds,
    Weil,
    Ranks,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Self::Identities),
            "bounds" => Ok(Self::Bounds),
            "weil" => Ok(Self::Weil),
            "ranks" => Ok(Self::Ranks),
            other => Err(Error::Config(format!("unknown suite `{other}`"))),
        }
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<ResultRow>> {
    let ctx = RowContext {
        experiment: "verify",
        p: 0,
        d: 0,
        i: None,
        j: None,
        seed,
    };
    match suite {
        Suite::Identities => {
            let mut rows = fourier_identity(&ctx)?;
            rows.extend(inclusion_exclusion(&ctx, seed)?);
            Ok(rows)
        }
        Suite::Bounds => {
            let mut rows = interval_sums(&ctx)?;
            rows.extend(curve_sums(&ctx, seed)?);
            Ok(rows)
        }
        Suite::Weil => weil(&ctx, seed),
        Suite::Ranks => ranks(&ctx, seed),
    }
}

pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|&n| is_prime(n)).collect()
}

/// Random curve of the given degree with random coefficients; squares are
/// redrawn.
pub fn random_curve(p: u64, d: usize, rng: &mut impl Rng) -> HyperellipticCurve {
    loop {
        let mut coeffs: Vec<i64> = (0..d).map(|_| rng.gen_range(0..p) as i64).collect();
        coeffs.push(rng.gen_range(1..p) as i64);
        if let Ok(c) = HyperellipticCurve::from_coeffs(&coeffs, p) {
            return c;
        }
    }
}

pub fn random_interval(bound: u64, rng: &mut impl Rng) -> Interval {
    let a = rng.gen_range(0..=bound);
    let b = rng.gen_range(0..=bound);
    Interval::new(a.min(b), a.max(b)).expect("ordered")
}

/// Distinct nonzero shifts in [1, p).
pub fn random_shifts(p: u64, n: usize, rng: &mut impl Rng) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let h = rng.gen_range(1..p);
        if !out.contains(&h) {
            out.push(h);
        }
    }
    out
}

fn maps() -> Result<[RationalMapExpr; 2]> {
    Ok([builtin("xcoord")?, builtin("ell_diff")?])
}

/// (p, f, H, I, J, map name)
pub type FourierCase = (u64, Vec<i64>, Vec<i64>, Interval, Interval, &'static str);

pub fn fourier_matrix() -> Vec<FourierCase> {
    let polys: [&[i64]; 3] = [&[1, 1, 0, 1], &[5, 3, 0, 1], &[1, 0, 3, 0, 0, 1]];
    let mut out = Vec::new();
    for p in [13u64, 17, 31] {
        let is = [
            Interval::new(0, (p - 1) / 2).unwrap(),
            Interval::new(1, (p + 1) / 4).unwrap(),
        ];
        let js = [
            Interval::new(0, p).unwrap(),
            Interval::new(0, p.div_ceil(2)).unwrap(),
        ];
        for f in polys {
            for h in [vec![], vec![1]] {
                for i in is {
                    for j in js {
                        for g in ["xcoord", "ell_diff"] {
                            out.push((p, f.to_vec(), h.clone(), i, j, g));
                        }
                    }
                }
            }
        }
    }
    out
}

fn fourier_identity(ctx: &RowContext) -> Result<Vec<ResultRow>> {
    let diffs: Vec<f64> = fourier_matrix()
        .par_iter()
        .map(|(p, f, h, i, j, g)| -> Result<f64> {
            let curve = HyperellipticCurve::from_coeffs(f, *p)?;
            let shifts = ShiftSet::new(h, curve.modulus())?;
            let g = builtin(g)?;
            let dft = reconstruct_n_via_dft(&curve, &shifts, *i, *j, &g)?;
            let direct = count_n_h(&curve, &shifts, *i, *j, &g)?;
            Ok((dft - direct as f64).abs())
        })
        .collect::<Result<_>>()?;
    let worst = diffs.iter().copied().fold(0.0, f64::max);
    let failures = diffs.iter().filter(|&&d| d >= 1e-6).count();
    Ok(vec![
        ctx.row("fourier_max_abs_diff", diffs.len(), worst)
            .bound(1e-6)
            .ok(failures == 0),
        ctx.row("fourier_failures", diffs.len(), failures as f64)
            .model(0.0)
            .ok(failures == 0),
    ])
}

/// 200 random instances with p <= 199 and |A|, |B| <= 3.
pub fn inclusion_exclusion_instances(
    seed: u64,
) -> Vec<(
    HyperellipticCurve,
    ShiftSet,
    ShiftSet,
    Interval,
    Interval,
    RationalMapExpr,
)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let primes = primes_in(11, 199);
    let maps = maps().expect("built-ins parse");
    (0..200)
        .map(|_| {
            let p = *primes.choose(&mut rng).unwrap();
            let d = rng.gen_range(3..=5);
            let curve = random_curve(p, d, &mut rng);
            let m = curve.modulus();
            let (na, nb) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
            let shifts = random_shifts(p, na + nb, &mut rng);
            let a = ShiftSet::from_residues(shifts[..na].to_vec(), m).unwrap();
            let b = ShiftSet::from_residues(shifts[na..].to_vec(), m).unwrap();
            let i = random_interval(m.half() + 1, &mut rng);
            let j = random_interval(p, &mut rng);
            let g = maps[rng.gen_range(0..2)].clone();
            (curve, a, b, i, j, g)
        })
        .collect()
}

fn inclusion_exclusion(ctx: &RowContext, seed: u64) -> Result<Vec<ResultRow>> {
    let instances = inclusion_exclusion_instances(seed);
    let mismatches = instances
        .par_iter()
        .map(|(curve, a, b, i, j, g)| -> Result<bool> {
            let direct = count_n_ab_direct(curve, a, b, *i, *j, g)? as i64;
            let ie = count_n_ab_inclusion_exclusion(curve, a, b, *i, *j, g)?;
            Ok(direct != ie)
        })
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&bad| bad)
        .count();
    Ok(vec![ctx
        .row(
            "inclusion_exclusion_mismatches",
            instances.len(),
            mismatches as f64,
        )
        .model(0.0)
        .ok(mismatches == 0)])
}

fn interval_sums(ctx: &RowContext) -> Result<Vec<ResultRow>> {
    let primes = primes_in(3, 199);
    let per_prime: Vec<(f64, usize)> = primes
        .par_iter()
        .map(|&p| -> Result<(f64, usize)> {
            let m = PrimeModulus::new(p)?;
            let mut worst: f64 = 0.0;
            let mut failures = 0;
            for lo in 0..=p {
                for hi in lo..=p {
                    let check = interval_sum_bound_check(Interval::new(lo, hi)?, m)?;
                    worst = worst.max(check.ratio());
                    failures += usize::from(!check.ok);
                }
            }
            Ok((worst, failures))
        })
        .collect::<Result<_>>()?;
    let worst = per_prime.iter().map(|r| r.0).fold(0.0, f64::max);
    let failures: usize = per_prime.iter().map(|r| r.1).sum();
    Ok(vec![
        ctx.row("interval_sum_max_ratio", primes.len(), worst)
            .bound(1.0)
            .ok(failures == 0),
        ctx.row("interval_sum_failures", primes.len(), failures as f64)
            .model(0.0)
            .ok(failures == 0),
    ])
}

/// 500 trials with p <= 499 and r <= 1. With r = 1 the map is the
/// elliptic difference; with r = 0 no map value enters the sum.
pub fn curve_sum_trials(
    seed: u64,
) -> Vec<(
    HyperellipticCurve,
    ShiftSet,
    RationalMapExpr,
    FrequencyVector,
)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb0b);
    let primes = primes_in(11, 499);
    let g = builtin("ell_diff").expect("built-in");
    (0..500)
        .map(|_| {
            let p = *primes.choose(&mut rng).unwrap();
            let d = rng.gen_range(3..=5);
            let curve = random_curve(p, d, &mut rng);
            let m = curve.modulus();
            let r = rng.gen_range(0..=1);
            let shifts = ShiftSet::from_residues(random_shifts(p, r, &mut rng), m).unwrap();
            let half = m.half() as i64;
            let freq = loop {
                let t: Vec<i64> = (0..r + 2).map(|_| rng.gen_range(-half..=half)).collect();
                let u: Vec<i64> = (0..r).map(|_| rng.gen_range(-half..=half)).collect();
                let f = FrequencyVector::new(t, u, m).unwrap();
                if !f.is_zero() {
                    break f;
                }
            };
            (curve, shifts, g.clone(), freq)
        })
        .collect()
}

fn curve_sums(ctx: &RowContext, seed: u64) -> Result<Vec<ResultRow>> {
    let trials = curve_sum_trials(seed);
    let checks = trials
        .par_iter()
        .map(|(c, h, g, f)| bombieri_bound_check(c, h, g, f))
        .collect::<Result<Vec<_>>>()?;
    let worst = checks.iter().map(|c| c.ratio()).fold(0.0, f64::max);
    let failures = checks.iter().filter(|c| !c.ok).count();
    Ok(vec![
        ctx.row("curve_sum_max_ratio", checks.len(), worst)
            .bound(1.0)
            .ok(failures == 0),
        ctx.row("curve_sum_failures", checks.len(), failures as f64)
            .model(0.0)
            .ok(failures == 0),
    ])
}

/// 500 random curves with 3 <= d <= 7 and p <= 10^4.
pub fn weil_instances(seed: u64) -> Vec<HyperellipticCurve> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3e11);
    let primes = primes_in(11, 10_000);
    (0..500)
        .map(|_| {
            let p = *primes.choose(&mut rng).unwrap();
            random_curve(p, rng.gen_range(3..=7), &mut rng)
        })
        .collect()
}

/// (d - 1) sqrt(p) + d
pub fn weil_bound(p: u64, d: usize) -> f64 {
    (d as f64 - 1.0) * (p as f64).sqrt() + d as f64
}

fn weil(ctx: &RowContext, seed: u64) -> Result<Vec<ResultRow>> {
    let curves = weil_instances(seed);
    let ratios: Vec<f64> = curves
        .par_iter()
        .map(|c| {
            let p = c.modulus().get();
            let dev = (c.affine_point_count() as f64 - p as f64).abs();
            dev / weil_bound(p, c.degree())
        })
        .collect();
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    let failures = ratios.iter().filter(|&&r| r > 1.0).count();
    Ok(vec![
        ctx.row("weil_max_ratio", curves.len(), worst)
            .bound(1.0)
            .ok(failures == 0),
        ctx.row("weil_failures", curves.len(), failures as f64)
            .model(0.0)
            .ok(failures == 0),
    ])
}

/// 20 elliptic curves y^2 = x^3 + a x + b with p <= 9973.
pub fn rank_curves(seed: u64) -> Vec<HyperellipticCurve> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7a4c);
    let primes = primes_in(101, 9973);
    let mut out = Vec::new();
    while out.len() < 20 {
        let p = *primes.choose(&mut rng).unwrap();
        let m = PrimeModulus::new(p).unwrap();
        let (a, b) = (rng.gen_range(0..p), rng.gen_range(0..p));
        let disc = m.add(m.mul(4, m.pow(a, 3)), m.mul(27, m.mul(b, b)));
        if disc == 0 {
            continue;
        }
        out.push(HyperellipticCurve::from_coeffs(&[b as i64, a as i64, 0, 1], p).unwrap());
    }
    out
}

fn ranks(ctx: &RowContext, seed: u64) -> Result<Vec<ResultRow>> {
    let g = builtin("ell_diff")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4a4b);
    let mut probes = 0;
    let mut failures = 0;
    for curve in rank_curves(seed) {
        let p = curve.modulus().get();
        for r in 1..=3 {
            let shifts = ShiftSet::from_residues(random_shifts(p, r, &mut rng), curve.modulus())?;
            let probe = numeric_rank_check(&curve, &shifts, &g, 8 * (r + 2), rng.gen())?;
            probes += 1;
            failures += usize::from(probe.verdict != RankVerdict::Independent);
        }
    }
    Ok(vec![ctx
        .row("rank_not_independent", probes, failures as f64)
        .model(0.0)
        .ok(failures == 0)])
}

pub fn all_ok(rows: &[ResultRow]) -> bool {
    rows.iter().all(|r| r.ok != Some(false))
}
