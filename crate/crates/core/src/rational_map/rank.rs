//! Sampling probe for linear independence of {1, g_1, ..., g_r} on C_H.
//!
//! Full rank on some sample set proves independence of the functions; a
//! persistent deficiency is only evidence of dependence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::RationalMapExpr;
use crate::curve::HyperellipticCurve;
use crate::error::{Error, Result};
use crate::fp::PrimeModulus;
use crate::shifted::ShiftSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankVerdict {
    Independent,
    DependentSuspect,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankProbe {
    pub verdict: RankVerdict,
    pub rank: usize,
    /// Pole-free rows that entered the elimination.
    pub rows: usize,
    /// Points of C_H drawn (rows plus skipped poles).
    pub points: usize,
}

/// Draws `samples` random points of C_H (seeded), evaluates rows
/// (1, g_1, ..., g_r) with g_i = g(x, y, x + h_i, y_i), skips poles, and
/// reports the rank mod p.
pub fn numeric_rank_check(
    curve: &HyperellipticCurve,
    shifts: &ShiftSet,
    g: &RationalMapExpr,
    samples: usize,
    seed: u64,
) -> Result<RankProbe> {
    let r = shifts.len();
    if samples < r + 2 {
        return Err(Error::Precondition(format!(
            "need at least r + 2 = {} samples",
            r + 2
        )));
    }
    let m = curve.modulus();
    let p = m.get();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_draws = 64 * samples + 4096;
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut points = 0;
    let mut draws = 0;

    while points < samples && draws < max_draws {
        draws += 1;
        let x = rng.gen_range(0..p);
        let Some(y) = pick_y(curve, x, &mut rng) else {
            continue;
        };
        let mut shifted_ys = Vec::with_capacity(r);
        for &h in shifts.shifts() {
            match pick_y(curve, m.add(x, h), &mut rng) {
                Some(yi) => shifted_ys.push(yi),
                None => break,
            }
        }
        if shifted_ys.len() < r {
            continue;
        }
        points += 1;
        let mut row = Vec::with_capacity(r + 1);
        row.push(1);
        for (&h, &yi) in shifts.shifts().iter().zip(&shifted_ys) {
            match g.eval_raw(m, [x, y, m.add(x, h), yi]) {
                Some(v) => row.push(v),
                None => break,
            }
        }
        if row.len() == r + 1 {
            rows.push(row);
        }
    }

    let rank = rank_mod_p(rows.clone(), m);
    let verdict = if rank == r + 1 {
        RankVerdict::Independent
    } else if rows.len() < r + 1 {
        RankVerdict::Inconclusive
    } else {
        RankVerdict::DependentSuspect
    };
    Ok(RankProbe {
        verdict,
        rank,
        rows: rows.len(),
        points,
    })
}

fn pick_y(curve: &HyperellipticCurve, x: u64, rng: &mut ChaCha8Rng) -> Option<u64> {
    let y = curve.canonical_y(x)?;
    if y != 0 && rng.gen::<bool>() {
        Some(curve.modulus().get() - y)
    } else {
        Some(y)
    }
}

/// Rank of a row set by Gaussian elimination over F_p.
pub(crate) fn rank_mod_p(mut rows: Vec<Vec<u64>>, m: PrimeModulus) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = m.inv(rows[rank][col]).expect("pivot is nonzero");
        let pivot_row: Vec<u64> = rows[rank].iter().map(|&v| m.mul(v, inv)).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[col] != 0 {
                let factor = row[col];
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v = m.sub(*v, m.mul(factor, pv));
                }
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational_map::{builtin, parse};

    fn curve() -> HyperellipticCurve {
        HyperellipticCurve::from_coeffs(&[3, 2, 0, 1], 1009).unwrap()
    }

    #[test]
    fn ell_diff_is_independent() {
        let c = curve();
        let g = builtin("ell_diff").unwrap();
        for hs in [&[1i64][..], &[1, 5], &[2, 3, 7]] {
            let h = ShiftSet::new(hs, c.modulus()).unwrap();
            let probe = numeric_rank_check(&c, &h, &g, 40, 7).unwrap();
            assert_eq!(probe.verdict, RankVerdict::Independent);
            assert_eq!(probe.rank, hs.len() + 1);
        }
    }

    #[test]
    fn constant_map_is_dependent() {
        let c = curve();
        let h = ShiftSet::new(&[1], c.modulus()).unwrap();
        let probe = numeric_rank_check(&c, &h, &parse("1").unwrap(), 20, 1).unwrap();
        assert_eq!(probe.verdict, RankVerdict::DependentSuspect);
        assert_eq!(probe.rank, 1);
    }

    #[test]
    fn xcoord_has_rank_two() {
        let c = curve();
        let h = ShiftSet::new(&[4], c.modulus()).unwrap();
        let probe = numeric_rank_check(&c, &h, &builtin("xcoord").unwrap(), 10, 3).unwrap();
        assert_eq!(probe.verdict, RankVerdict::Independent);
    }

    #[test]
    fn always_pole_is_inconclusive() {
        let c = curve();
        let h = ShiftSet::new(&[1], c.modulus()).unwrap();
        let probe = numeric_rank_check(&c, &h, &parse("1/(x - x)").unwrap(), 10, 3).unwrap();
        assert_eq!(probe.verdict, RankVerdict::Inconclusive);
        assert_eq!(probe.rows, 0);
    }

    #[test]
    fn too_few_samples() {
        let c = curve();
        let h = ShiftSet::new(&[1, 2], c.modulus()).unwrap();
        assert!(numeric_rank_check(&c, &h, &builtin("ell_diff").unwrap(), 3, 0).is_err());
    }

    #[test]
    fn rank_is_monotone_in_samples() {
        let c = HyperellipticCurve::from_coeffs(&[1, 1, 0, 1], 13).unwrap();
        let h = ShiftSet::new(&[1, 2], c.modulus()).unwrap();
        let g = builtin("ell_diff").unwrap();
        let mut last = 0;
        for n in 4..30 {
            let probe = numeric_rank_check(&c, &h, &g, n, 11).unwrap();
            assert!(probe.rank >= last && probe.rank <= 3);
            last = probe.rank;
        }
    }

    #[test]
    fn gaussian_elimination() {
        let m = PrimeModulus::new(7).unwrap();
        assert_eq!(rank_mod_p(vec![vec![1, 2], vec![2, 4]], m), 1);
        assert_eq!(rank_mod_p(vec![vec![1, 2], vec![2, 5]], m), 2);
        assert_eq!(rank_mod_p(vec![], m), 0);
    }
}
