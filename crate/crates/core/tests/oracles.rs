//! Library results against independently written brute-force recounts.

use std::collections::BTreeSet;

use hyperpoisson::curve::{HyperellipticCurve, Interval};
use hyperpoisson::expsum::reconstruct_n_via_dft;
use hyperpoisson::fp::{is_prime, next_prime, PrimeModulus};
use hyperpoisson::gaps::{mu, mu_distorted, p_k_table};
use hyperpoisson::rational_map::{builtin, RationalMapExpr};
use hyperpoisson::shifted::{count_n_ab_direct, count_n_h, ShiftSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn eval(coeffs: &[u64], x: u64, p: u64) -> u64 {
    coeffs
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &c)| (acc + c * powmod(x, k as u64, p)) % p)
}

/// Every (x, y) with y^2 = f(x), by scanning all pairs.
fn all_points(coeffs: &[u64], p: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for x in 0..p {
        let fx = eval(coeffs, x, p);
        for y in 0..p {
            if y * y % p == fx {
                out.push((x, y));
            }
        }
    }
    out
}

/// x -> y for points with y in [0, (p-1)/2] and y in I.
fn brute_s_i(coeffs: &[u64], p: u64, i: Interval) -> Vec<(u64, u64)> {
    all_points(coeffs, p)
        .into_iter()
        .filter(|&(_, y)| y <= (p - 1) / 2 && i.contains(y))
        .collect()
}

fn brute_g(g: &RationalMapExpr, p: u64, base: (u64, u64), other: (u64, u64)) -> Option<u64> {
    g.eval_raw(
        PrimeModulus::new(p).unwrap(),
        [base.0, base.1, other.0, other.1],
    )
}

fn random_coeffs(p: u64, d: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut c: Vec<u64> = (0..d).map(|_| rng.gen_range(0..p)).collect();
    c.push(rng.gen_range(1..p));
    c
}

fn curve_of(coeffs: &[u64], p: u64) -> Option<HyperellipticCurve> {
    let c: Vec<i64> = coeffs.iter().map(|&v| v as i64).collect();
    HyperellipticCurve::from_coeffs(&c, p).ok()
}

const SMALL_PRIMES: [u64; 6] = [7, 11, 13, 31, 101, 199];

#[test]
fn legendre_matches_euler_criterion() {
    for p in (3..=997).filter(|&n| is_prime(n)) {
        let m = PrimeModulus::new(p).unwrap();
        for a in 0..p {
            let euler = powmod(a, (p - 1) / 2, p);
            let expected = match euler {
                0 => 0,
                1 => 1,
                _ => -1,
            };
            assert_eq!(m.legendre(a), expected, "a = {a}, p = {p}");
        }
    }
}

#[test]
fn square_roots_are_canonical() {
    for p in [7u64, 13, 17, 101, 997] {
        let m = PrimeModulus::new(p).unwrap();
        for a in 0..p {
            let roots: Vec<u64> = (0..p).filter(|y| y * y % p == a).collect();
            assert_eq!(m.sqrt(a), roots.first().copied().map(|r| r.min(p - r) % p));
        }
    }
}

#[test]
fn primality_matches_trial_division() {
    let trial = |n: u64| {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    };
    for n in 0..20_000 {
        assert_eq!(is_prime(n), trial(n), "n = {n}");
    }
    for n in 3..5000 {
        let expected = (n..).find(|&k| trial(k)).unwrap();
        assert_eq!(next_prime(n).unwrap(), expected);
    }
}

#[test]
fn field_ops_match_wide_arithmetic() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for p in [1_000_003u64, 4_294_967_311, (1 << 61) - 1] {
        let m = PrimeModulus::new(p).unwrap();
        for _ in 0..2000 {
            let (a, b) = (rng.gen_range(0..p), rng.gen_range(0..p));
            assert_eq!(m.mul(a, b) as u128, a as u128 * b as u128 % p as u128);
            assert_eq!(m.add(a, b) as u128, (a as u128 + b as u128) % p as u128);
            if a != 0 {
                assert_eq!(m.mul(a, m.inv(a).unwrap()), 1);
            }
        }
    }
}

#[test]
fn point_counts_by_pair_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for p in SMALL_PRIMES {
        for d in 3..=6 {
            let coeffs = random_coeffs(p, d, &mut rng);
            let Some(curve) = curve_of(&coeffs, p) else {
                continue;
            };
            assert_eq!(
                curve.affine_point_count(),
                all_points(&coeffs, p).len() as u64
            );
        }
    }
}

#[test]
fn s_i_by_pair_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for p in SMALL_PRIMES {
        let coeffs = random_coeffs(p, 3, &mut rng);
        let curve = curve_of(&coeffs, p).unwrap();
        let half = p.div_ceil(2);
        for lo in 0..=half {
            for hi in lo..=half {
                let i = Interval::new(lo, hi).unwrap();
                let got: Vec<(u64, u64)> = curve
                    .x_coordinate_set(i)
                    .unwrap()
                    .points()
                    .iter()
                    .map(|pt| (pt.x, pt.y))
                    .collect();
                assert_eq!(got, brute_s_i(&coeffs, p, i));
            }
        }
    }
}

/// Affine chord rule on y^2 = x^3 + a x + b; None is the point at infinity.
fn ec_add(p: u64, a: u64, u: Option<(u64, u64)>, v: Option<(u64, u64)>) -> Option<(u64, u64)> {
    let (Some((x1, y1)), Some((x2, y2))) = (u, v) else {
        return u.or(v);
    };
    let inv = |z: u64| powmod(z, p - 2, p);
    let s = if x1 != x2 {
        (y2 + p - y1) % p * inv((x2 + p - x1) % p) % p
    } else if (y1 + y2) % p == 0 {
        return None;
    } else {
        (3 * x1 % p * x1 + a) % p * inv(2 * y1 % p) % p
    };
    let x3 = (s * s % p + 2 * p - x1 - x2) % p;
    let y3 = (s * ((x1 + p - x3) % p) % p + p - y1) % p;
    Some((x3, y3))
}

#[test]
fn elliptic_difference_is_x_of_p0_minus_p() {
    let g = builtin("ell_diff").unwrap();
    for (p, a, b) in [(101u64, 2u64, 3u64), (199, 7, 1), (31, 1, 1)] {
        let pts = all_points(&[b, a, 0, 1], p);
        for &(x, y) in &pts {
            for &(x0, y0) in &pts {
                let diff = ec_add(p, a, Some((x0, y0)), Some((x, (p - y) % p)));
                let got = brute_g(&g, p, (x, y), (x0, y0));
                if x == x0 {
                    assert_eq!(got, None);
                } else {
                    assert_eq!(got, diff.map(|pt| pt.0));
                }
            }
        }
    }
}

struct SmallInstance {
    p: u64,
    coeffs: Vec<u64>,
    curve: HyperellipticCurve,
    i: Interval,
    j: Interval,
    g: RationalMapExpr,
}

fn instances(seed: u64, n: usize) -> Vec<SmallInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let maps = [builtin("xcoord").unwrap(), builtin("ell_diff").unwrap()];
    let mut out = Vec::new();
    while out.len() < n {
        let p = SMALL_PRIMES[rng.gen_range(1..SMALL_PRIMES.len())];
        let coeffs = random_coeffs(p, rng.gen_range(3..=5), &mut rng);
        let Some(curve) = curve_of(&coeffs, p) else {
            continue;
        };
        let half = p.div_ceil(2);
        let lo = rng.gen_range(0..half);
        let i = Interval::new(lo, rng.gen_range(lo..=half)).unwrap();
        let jlo = rng.gen_range(0..p);
        let j = Interval::new(jlo, rng.gen_range(jlo..=p)).unwrap();
        let g = maps[rng.gen_range(0..2)].clone();
        out.push(SmallInstance {
            p,
            coeffs,
            curve,
            i,
            j,
            g,
        });
    }
    out
}

/// x + h is in S_{I,J,P} for the base point P.
fn brute_member(inst: &SmallInstance, s: &[(u64, u64)], base: (u64, u64), x0: u64) -> bool {
    s.iter().find(|pt| pt.0 == x0).is_some_and(|&other| {
        brute_g(&inst.g, inst.p, base, other).is_some_and(|v| inst.j.contains(v))
    })
}

#[test]
fn shifted_counts_by_recount() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for inst in instances(4, 60) {
        let s = brute_s_i(&inst.coeffs, inst.p, inst.i);
        let m = inst.curve.modulus();
        let mut shifts: Vec<u64> = Vec::new();
        while shifts.len() < 4 {
            let h = rng.gen_range(1..inst.p);
            if !shifts.contains(&h) {
                shifts.push(h);
            }
        }
        let (a, b) = shifts.split_at(rng.gen_range(0..=3));
        let expected_h = s
            .iter()
            .filter(|&&base| {
                a.iter()
                    .all(|h| brute_member(&inst, &s, base, (base.0 + h) % inst.p))
            })
            .count() as u64;
        let set_a = ShiftSet::from_residues(a.to_vec(), m).unwrap();
        let set_b = ShiftSet::from_residues(b.to_vec(), m).unwrap();
        assert_eq!(
            count_n_h(&inst.curve, &set_a, inst.i, inst.j, &inst.g).unwrap(),
            expected_h
        );
        let expected_ab = s
            .iter()
            .filter(|&&base| {
                a.iter()
                    .all(|h| brute_member(&inst, &s, base, (base.0 + h) % inst.p))
                    && b.iter()
                        .all(|h| !brute_member(&inst, &s, base, (base.0 + h) % inst.p))
            })
            .count() as u64;
        assert_eq!(
            count_n_ab_direct(&inst.curve, &set_a, &set_b, inst.i, inst.j, &inst.g).unwrap(),
            expected_ab
        );
    }
}

#[test]
fn window_counts_by_recount() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for inst in instances(6, 60) {
        let s = brute_s_i(&inst.coeffs, inst.p, inst.i);
        if s.is_empty() {
            continue;
        }
        let set = inst.curve.x_coordinate_set(inst.i).unwrap();
        let t = rng.gen_range(1.0..(inst.p - 1) as f64);
        let window = t.floor() as u64;
        for distorted in [false, true] {
            let mut expected = vec![0u64; window as usize + 1];
            for &base in &s {
                let k = (1..=window)
                    .map(|step| (base.0 + step) % inst.p)
                    .filter(|&x0| {
                        if distorted {
                            brute_member(&inst, &s, base, x0)
                        } else {
                            s.iter().any(|pt| pt.0 == x0)
                        }
                    })
                    .count();
                expected[k] += 1;
            }
            let distortion = distorted.then_some((inst.j, &inst.g));
            let table = p_k_table(&set, distortion, t).unwrap();
            assert_eq!(table.counts, expected);
        }
    }
}

#[test]
fn mu_statistics_by_recount() {
    for inst in instances(7, 60) {
        let s = brute_s_i(&inst.coeffs, inst.p, inst.i);
        if s.is_empty() {
            continue;
        }
        let set = inst.curve.x_coordinate_set(inst.i).unwrap();
        let xs: BTreeSet<u64> = s.iter().map(|pt| pt.0).collect();
        assert_eq!(xs.len(), s.len());
        for lambda in [0.0, 0.4, 1.0, 1.5, 3.0] {
            let threshold = lambda * inst.p as f64 / inst.i.len() as f64;
            let (mut plain, mut distorted) = (0, 0);
            for (n, &pt) in s.iter().enumerate() {
                let next = s[(n + 1) % s.len()];
                let gap = if n + 1 < s.len() {
                    next.0 - pt.0
                } else {
                    next.0 + inst.p - pt.0
                };
                if gap as f64 >= threshold {
                    plain += 1;
                    if brute_g(&inst.g, inst.p, pt, next).is_some_and(|v| inst.j.contains(v)) {
                        distorted += 1;
                    }
                }
            }
            let m = s.len() as f64;
            assert!((mu(&set, lambda).unwrap() - plain as f64 / m).abs() < 1e-12);
            let got = mu_distorted(&set, lambda, inst.j, &inst.g).unwrap();
            assert!((got - distorted as f64 / m).abs() < 1e-12);
        }
    }
}

#[test]
fn fourier_reconstruction_small_cases() {
    for inst in instances(8, 40).into_iter().filter(|inst| inst.p <= 31) {
        let m = inst.curve.modulus();
        for h in [vec![], vec![3]] {
            let shifts = ShiftSet::new(&h, m).unwrap();
            let dft = reconstruct_n_via_dft(&inst.curve, &shifts, inst.i, inst.j, &inst.g).unwrap();
            let s = brute_s_i(&inst.coeffs, inst.p, inst.i);
            let expected = s
                .iter()
                .filter(|&&base| {
                    h.iter()
                        .all(|&d| brute_member(&inst, &s, base, (base.0 + d as u64) % inst.p))
                })
                .count();
            assert!((dft - expected as f64).abs() < 1e-6, "{dft} vs {expected}");
        }
    }
}
