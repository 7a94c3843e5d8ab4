//! Command implementations behind the CLI. Each command turns a config into
//! result rows; printing is left to the caller.

pub mod config;
pub mod output;
pub mod verify;

use rayon::prelude::*;

use crate::curve::{HyperellipticCurve, Interval};
use crate::error::{Error, Result};
use crate::fp::{next_prime, PrimeModulus};
use crate::gaps::{
    distribution_distance, interval_size_conditions, mu, mu_distorted, p_k_table, PkModel,
};
use crate::shifted::{n_ab_report, n_h_report, ShiftSet};

pub use config::{ExperimentConfig, OutputFormat};
pub use output::{render, write_rows, ResultRow, RowContext, CSV_HEADER};
pub use verify::Suite;

/// floor(p / ln p), the default size of I for spacing experiments.
pub fn default_interval(m: PrimeModulus) -> Interval {
    let p = m.get() as f64;
    Interval::new(0, (p / p.ln()).floor() as u64).expect("ordered")
}

fn context(
    experiment: &'static str,
    curve: &HyperellipticCurve,
    i: Interval,
    j: Option<Interval>,
    cfg: &ExperimentConfig,
) -> RowContext {
    RowContext {
        experiment,
        p: curve.modulus().get(),
        d: curve.degree(),
        i: Some(i),
        j,
        seed: cfg.seed(),
    }
}

/// 3 / sqrt(m) unless configured.
fn tolerance(cfg: &ExperimentConfig, m: usize) -> f64 {
    cfg.tolerance.unwrap_or(3.0 / (m as f64).sqrt())
}

/// |J| / p, or 1 when undistorted.
fn width(j: Option<Interval>, m: PrimeModulus) -> f64 {
    j.map_or(1.0, |j| j.len() as f64 / m.get() as f64)
}

fn condition_rows(ctx: &RowContext, m: PrimeModulus, i: Interval) -> Vec<ResultRow> {
    let p = m.get() as f64;
    let lnln = p.ln().ln();
    let (weak, strong) = interval_size_conditions(m.get(), i.len());
    vec![
        ctx.row("size_vs_p_over_lnlnp", 0, i.len() as f64)
            .model(p / lnln)
            .ok(weak),
        ctx.row("size_vs_theorem_threshold", 0, i.len() as f64)
            .model(p * lnln * lnln / p.ln())
            .ok(strong),
    ]
}

/// Point counts, |S_I|, and N(H) / N(A, B) when shifts are given.
pub fn cmd_count(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let m = cfg.prime()?;
    let curve = cfg.curve(m)?;
    let i = cfg.i.unwrap_or_else(|| Interval::half(m));
    let j = cfg.j_interval(m)?;
    let j_full = j.unwrap_or_else(|| Interval::full(m));
    let ctx = context("count", &curve, i, j, cfg);
    let p = m.get();
    let d = curve.degree();

    let mut rows = vec![ctx
        .row("affine_points", 0, curve.affine_point_count() as f64)
        .within(p as f64, verify::weil_bound(p, d))];
    let card = curve.cardinality_deviation(i)?;
    rows.push(
        ctx.row("s_i", 0, card.observed as f64)
            .model(card.main_term as f64)
            .bound(card.bound)
            .ok(card.within_bound()),
    );

    let g = cfg.map()?;
    let report_rows = |stat: &str, index: usize, report: crate::shifted::CountReport| {
        for flag in &report.hypothesis_flags {
            eprintln!("warning: {stat}: {flag}");
        }
        let main = crate::shifted::ratio_to_f64(&report.main_term);
        ctx.row(stat, index, report.observed as f64)
            .model(main)
            .bound(report.explicit_bound)
            .ok(report.within_bound())
    };
    if let Some(h) = &cfg.h {
        let shifts = ShiftSet::new(h, m)?;
        rows.push(report_rows(
            "n_h",
            shifts.len(),
            n_h_report(&curve, &shifts, i, j_full, &g)?,
        ));
    }
    if cfg.a.is_some() || cfg.b.is_some() {
        let a = ShiftSet::new(cfg.a.as_deref().unwrap_or(&[]), m)?;
        let b = ShiftSet::new(cfg.b.as_deref().unwrap_or(&[]), m)?;
        let report = n_ab_report(&curve, &a, &b, i, j_full, &g)?;
        let direct = report.observed as f64;
        rows.push(report_rows("n_ab", a.len() + b.len(), report));
        let ie = crate::shifted::count_n_ab_inclusion_exclusion(&curve, &a, &b, i, j_full, &g)?;
        rows.push(
            ctx.row("n_ab_inclusion_exclusion", a.len() + b.len(), ie as f64)
                .model(direct)
                .ok(ie as f64 == direct),
        );
    }
    Ok(rows)
}

/// mu(lambda) per lambda against e^(-lambda); with J also the distorted mu and
/// the distorted P_0 at t = lambda p / |I| against e^(-lambda |J|/p).
pub fn cmd_gaps(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let m = cfg.prime()?;
    let curve = cfg.curve(m)?;
    let i = cfg.i.unwrap_or_else(|| default_interval(m));
    gaps_rows(cfg, &curve, i)
}

fn gaps_rows(
    cfg: &ExperimentConfig,
    curve: &HyperellipticCurve,
    i: Interval,
) -> Result<Vec<ResultRow>> {
    let m = curve.modulus();
    let j = cfg.j_interval(m)?;
    let s = curve.x_coordinate_set(i)?;
    if s.is_empty() {
        return Err(Error::NoPoints(format!("S_I is empty for I = {i} mod {m}")));
    }
    let ctx = context("gaps", curve, i, j, cfg);
    let tol = tolerance(cfg, s.len());
    let lambdas = cfg.lambdas()?;

    let mut rows = vec![ctx.row("points", 0, s.len() as f64)];
    rows.extend(condition_rows(&ctx, m, i));
    for &lambda in &lambdas {
        let model = (-lambda).exp();
        let emp = mu(&s, lambda)?;
        rows.push(ctx.row("mu", lambda, emp).within(model, tol));
        rows.push(
            ctx.row("mu_abs_dev", lambda, (emp - model).abs())
                .bound(tol)
                .ok((emp - model).abs() <= tol),
        );
    }
    if let Some(j) = j {
        let g = cfg.map()?;
        let w = width(Some(j), m);
        for &lambda in &lambdas {
            let model = (-lambda * w).exp();
            let emp = mu_distorted(&s, lambda, j, &g)?;
            rows.push(ctx.row("mu_distorted", lambda, emp).within(model, tol));
            rows.push(
                ctx.row("mu_distorted_abs_dev", lambda, (emp - model).abs())
                    .bound(tol)
                    .ok((emp - model).abs() <= tol),
            );
            let t = lambda * m.get() as f64 / i.len() as f64;
            if t >= 1.0 && t < m.get() as f64 {
                let table = p_k_table(&s, Some((j, &g)), t)?;
                rows.push(
                    ctx.row("p0_distorted", lambda, table.empirical(0))
                        .within(model, tol),
                );
            }
        }
    }
    Ok(rows)
}

/// P_k(t) for k <= kmax against the Poisson and binomial models, plus
/// distance summaries. Without `t`, t = lambda p / |I| for the first lambda
/// (default 1).
pub fn cmd_poisson(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let m = cfg.prime()?;
    let curve = cfg.curve(m)?;
    let i = cfg.i.unwrap_or_else(|| default_interval(m));
    poisson_rows(cfg, &curve, i)
}

fn poisson_rows(
    cfg: &ExperimentConfig,
    curve: &HyperellipticCurve,
    i: Interval,
) -> Result<Vec<ResultRow>> {
    let m = curve.modulus();
    let j = cfg.j_interval(m)?;
    let s = curve.x_coordinate_set(i)?;
    if s.is_empty() {
        return Err(Error::NoPoints(format!("S_I is empty for I = {i} mod {m}")));
    }
    let t = match cfg.t {
        Some(t) => t,
        None => {
            let lambda = cfg
                .lambdas
                .as_ref()
                .and_then(|l| l.first().copied())
                .unwrap_or(1.0);
            lambda * m.get() as f64 / i.len() as f64
        }
    };
    let g = cfg.map()?;
    let table = p_k_table(&s, j.map(|j| (j, &g)), t)?;
    let ctx = context("poisson", curve, i, j, cfg);
    let tol = tolerance(cfg, s.len());
    let kmax = cfg
        .kmax
        .unwrap_or_else(|| (table.window() as usize).min(10));

    let mut rows = Vec::new();
    for k in 0..=kmax {
        let emp = table.empirical(k);
        rows.push(ctx.row("pk", k, emp).within(table.poisson(k), tol));
        rows.push(
            ctx.row("pk_binomial", k, emp)
                .within(table.binomial(k), tol),
        );
    }
    for (name, model) in [
        ("poisson", PkModel::Poisson),
        ("binomial", PkModel::Binomial),
    ] {
        let dist = distribution_distance(&table, model, kmax);
        rows.push(
            ctx.row(&format!("pk_sup_{name}"), kmax, dist.sup)
                .bound(tol)
                .ok(dist.sup <= tol),
        );
        rows.push(ctx.row(&format!("pk_tv_{name}"), kmax, dist.total_variation));
    }
    Ok(rows)
}

pub fn cmd_verify(suite: Suite, cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    verify::run_suite(suite, cfg.seed.unwrap_or(verify::DEFAULT_VERIFY_SEED))
}

/// `count` primes spread log-uniformly over [pmin, pmax], deduplicated and
/// ascending.
pub fn sweep_primes(pmin: u64, pmax: u64, count: usize) -> Result<Vec<u64>> {
    let (lo, hi) = ((pmin as f64).ln(), (pmax as f64).ln());
    let mut primes = Vec::with_capacity(count);
    for k in 0..count {
        let frac = if count == 1 {
            0.0
        } else {
            k as f64 / (count - 1) as f64
        };
        let target = (lo + frac * (hi - lo)).exp().round() as u64;
        let p = next_prime(target.clamp(pmin, pmax).max(3))?;
        if primes.last() != Some(&p) {
            primes.push(p);
        }
    }
    Ok(primes)
}

/// Gap and window statistics per prime with I = [0, floor(p / ln p)),
/// ordered by p.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let (pmin, pmax, count) = cfg.sweep_range()?;
    let primes = sweep_primes(pmin, pmax, count)?;
    let per_prime: Vec<Vec<ResultRow>> = primes
        .par_iter()
        .map(|&p| -> Result<Vec<ResultRow>> {
            let m = PrimeModulus::new(p)?;
            let curve = cfg.curve(m)?;
            let i = default_interval(m);
            let mut rows = gaps_rows(cfg, &curve, i)?;
            rows.extend(poisson_rows(cfg, &curve, i)?);
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_prime.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    fn find<'a>(rows: &'a [ResultRow], stat: &str) -> &'a ResultRow {
        rows.iter().find(|r| r.stat == stat).unwrap()
    }

    #[test]
    fn count_examples() {
        let rows = cmd_count(&cfg("p = 7\nf = 1,0,0,1\ni = 0:4")).unwrap();
        assert_eq!(find(&rows, "s_i").empirical, 7.0);
        let rows = cmd_count(&cfg(
            "p = 7\nf = 1,0,0,1\ni = 0:4\nh = 1\nj = 0:7\ng = xcoord",
        ))
        .unwrap();
        assert_eq!(find(&rows, "n_h").empirical, 7.0);
        let err = cmd_count(&cfg("p = 7\nf = 0,0,1")).unwrap_err();
        assert!(err.to_string().starts_with("f is a square"));
    }

    #[test]
    fn gaps_lambda_zero_row() {
        let rows = cmd_gaps(&cfg("p = 1009\nlambdas = 0,1")).unwrap();
        let first = rows.iter().find(|r| r.stat == "mu").unwrap();
        assert_eq!((first.empirical, first.model), (1.0, Some(1.0)));
    }

    #[test]
    fn gaps_need_points() {
        let err = cmd_gaps(&cfg("p = 7\ni = 0:0")).unwrap_err();
        assert!(err.to_string().starts_with("no points"));
    }

    #[test]
    fn poisson_rows_sum_to_one() {
        let rows = cmd_poisson(&cfg("p = 1009\nt = 6.5\nkmax = 6")).unwrap();
        let total: f64 = rows
            .iter()
            .filter(|r| r.stat == "pk")
            .map(|r| r.empirical)
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
        let single = cmd_poisson(&cfg("p = 1009\nt = 6.5\nkmax = 0")).unwrap();
        assert_eq!(single.iter().filter(|r| r.stat == "pk").count(), 1);
    }

    #[test]
    fn sweep_primes_are_ordered() {
        let primes = sweep_primes(1000, 100_000, 5).unwrap();
        assert_eq!(primes.first(), Some(&1009));
        assert!(primes.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(sweep_primes(1000, 2000, 1).unwrap(), vec![1009]);
    }

    #[test]
    fn single_prime_sweep_matches_direct_runs() {
        let sweep = cmd_sweep(&cfg("pmin = 1000\npmax = 5000\ncount = 1")).unwrap();
        let mut direct = cmd_gaps(&cfg("p = 1009")).unwrap();
        direct.extend(cmd_poisson(&cfg("p = 1009")).unwrap());
        assert_eq!(sweep, direct);
    }
}
