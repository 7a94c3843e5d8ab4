//! Experiment configuration: `key = value` files merged under CLI flags.

use std::path::Path;
use std::str::FromStr;

use crate::curve::{HyperellipticCurve, Interval};
use crate::error::{Error, Result};
use crate::fp::PrimeModulus;
use crate::rational_map::{self, RationalMapExpr};

/// y^2 = x^3 + x + 1 when no polynomial is given.
pub const DEFAULT_F: [i64; 4] = [1, 1, 0, 1];
pub const DEFAULT_LAMBDAS: [f64; 4] = [0.5, 1.0, 2.0, 3.0];
pub const DEFAULT_MAP: &str = "ell_diff";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown format `{other}`"))),
        }
    }
}

/// Every field is optional so that a file and the command line can be
/// layered; accessors apply defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentConfig {
    pub p: Option<u64>,
    pub pmin: Option<u64>,
    pub pmax: Option<u64>,
    pub count: Option<usize>,
    pub f: Option<Vec<i64>>,
    pub i: Option<Interval>,
    pub j: Option<Interval>,
    pub g: Option<String>,
    pub h: Option<Vec<i64>>,
    pub a: Option<Vec<i64>>,
    pub b: Option<Vec<i64>>,
    pub t: Option<f64>,
    pub lambdas: Option<Vec<f64>>,
    pub kmax: Option<usize>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub format: Option<OutputFormat>,
    pub tolerance: Option<f64>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value for `{key}`: `{value}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses `key = value` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "p" => self.p = Some(parse_value(key, value)?),
            "pmin" => self.pmin = Some(parse_value(key, value)?),
            "pmax" => self.pmax = Some(parse_value(key, value)?),
            "count" => self.count = Some(parse_value(key, value)?),
            "f" => self.f = Some(parse_list(key, value)?),
            "i" => self.i = Some(parse_value(key, value)?),
            "j" => self.j = Some(parse_value(key, value)?),
            "g" => self.g = Some(value.to_string()),
            "h" => self.h = Some(parse_list(key, value)?),
            "a" => self.a = Some(parse_list(key, value)?),
            "b" => self.b = Some(parse_list(key, value)?),
            "t" => self.t = Some(parse_value(key, value)?),
            "lambdas" => self.lambdas = Some(parse_list(key, value)?),
            "kmax" => self.kmax = Some(parse_value(key, value)?),
            "seed" => self.seed = Some(parse_value(key, value)?),
            "threads" => self.threads = Some(parse_value(key, value)?),
            "format" => self.format = Some(value.parse()?),
            "tolerance" => self.tolerance = Some(parse_value(key, value)?),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Fields set in `over` replace ours.
    pub fn merge(self, over: ExperimentConfig) -> Self {
        Self {
            p: over.p.or(self.p),
            pmin: over.pmin.or(self.pmin),
            pmax: over.pmax.or(self.pmax),
            count: over.count.or(self.count),
            f: over.f.or(self.f),
            i: over.i.or(self.i),
            j: over.j.or(self.j),
            g: over.g.or(self.g),
            h: over.h.or(self.h),
            a: over.a.or(self.a),
            b: over.b.or(self.b),
            t: over.t.or(self.t),
            lambdas: over.lambdas.or(self.lambdas),
            kmax: over.kmax.or(self.kmax),
            seed: over.seed.or(self.seed),
            threads: over.threads.or(self.threads),
            format: over.format.or(self.format),
            tolerance: over.tolerance.or(self.tolerance),
        }
    }

    /// Single-prime commands need `p` and no sweep range.
    pub fn prime(&self) -> Result<PrimeModulus> {
        if self.pmin.is_some() || self.pmax.is_some() || self.count.is_some() {
            return Err(Error::Config(
                "pmin/pmax/count belong to sweep; use p here".to_string(),
            ));
        }
        let p = self
            .p
            .ok_or_else(|| Error::Config("missing p".to_string()))?;
        PrimeModulus::new(p).map_err(|e| Error::Config(e.to_string()))
    }

    /// (pmin, pmax, count) for sweeps.
    pub fn sweep_range(&self) -> Result<(u64, u64, usize)> {
        if self.p.is_some() {
            return Err(Error::Config(
                "sweep takes pmin/pmax/count, not p".to_string(),
            ));
        }
        let missing = |k: &str| Error::Config(format!("sweep needs {k}"));
        let pmin = self.pmin.ok_or_else(|| missing("pmin"))?;
        let pmax = self.pmax.ok_or_else(|| missing("pmax"))?;
        let count = self.count.ok_or_else(|| missing("count"))?;
        if pmin < 3 || pmin >= pmax || count == 0 {
            return Err(Error::Config(
                "sweep needs 3 <= pmin < pmax and count >= 1".to_string(),
            ));
        }
        Ok((pmin, pmax, count))
    }

    pub fn coefficients(&self) -> &[i64] {
        self.f.as_deref().unwrap_or(&DEFAULT_F)
    }

    pub fn curve(&self, m: PrimeModulus) -> Result<HyperellipticCurve> {
        HyperellipticCurve::from_coeffs(self.coefficients(), m.get())
    }

    pub fn map(&self) -> Result<RationalMapExpr> {
        rational_map::builtin_or_parse(self.g.as_deref().unwrap_or(DEFAULT_MAP))
    }

    pub fn lambdas(&self) -> Result<Vec<f64>> {
        let lambdas = self
            .lambdas
            .clone()
            .unwrap_or_else(|| DEFAULT_LAMBDAS.to_vec());
        if lambdas.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
            return Err(Error::Config(
                "lambda values must be non-negative".to_string(),
            ));
        }
        Ok(lambdas)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn format(&self) -> OutputFormat {
        self.format.unwrap_or_default()
    }

    /// `J` checked against the modulus; `None` when undistorted.
    pub fn j_interval(&self, m: PrimeModulus) -> Result<Option<Interval>> {
        if let Some(j) = self.j {
            j.check_within(m)?;
        }
        Ok(self.j)
    }
}
