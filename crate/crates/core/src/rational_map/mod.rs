//! Two-point rational functions g(P, P0) = g(x, y, x0, y0) on the curve.
//!
//! Expressions come from a small arithmetic grammar (see [`parse`]) or from
//! the built-ins [`builtin`]. Evaluation is exact in F_p; any division by
//! zero yields [`MapValue::Pole`].

mod fraction;
mod parser;
mod rank;

use std::fmt;

pub use fraction::{Fraction, MultiPoly};
pub use parser::parse;
pub use rank::{numeric_rank_check, RankProbe, RankVerdict};

use crate::error::{Error, Result};
use crate::fp::{PrimeModulus, Residue};

/// Names of the built-in maps.
pub const BUILTINS: [&str; 2] = ["ell_diff", "xcoord"];

/// Text of the elliptic difference map x(P0 - P).
pub const ELL_DIFF_TEXT: &str = "((y0 + y) / (x0 - x))^2 - x - x0";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    X0,
    Y0,
}

impl Var {
    pub fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
            Var::X0 => 2,
            Var::Y0 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::X0 => "x0",
            Var::Y0 => "y0",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        match name {
            "x" => Some(Var::X),
            "y" => Some(Var::Y),
            "x0" => Some(Var::X0),
            "y0" => Some(Var::Y0),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RationalMapExpr {
    Const(u64),
    Var(Var),
    Neg(Box<RationalMapExpr>),
    Add(Box<RationalMapExpr>, Box<RationalMapExpr>),
    Sub(Box<RationalMapExpr>, Box<RationalMapExpr>),
    Mul(Box<RationalMapExpr>, Box<RationalMapExpr>),
    Div(Box<RationalMapExpr>, Box<RationalMapExpr>),
    Pow(Box<RationalMapExpr>, u32),
}

/// Result of evaluating a map: a field value or a pole.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapValue {
    Value(Residue),
    Pole,
}

impl MapValue {
    pub fn value(self) -> Option<Residue> {
        match self {
            MapValue::Value(r) => Some(r),
            MapValue::Pole => None,
        }
    }

    pub fn is_pole(self) -> bool {
        matches!(self, MapValue::Pole)
    }
}

/// Looks up a built-in map by name.
pub fn builtin(name: &str) -> Result<RationalMapExpr> {
    match name {
        "ell_diff" => parse(ELL_DIFF_TEXT),
        "xcoord" => Ok(RationalMapExpr::Var(Var::X0)),
        _ => Err(Error::UnknownBuiltin(name.to_string())),
    }
}

/// A built-in name or an expression in the map grammar.
pub fn builtin_or_parse(text: &str) -> Result<RationalMapExpr> {
    let t = text.trim();
    if BUILTINS.contains(&t) {
        builtin(t)
    } else {
        parse(t)
    }
}

impl RationalMapExpr {
    /// Exact evaluation at raw canonical coordinates; `None` on a pole.
    pub fn eval_raw(&self, m: PrimeModulus, vars: [u64; 4]) -> Option<u64> {
        use RationalMapExpr::*;
        Some(match self {
            Const(c) => m.reduce(*c),
            Var(v) => vars[v.index()],
            Neg(a) => m.neg(a.eval_raw(m, vars)?),
            Add(a, b) => m.add(a.eval_raw(m, vars)?, b.eval_raw(m, vars)?),
            Sub(a, b) => m.sub(a.eval_raw(m, vars)?, b.eval_raw(m, vars)?),
            Mul(a, b) => m.mul(a.eval_raw(m, vars)?, b.eval_raw(m, vars)?),
            Div(a, b) => {
                let num = a.eval_raw(m, vars)?;
                let den = b.eval_raw(m, vars)?;
                m.mul(num, m.inv(den)?)
            }
            Pow(a, e) => m.pow(a.eval_raw(m, vars)?, *e as u64),
        })
    }

    /// g(x, y, x0, y0) in F_p, or `Pole` if any denominator vanishes.
    pub fn evaluate(&self, m: PrimeModulus, x: u64, y: u64, x0: u64, y0: u64) -> MapValue {
        let vars = [x, y, x0, y0].map(|v| m.reduce(v));
        match self.eval_raw(m, vars) {
            Some(v) => MapValue::Value(m.residue(v)),
            None => MapValue::Pole,
        }
    }

    /// Degree (max of numerator and denominator total degree) after clearing
    /// denominators to a single fraction, without cancelling common factors.
    pub fn degree(&self, m: PrimeModulus) -> Result<u32> {
        Ok(Fraction::from_expr(self, m, None)?.degree())
    }

    /// Degree of g_h(x, y, y0) = g(x, y, x + h, y0), the map restricted to the
    /// shifted curve.
    pub fn shifted_degree(&self, m: PrimeModulus, h: u64) -> Result<u32> {
        Ok(Fraction::from_expr(self, m, Some(h))?.degree())
    }

    /// True iff both expressions normalize to the same rational function over F_p.
    pub fn equivalent(&self, other: &RationalMapExpr, m: PrimeModulus) -> Result<bool> {
        let a = Fraction::from_expr(self, m, None)?;
        let b = Fraction::from_expr(other, m, None)?;
        Ok(a.same_function(&b))
    }

    fn precedence(&self) -> u8 {
        use RationalMapExpr::*;
        match self {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Neg(_) | Pow(..) => 3,
            Const(_) | Var(_) => 4,
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        use RationalMapExpr::*;
        let paren = self.precedence() < min;
        if paren {
            write!(f, "(")?;
        }
        match self {
            Const(c) => write!(f, "{c}")?,
            Var(v) => write!(f, "{}", v.name())?,
            Neg(a) => {
                write!(f, "-")?;
                a.write_prec(f, 3)?;
            }
            Add(a, b) | Sub(a, b) => {
                a.write_prec(f, 1)?;
                write!(f, " {} ", if matches!(self, Add(..)) { '+' } else { '-' })?;
                b.write_prec(f, 2)?;
            }
            Mul(a, b) | Div(a, b) => {
                a.write_prec(f, 2)?;
                write!(f, " {} ", if matches!(self, Mul(..)) { '*' } else { '/' })?;
                b.write_prec(f, 3)?;
            }
            Pow(a, e) => {
                a.write_prec(f, 4)?;
                write!(f, "^{e}")?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for RationalMapExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}
