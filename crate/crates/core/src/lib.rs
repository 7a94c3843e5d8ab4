//! Point statistics on hyperelliptic curves y^2 = f(x) over prime fields:
//! x-coordinate sets with restricted y, their gap and window statistics,
//! shifted-curve counts, and the exponential sums behind their estimates.

pub mod curve;
pub mod error;
pub mod expsum;
pub mod fp;
pub mod gaps;
pub mod poly;
pub mod rational_map;
pub mod runner;
pub mod shifted;

pub use curve::{CurvePoint, HyperellipticCurve, Interval, XCoordinateSet};
pub use error::{Error, Result};
pub use fp::{PrimeModulus, Residue};
pub use poly::Polynomial;
pub use rational_map::RationalMapExpr;
