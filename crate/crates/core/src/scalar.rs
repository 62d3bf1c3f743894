//! Arithmetic modes.
//!
//! Distributions carry either exact rationals or 64-bit floats. The mode is
//! fixed by the type parameter, so the two never mix silently.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num::traits::{Signed, ToPrimitive};
use num::{BigInt, BigRational, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

/// Absolute tolerance on the total mass of a float distribution.
pub const FLOAT_NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rational,
    Float,
}

impl Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Rational => f.write_str("rational"),
            Mode::Float => f.write_str("float"),
        }
    }
}

pub trait Scalar: Clone + Debug + Display + PartialOrd + Signed + Sum + Send + Sync + 'static {
    const MODE: Mode;

    fn from_rational(r: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// Slack allowed when checking that a total equals one.
    fn normalization_tol() -> Self;

    /// Slack allowed when deciding that a residual is zero.
    fn zero_tol() -> Self;

    fn from_int(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }

    fn is_negligible(&self) -> bool {
        self.abs() <= Self::zero_tol()
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Rational;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn normalization_tol() -> Self {
        Rational::zero()
    }

    fn zero_tol() -> Self {
        Rational::zero()
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn normalization_tol() -> Self {
        FLOAT_NORMALIZATION_TOL
    }

    fn zero_tol() -> Self {
        FLOAT_NORMALIZATION_TOL
    }
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Checks `|total - 1| <= tol` for the mode's tolerance.
pub fn is_unit_total<T: Scalar>(total: &T) -> bool {
    (total.clone() - T::one()).abs() <= T::normalization_tol()
}
