//! Coefficient rings for truncated series: exact rationals and `f64`.

use std::fmt::Debug;
use std::ops::{AddAssign, Neg, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational coefficients (arbitrary precision, always in lowest terms).
pub type Q = BigRational;

/// Operations the series code needs from its coefficient ring.
pub trait Coefficient:
    Clone + Debug + PartialEq + Send + Sync + Zero + One + Neg<Output = Self> + 'static
where
    Self: for<'a> AddAssign<&'a Self> + for<'a> SubAssign<&'a Self>,
{
    fn from_q(q: &Q) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    /// Absolute value as a float, used for residuals.
    fn magnitude(&self) -> f64;
}

impl Coefficient for Q {
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

impl Coefficient for f64 {
    fn from_q(q: &Q) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}
