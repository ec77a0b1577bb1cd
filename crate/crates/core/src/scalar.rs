//! The exact scalar field every coordinate lives in.
//!
//! Geometry here is decided by equality tests (two cells match iff their
//! footprints coincide), so only exact ordered fields qualify. Floating point
//! types are deliberately not implementors.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact, totally ordered field usable as a coordinate type.
pub trait Scalar:
    num_traits::Num + Signed + Clone + Ord + Hash + Debug + Display + Send + Sync + 'static
{
    /// Lossless conversion to an arbitrary-precision rational.
    fn to_big(&self) -> BigRational;

    /// Conversion back; `None` if the value does not fit.
    fn from_big(value: &BigRational) -> Option<Self>;

    fn from_int(n: i64) -> Self {
        Self::from_big(&BigRational::from_integer(BigInt::from(n)))
            .expect("small integers fit in every scalar type")
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    /// Approximate value, for rendering only.
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(&self.to_big()).unwrap_or(f64::NAN)
    }

    /// Parse `"p/q"` or `"p"`.
    fn parse(text: &str) -> Option<Self> {
        let big: BigRational = text.trim().parse().ok()?;
        Self::from_big(&big)
    }
}

impl Scalar for BigRational {
    fn to_big(&self) -> BigRational {
        self.clone()
    }

    fn from_big(value: &BigRational) -> Option<Self> {
        Some(value.clone())
    }
}

macro_rules! machine_ratio {
    ($int:ty) => {
        impl Scalar for Ratio<$int> {
            fn to_big(&self) -> BigRational {
                BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
            }

            fn from_big(value: &BigRational) -> Option<Self> {
                let n = value.numer().to_i128()?;
                let d = value.denom().to_i128()?;
                Some(Ratio::new(
                    <$int>::try_from(n).ok()?,
                    <$int>::try_from(d).ok()?,
                ))
            }
        }
    };
}

machine_ratio!(i64);
machine_ratio!(i128);

/// Rational bounds `lo <= sqrt(x) <= hi` with `hi - lo <= 2^-bits`.
pub fn sqrt_bounds(x: &BigRational, bits: u32) -> (BigRational, BigRational) {
    assert!(!x.is_negative(), "square root of a negative value");
    if x.is_zero() {
        return (BigRational::zero(), BigRational::zero());
    }
    let scale = BigInt::one() << (2 * bits as usize);
    let scaled = (x.numer() * &scale) / x.denom();
    let root = scaled.sqrt();
    let denom = BigInt::one() << bits as usize;
    let lo = BigRational::new(root.clone(), denom.clone());
    let exact = &root * &root == scaled && (x.numer() * &scale) % x.denom() == BigInt::zero();
    let hi = if exact {
        lo.clone()
    } else {
        BigRational::new(root + 1, denom)
    };
    (lo, hi)
}

/// Exact square root when `x` is the square of a rational.
pub fn exact_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer();
    let d = x.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(BigRational::new(rn, rd))
    } else {
        None
    }
}
