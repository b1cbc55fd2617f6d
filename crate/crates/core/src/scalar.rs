//! Scalar abstraction shared by the exact and floating-point code paths.
//!
//! Everything that only needs field arithmetic plus `floor` (the Gauss map,
//! convergent checks, Taylor jets) is written against [`Scalar`], so it runs
//! unchanged on `f32`, `f64` and exact `BigRational`. Code that needs
//! transcendental functions or a notion of machine precision uses
//! [`FloatScalar`] instead.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync
{
    /// Largest integer not greater than `self`.
    fn floor(&self) -> Self;

    /// Exact (or correctly rounded) conversion from an arbitrary-size integer.
    fn from_bigint(value: &BigInt) -> Self;

    fn from_int(value: i64) -> Self {
        <Self as FromPrimitive>::from_i64(value).expect("i64 is representable")
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    /// `false` only for NaN or infinite floats.
    fn is_finite_value(&self) -> bool {
        true
    }

    /// Lossy view used for diagnostics and reporting.
    fn approx_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_float_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            #[inline]
            fn floor(&self) -> Self {
                Float::floor(*self)
            }

            fn from_bigint(value: &BigInt) -> Self {
                value.to_f64().map(|v| v as $t).unwrap_or(<$t>::NAN)
            }

            #[inline]
            fn from_int(value: i64) -> Self {
                value as $t
            }

            #[inline]
            fn half() -> Self {
                0.5
            }

            #[inline]
            fn is_finite_value(&self) -> bool {
                Float::is_finite(*self)
            }
        }

        impl FloatScalar for $t {}
    )*};
}

impl_float_scalar!(f32, f64);

impl Scalar for BigRational {
    fn floor(&self) -> Self {
        BigRational::floor(self)
    }

    fn from_bigint(value: &BigInt) -> Self {
        BigRational::from_integer(value.clone())
    }

    fn from_int(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }
}

/// Hardware floats: `f32` and `f64`.
pub trait FloatScalar: Scalar + Float {
    /// Converts an `f64` constant into this type.
    #[inline]
    fn lit(value: f64) -> Self {
        <Self as num_traits::NumCast>::from(value).expect("finite f64 constant")
    }
}

/// Exact rational with the same value as a finite float.
pub fn exact_rational(value: f64) -> Option<BigRational> {
    BigRational::from_float(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_agrees_across_scalars() {
        for &x in &[-2.5f64, -0.5, -0.0, 0.25, 0.5, 1.0, 3.75] {
            let exact = exact_rational(x).unwrap();
            let f = Scalar::floor(&x);
            assert_eq!(Scalar::floor(&exact), exact_rational(f).unwrap(), "x = {x}");
            assert_eq!(Scalar::floor(&(x as f32)) as f64, f);
        }
    }

    #[test]
    fn half_is_exact() {
        assert_eq!(<f64 as Scalar>::half(), 0.5);
        assert_eq!(
            <BigRational as Scalar>::half(),
            BigRational::new(1.into(), 2.into())
        );
    }

    #[test]
    fn non_finite_floats_are_flagged() {
        assert!(!f64::NAN.is_finite_value());
        assert!(!f32::INFINITY.is_finite_value());
        assert!(1.0f64.is_finite_value());
    }
}
