//! Numeric abstractions shared by the analytic parts of the crate.
//!
//! Anything that only needs field arithmetic (the transmission probability,
//! generating-function moments, reproductive numbers, Beta moment matching,
//! total variation) is written against [`Scalar`], so it runs on `f32`, `f64`
//! or an exact rational type. Code that needs square roots or exponentials
//! asks for [`Real`] instead.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, Num};

/// Field-like number type: `f32`, `f64`, or `num_rational::Ratio<i128>`.
pub trait Scalar:
    Num + Copy + PartialOrd + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts a count. Panics only if the count does not fit the type.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable in scalar type")
    }

    /// Converts an `f64` literal (tolerances, thresholds).
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in scalar type")
    }

    fn abs_diff(self, other: Self) -> Self {
        if self >= other {
            self - other
        } else {
            other - self
        }
    }

    fn in_unit_interval(self) -> bool {
        self >= Self::zero() && self <= Self::one()
    }
}

impl<T> Scalar for T where
    T: Num + Copy + PartialOrd + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Floating-point scalar.
pub trait Real: Scalar + Float {}

impl<T: Scalar + Float> Real for T {}
