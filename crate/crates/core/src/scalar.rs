//! Scalar abstraction shared by the closed-form engine.
//!
//! Every formula in [`crate::exact`] is a finite sum of products of small
//! integer ratios, so any numeric type with field operations and a way to
//! lift integers works. [`crate::Rational`] gives exact answers; `f64` and
//! `f32` give fast approximations of the same expressions.

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num};

pub trait Scalar: Num + Clone + PartialOrd + Debug + FromPrimitive + Send + Sync + 'static {
    /// Lifts a non-negative integer.
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("scalar type cannot represent an integer count")
    }

    /// `num / den` built from integers.
    fn ratio(num: u64, den: u64) -> Self {
        Self::from_count(num) / Self::from_count(den)
    }

    fn recip_count(den: u64) -> Self {
        Self::one() / Self::from_count(den)
    }
}

impl<T> Scalar for T where T: Num + Clone + PartialOrd + Debug + FromPrimitive + Send + Sync + 'static {}
