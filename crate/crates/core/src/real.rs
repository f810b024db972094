//! Scalar abstraction shared by the `f64` and double-double code paths.

use crate::dd::Dd;
use num_traits::Num;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Real scalar with the elementary functions the special-function and field
/// code needs. Implemented for `f64` and [`Dd`].
pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Num
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
{
    /// Unit roundoff.
    const EPS: f64;
    /// Arguments at or above this use the Hankel asymptotic expansion for orders 0 and 1.
    const ASYMPTOTIC_FROM: f64;
    /// Miller recurrence start cushion: `constant + slope * x^(1/3)` indices past the turning point.
    const MILLER_CUSHION: (f64, f64);

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn abs(self) -> Self;
    fn mul_pow2(self, p: f64) -> Self;
    fn pi() -> Self;
    fn frac_pi_4() -> Self;
    fn euler_gamma() -> Self;
}

impl Real for f64 {
    const EPS: f64 = f64::EPSILON / 2.0;
    const ASYMPTOTIC_FROM: f64 = 25.0;
    const MILLER_CUSHION: (f64, f64) = (20.0, 8.0);

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn mul_pow2(self, p: f64) -> Self {
        self * p
    }
    #[inline]
    fn pi() -> Self {
        std::f64::consts::PI
    }
    #[inline]
    fn frac_pi_4() -> Self {
        std::f64::consts::FRAC_PI_4
    }
    #[inline]
    fn euler_gamma() -> Self {
        0.577_215_664_901_532_9
    }
}

impl Real for Dd {
    const EPS: f64 = Dd::EPSILON;
    const ASYMPTOTIC_FROM: f64 = 45.0;
    const MILLER_CUSHION: (f64, f64) = (32.0, 14.0);

    #[inline]
    fn from_f64(x: f64) -> Self {
        Dd::from_f64(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        Dd::sqrt(self)
    }
    #[inline]
    fn exp(self) -> Self {
        Dd::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        Dd::ln(self)
    }
    #[inline]
    fn sin_cos(self) -> (Self, Self) {
        Dd::sin_cos(self)
    }
    #[inline]
    fn abs(self) -> Self {
        Dd::abs(self)
    }
    #[inline]
    fn mul_pow2(self, p: f64) -> Self {
        Dd::mul_pow2(self, p)
    }
    #[inline]
    fn pi() -> Self {
        Dd::PI
    }
    #[inline]
    fn frac_pi_4() -> Self {
        Dd::FRAC_PI_4
    }
    #[inline]
    fn euler_gamma() -> Self {
        Dd::EULER_GAMMA
    }
}
