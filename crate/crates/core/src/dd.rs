//! Double-double arithmetic.
//!
//! A [`Dd`] is an unevaluated sum `hi + lo` of two `f64` with `|lo| <= ulp(hi)/2`,
//! giving roughly 32 significant decimal digits. The basic operations use the
//! classic error-free transformations (two-sum, fused-multiply-add two-product);
//! the transcendental functions use argument reduction followed by Taylor series.
//!
//! The enclosure indicator is a boundary integral whose value is many orders of
//! magnitude smaller than its integrand, so the measurement traces and the
//! quadrature that consumes them are carried in this type.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

/// Double-double real number.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

#[allow(clippy::approx_constant)] // high parts of double-double constants
impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd { hi: 3.141592653589793, lo: 1.2246467991473532e-16 };
    pub const TWO_PI: Dd = Dd { hi: 6.283185307179586, lo: 2.4492935982947064e-16 };
    pub const FRAC_PI_2: Dd = Dd { hi: 1.5707963267948966, lo: 6.123233995736766e-17 };
    pub const FRAC_PI_4: Dd = Dd { hi: 0.7853981633974483, lo: 3.061616997868383e-17 };
    pub const FRAC_2_PI: Dd = Dd { hi: 0.6366197723675814, lo: -3.935735335036497e-17 };
    pub const LN_2: Dd = Dd { hi: 0.6931471805599453, lo: 2.3190468138462996e-17 };
    pub const EULER_GAMMA: Dd = Dd { hi: 0.5772156649015329, lo: -4.942915152430645e-18 };
    /// 2^-104, the unit roundoff of the format.
    pub const EPSILON: f64 = 4.930380657631324e-32;

    /// Builds a normalized value from two words.
    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (h, l) = two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    /// Multiplication by an exact power of two.
    #[inline]
    pub fn mul_pow2(self, p: f64) -> Self {
        Dd { hi: self.hi * p, lo: self.lo * p }
    }

    #[inline]
    pub fn sqr(self) -> Self {
        let (p1, mut p2) = two_prod(self.hi, self.hi);
        p2 += 2.0 * self.hi * self.lo;
        p2 += self.lo * self.lo;
        let (h, l) = quick_two_sum(p1, p2);
        Dd { hi: h, lo: l }
    }

    #[inline]
    pub fn recip(self) -> Self {
        Dd::ONE / self
    }

    /// Nearest integer (ties away from zero).
    pub fn round(self) -> Self {
        let hi = self.hi.round();
        if hi == self.hi {
            let lo = self.lo.round();
            let (h, l) = quick_two_sum(hi, lo);
            Dd { hi: h, lo: l }
        } else if (hi - self.hi).abs() == 0.5 && self.lo != 0.0 {
            // exact half in hi, lo decides the direction
            let hi = if self.lo > 0.0 { self.hi.ceil() } else { self.hi.floor() };
            Dd { hi, lo: 0.0 }
        } else {
            Dd { hi, lo: 0.0 }
        }
    }

    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            let lo = self.lo.floor();
            let (h, l) = quick_two_sum(hi, lo);
            Dd { hi: h, lo: l }
        } else {
            Dd { hi, lo: 0.0 }
        }
    }

    pub fn trunc(self) -> Self {
        if self.hi >= 0.0 {
            self.floor()
        } else {
            -((-self).floor())
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        if self.hi < 0.0 {
            return Dd::from_f64(f64::NAN);
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let corr = (self - Dd::from_f64(ax).sqr()).hi * (x * 0.5);
        Dd::from_f64(ax) + corr
    }

    pub fn exp(self) -> Self {
        const INV_K: f64 = 1.0 / 512.0;
        if self.hi > 709.8 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Dd::ZERO;
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ONE;
        }
        let m = (self.hi / Dd::LN_2.hi + 0.5).floor();
        let r = (self - Dd::LN_2 * m).mul_pow2(INV_K);
        // expm1 of the reduced argument by Taylor series
        let mut p = r.sqr();
        let mut s = r + p.mul_pow2(0.5);
        let mut i = 2.0;
        let thresh = INV_K * Dd::EPSILON;
        loop {
            i += 1.0;
            p *= r;
            let t = p / inv_factorial_denominator(i);
            s += t;
            if t.hi.abs() <= thresh || i >= 30.0 {
                break;
            }
        }
        // undo the 2^-9 scaling: expm1(2x) = expm1(x) * (expm1(x) + 2)
        for _ in 0..9 {
            s = s.mul_pow2(2.0) + s.sqr();
        }
        let e = s + 1.0;
        // 2^m in two steps to keep intermediate values finite
        let half = (m / 2.0).trunc();
        e.mul_pow2(2f64.powi(half as i32)).mul_pow2(2f64.powi((m - half) as i32))
    }

    /// Natural logarithm (one Newton step on `exp` from the `f64` estimate).
    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::from_f64(f64::NAN);
        }
        if self.hi == 1.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        let x = Dd::from_f64(self.hi.ln());
        x + self * (-x).exp() - 1.0
    }

    /// Simultaneous sine and cosine.
    pub fn sin_cos(self) -> (Self, Self) {
        if self.hi == 0.0 && self.lo == 0.0 {
            return (Dd::ZERO, Dd::ONE);
        }
        // reduce modulo 2pi, then modulo pi/2
        let z = (self / Dd::TWO_PI).round();
        let r = self - Dd::TWO_PI * z;
        let q = (r.hi / Dd::FRAC_PI_2.hi).round();
        let t = r - Dd::FRAC_PI_2 * q;
        let (s, c) = sin_cos_taylor(t);
        match (q as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn sin(self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(self) -> Self {
        self.sin_cos().1
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { self.recip() } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base.sqr();
            e >>= 1;
        }
        acc
    }
}

/// `i!` as an exact `f64` (exact up to 22!).
#[inline]
fn inv_factorial_denominator(i: f64) -> f64 {
    let mut f = 1.0;
    let mut j = 2.0;
    while j <= i {
        f *= j;
        j += 1.0;
    }
    f
}

/// Taylor series for |t| <= pi/4.
fn sin_cos_taylor(t: Dd) -> (Dd, Dd) {
    let x2 = t.sqr();
    // sine: t - t^3/3! + ...
    let mut term = t;
    let mut sin = t;
    let mut n = 1.0;
    loop {
        term = -(term * x2) / ((n + 1.0) * (n + 2.0));
        n += 2.0;
        sin += term;
        if term.hi.abs() <= Dd::EPSILON * sin.hi.abs().max(1e-300) || n > 60.0 {
            break;
        }
    }
    let mut term = Dd::ONE;
    let mut cos = Dd::ONE;
    let mut n = 0.0;
    loop {
        term = -(term * x2) / ((n + 1.0) * (n + 2.0));
        n += 2.0;
        cos += term;
        if term.hi.abs() <= Dd::EPSILON * 0.5 || n > 60.0 {
            break;
        }
    }
    (sin, cos)
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

impl From<f64> for Dd {
    #[inline]
    fn from(x: f64) -> Self {
        Dd::from_f64(x)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            o => Some(o),
        }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, b);
        let s2 = s2 + self.lo;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: f64) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let p2 = p2 + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, b);
        let p2 = p2 + self.lo * b;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }
}

impl Mul<Dd> for f64 {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        b * self
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd { hi: q1, lo: q2 } + q3
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let (p1, p2) = two_prod(q1, b);
        let (s, e) = two_sum(self.hi, -p1);
        let e = e + self.lo - p2;
        let q2 = (s + e) / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, b: Dd) -> Dd {
        self - b * (self / b).trunc()
    }
}

impl AddAssign for Dd {
    #[inline]
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}

impl SubAssign for Dd {
    #[inline]
    fn sub_assign(&mut self, b: Dd) {
        *self = *self - b;
    }
}

impl MulAssign for Dd {
    #[inline]
    fn mul_assign(&mut self, b: Dd) {
        *self = *self * b;
    }
}

impl DivAssign for Dd {
    #[inline]
    fn div_assign(&mut self, b: Dd) {
        *self = *self / b;
    }
}

impl num_traits::Zero for Dd {
    fn zero() -> Self {
        Dd::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl num_traits::One for Dd {
    fn one() -> Self {
        Dd::ONE
    }
}

impl num_traits::Num for Dd {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        s.parse::<f64>().map(Dd::from_f64)
    }
}
