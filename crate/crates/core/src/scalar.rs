//! Scalar and ring abstractions shared by the numeric and exact paths.
//!
//! Numeric code is written against [`Real`] (implemented for `f32` and `f64`)
//! and works on `Complex<T>`. Formulas that must also run over the exact
//! Laurent-polynomial ring (catalogued vector fields, coefficient flows,
//! transfer formulas) are written against [`Ring`].

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Floating-point scalar underlying every numeric computation.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}

#[inline]
pub fn is_finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `exp(z) - 1` without cancellation for small `|z|`.
pub fn expm1<T: Real>(z: Complex<T>) -> Complex<T> {
    let (x, y) = (z.re, z.im);
    let s = (y * lit::<T>(0.5)).sin();
    let re = x.exp_m1() * y.cos() - lit::<T>(2.0) * s * s;
    let im = x.exp() * y.sin();
    Complex::new(re, im)
}

/// Integer power by repeated squaring.
pub fn powu<R: Ring>(base: &R, mut e: u32) -> R {
    let mut acc = R::one();
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b.clone();
        }
        e >>= 1;
        if e > 0 {
            b = b.clone() * b;
        }
    }
    acc
}

/// Commutative ring with exact-division semantics.
///
/// `try_div` either returns the exact quotient or fails: it is ordinary
/// complex division for `Complex<T>` and exact Laurent division for the
/// symbolic ring.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_int(n: i64) -> Self;

    fn try_div(&self, rhs: &Self) -> Result<Self>;

    fn scale(&self, n: i64) -> Self {
        self.clone() * Self::from_int(n)
    }
}

impl<T: Real> Ring for Complex<T> {
    fn from_int(n: i64) -> Self {
        Complex::new(T::from_i64(n).expect("integer representable"), T::zero())
    }

    fn try_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(*self / *rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm1_matches_exp_away_from_zero() {
        let z = c::<f64>(0.3, -1.2);
        assert!((expm1(z) - (z.exp() - Complex::one())).norm() < 1e-15);
    }

    #[test]
    fn expm1_keeps_digits_near_zero() {
        let z = c::<f64>(1e-12, 2e-12);
        assert!((expm1(z) - z).norm() < 1e-23);
    }

    #[test]
    fn powu_small_cases() {
        let z = c::<f64>(1.0, 1.0);
        assert_eq!(powu(&z, 0), Complex::one());
        assert!((powu(&z, 4) - c(-4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn complex_try_div_rejects_zero() {
        let z = c::<f64>(1.0, 0.0);
        assert!(matches!(z.try_div(&Complex::zero()), Err(Error::DivisionByZero)));
    }
}
