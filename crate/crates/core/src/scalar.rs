//! Scalar abstractions shared by the exact and numeric stages.
//!
//! Everything above this module is written against [`Ring`] (and [`Field`]
//! where a division is unavoidable), so the same operator code runs over
//! arbitrary-precision rationals, overflow-checked machine integers, or
//! floating point.

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Commutative ring with a cheap by-reference multiply-accumulate.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_int(n: i64) -> Self;

    fn mul_ref(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        let lhs = std::mem::replace(self, Self::zero());
        *self = lhs + rhs.clone();
    }

    fn sub_assign_ref(&mut self, rhs: &Self) {
        let lhs = std::mem::replace(self, Self::zero());
        *self = lhs - rhs.clone();
    }

    /// `self += a * b`
    fn fma_assign(&mut self, a: &Self, b: &Self) {
        let p = a.mul_ref(b);
        self.add_assign_ref(&p);
    }
}

/// A [`Ring`] in which every nonzero element is invertible.
pub trait Field: Ring + Div<Output = Self> {
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::one() / self.clone())
        }
    }
}

/// Coefficients that have a real-valued image (used for complex embedding).
pub trait RealCoeff: Ring {
    fn to_f64(&self) -> f64;
}

impl Ring for BigRational {
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn sub_assign_ref(&mut self, rhs: &Self) {
        *self -= rhs;
    }
}
impl Field for BigRational {}
impl RealCoeff for BigRational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Ring for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }
}
impl Field for f64 {}
impl RealCoeff for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Ring for f32 {
    fn from_int(n: i64) -> Self {
        n as f32
    }
}
impl Field for f32 {}
impl RealCoeff for f32 {
    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

impl Ring for Complex64 {
    fn from_int(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
}
impl Field for Complex64 {}

/// `i64` whose arithmetic panics on overflow regardless of build profile.
///
/// Exact checks never silently wrap: an overflow aborts the computation
/// instead of producing a wrong verdict.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CheckedI64(pub i64);

impl CheckedI64 {
    #[inline]
    fn expect(v: Option<i64>, op: &str) -> Self {
        match v {
            Some(v) => CheckedI64(v),
            None => panic!("integer overflow in exact arithmetic ({op})"),
        }
    }
}

impl Debug for CheckedI64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Debug::fmt(&self.0, f)
    }
}

impl Display for CheckedI64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(&self.0, f)
    }
}

impl Add for CheckedI64 {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::expect(self.0.checked_add(rhs.0), "add")
    }
}

impl Sub for CheckedI64 {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::expect(self.0.checked_sub(rhs.0), "sub")
    }
}

impl Mul for CheckedI64 {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self::expect(self.0.checked_mul(rhs.0), "mul")
    }
}

impl Div for CheckedI64 {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        Self::expect(self.0.checked_div(rhs.0), "div")
    }
}

impl Rem for CheckedI64 {
    type Output = Self;
    #[inline]
    fn rem(self, rhs: Self) -> Self {
        Self::expect(self.0.checked_rem(rhs.0), "rem")
    }
}

impl Neg for CheckedI64 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::expect(self.0.checked_neg(), "neg")
    }
}

impl Zero for CheckedI64 {
    fn zero() -> Self {
        CheckedI64(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for CheckedI64 {
    fn one() -> Self {
        CheckedI64(1)
    }
}

impl Num for CheckedI64 {
    type FromStrRadixErr = std::num::ParseIntError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        i64::from_str_radix(s, radix).map(CheckedI64)
    }
}

impl Signed for CheckedI64 {
    fn abs(&self) -> Self {
        Self::expect(self.0.checked_abs(), "abs")
    }
    fn abs_sub(&self, other: &Self) -> Self {
        if self.0 <= other.0 {
            Self::zero()
        } else {
            *self - *other
        }
    }
    fn signum(&self) -> Self {
        CheckedI64(self.0.signum())
    }
    fn is_positive(&self) -> bool {
        self.0 > 0
    }
    fn is_negative(&self) -> bool {
        self.0 < 0
    }
}

impl Integer for CheckedI64 {
    fn div_floor(&self, other: &Self) -> Self {
        let q = *self / *other;
        if (self.0 % other.0 != 0) && ((self.0 < 0) != (other.0 < 0)) {
            q - CheckedI64(1)
        } else {
            q
        }
    }
    fn mod_floor(&self, other: &Self) -> Self {
        CheckedI64(Integer::mod_floor(&self.0, &other.0))
    }
    fn gcd(&self, other: &Self) -> Self {
        CheckedI64(Integer::gcd(&self.0, &other.0))
    }
    fn lcm(&self, other: &Self) -> Self {
        if self.0 == 0 || other.0 == 0 {
            return Self::zero();
        }
        let g = Integer::gcd(&self.0, &other.0);
        (CheckedI64(self.0 / g) * *other).abs()
    }
    fn is_multiple_of(&self, other: &Self) -> bool {
        if other.0 == 0 {
            return self.0 == 0;
        }
        self.0 % other.0 == 0
    }
    fn is_even(&self) -> bool {
        self.0 % 2 == 0
    }
    fn is_odd(&self) -> bool {
        !self.is_even()
    }
    fn div_rem(&self, other: &Self) -> (Self, Self) {
        (*self / *other, *self % *other)
    }
}

impl ToPrimitive for CheckedI64 {
    fn to_i64(&self) -> Option<i64> {
        Some(self.0)
    }
    fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.0 as f64)
    }
}

impl Ring for CheckedI64 {
    fn from_int(n: i64) -> Self {
        CheckedI64(n)
    }
    #[inline]
    fn mul_ref(&self, rhs: &Self) -> Self {
        *self * *rhs
    }
    #[inline]
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self = *self + *rhs;
    }
    #[inline]
    fn sub_assign_ref(&mut self, rhs: &Self) {
        *self = *self - *rhs;
    }
}

impl RealCoeff for CheckedI64 {
    fn to_f64(&self) -> f64 {
        self.0 as f64
    }
}

/// Coefficients that embed exactly into arbitrary-precision rationals.
pub trait ExactLift: Ring {
    fn to_big(&self) -> BigRational;
}

impl ExactLift for BigRational {
    fn to_big(&self) -> BigRational {
        self.clone()
    }
}

impl ExactLift for CheckedI64 {
    fn to_big(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.0))
    }
}

impl ExactLift for CheckedRational {
    fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(self.numer().0), BigInt::from(self.denom().0))
    }
}

/// Runs `f`, turning an overflow panic from [`CheckedI64`] arithmetic into
/// an error so the caller can retry with arbitrary precision.
pub fn catch_overflow<R>(f: impl FnOnce() -> R) -> Result<R, String> {
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)) {
        Ok(r) => Ok(r),
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            if msg.contains("integer overflow") {
                Err(msg)
            } else {
                std::panic::resume_unwind(e)
            }
        }
    }
}

/// Rationals over overflow-checked 64-bit integers.
pub type CheckedRational = Ratio<CheckedI64>;

impl Ring for CheckedRational {
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(CheckedI64(n))
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self = &*self + rhs;
    }
    fn sub_assign_ref(&mut self, rhs: &Self) {
        *self = &*self - rhs;
    }
}
impl Field for CheckedRational {}
impl RealCoeff for CheckedRational {
    fn to_f64(&self) -> f64 {
        self.numer().0 as f64 / self.denom().0 as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[should_panic(expected = "integer overflow")]
    fn checked_mul_overflow_panics() {
        let _ = CheckedI64(i64::MAX) * CheckedI64(2);
    }

    #[test]
    fn checked_rational_reduces() {
        let a = CheckedRational::new(CheckedI64(6), CheckedI64(-4));
        assert_eq!(*a.numer(), CheckedI64(-3));
        assert_eq!(*a.denom(), CheckedI64(2));
        let b = a.clone() * a.try_inv().unwrap();
        assert!(b.is_one());
    }

    #[test]
    fn integer_floor_semantics_match_i64() {
        for a in -7i64..=7 {
            for b in [-3i64, -2, -1, 1, 2, 3] {
                let (x, y) = (CheckedI64(a), CheckedI64(b));
                assert_eq!(num_integer::Integer::div_floor(&x, &y).0, num_integer::Integer::div_floor(&a, &b), "{a} {b}");
                assert_eq!(x.mod_floor(&y).0, a.mod_floor(&b), "{a} {b}");
            }
        }
    }
}
