//! Exact arithmetic in ℚ(ω), ω a primitive N-th root of unity.
//!
//! Elements are stored as coefficient vectors reduced modulo the cyclotomic
//! polynomial Φ_N, never modulo x^N − 1, so that equality and zero tests are
//! canonical. The root order is a const parameter; mixing elements of
//! different fields is a type error.

use std::fmt::{self, Display};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ArithError;
use crate::scalar::{CheckedI64, CheckedRational, Field, RealCoeff, Ring};

/// Largest root order supported by [`Cyclotomic`].
pub const MAX_ORDER: usize = 64;

const BUF: usize = 512;

/// Euler's totient.
pub const fn euler_phi(n: usize) -> usize {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

const fn mobius(n: usize) -> i32 {
    let mut m = n;
    let mut p = 2;
    let mut sign = 1;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

/// Coefficients of Φ_n, low degree first, padded to `MAX_ORDER + 1`.
///
/// Evaluated at compile time through Φ_n = ∏_{d|n} (x^d − 1)^{μ(n/d)}.
const fn modulus_table(n: usize) -> [i64; MAX_ORDER + 1] {
    let mut p = [0i64; BUF];
    p[0] = 1;
    let mut deg = 0;
    // numerator factors
    let mut d = 1;
    while d <= n {
        if n % d == 0 && mobius(n / d) == 1 {
            let mut i = deg + d;
            loop {
                let shifted = if i >= d { p[i - d] } else { 0 };
                p[i] = shifted - p[i];
                if i == 0 {
                    break;
                }
                i -= 1;
            }
            deg += d;
        }
        d += 1;
    }
    // exact division by the remaining factors
    let mut d = 1;
    while d <= n {
        if n % d == 0 && mobius(n / d) == -1 {
            let mut i = 0;
            while i <= deg - d {
                let prev = if i >= d { p[i - d] } else { 0 };
                p[i] = prev - p[i];
                i += 1;
            }
            let mut j = deg - d + 1;
            while j <= deg {
                p[j] = 0;
                j += 1;
            }
            deg -= d;
        }
        d += 1;
    }
    let mut out = [0i64; MAX_ORDER + 1];
    let mut k = 0;
    while k <= deg {
        out[k] = p[k];
        k += 1;
    }
    out
}

/// Φ_n by recursive exact division of x^n − 1 by Φ_d for proper divisors d.
///
/// Coefficients are returned low degree first.
pub fn cyclotomic_polynomial(n: usize) -> Result<Vec<i64>, ArithError> {
    if n < 1 {
        return Err(ArithError::UnsupportedOrder(n));
    }
    let mut num = vec![0i64; n + 1];
    num[0] = -1;
    num[n] = 1;
    for d in 1..n {
        if n % d == 0 {
            let den = cyclotomic_polynomial(d)?;
            num = exact_int_div(&num, &den);
        }
    }
    Ok(num)
}

/// Exact quotient of integer polynomials with monic divisor.
fn exact_int_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    debug_assert_eq!(den[dn], 1);
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut q = vec![0i64; qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dn];
        q[k] = c;
        for (i, &d) in den.iter().enumerate() {
            rem[k + i] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "inexact cyclotomic division");
    q
}

/// Runtime description of ℚ(ω) for a given root order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycloContext {
    pub n: usize,
    pub phi: usize,
    pub modulus_coeffs: Vec<i64>,
}

impl CycloContext {
    pub fn new(n: usize) -> Result<Self, ArithError> {
        if !(2..=MAX_ORDER).contains(&n) {
            return Err(ArithError::UnsupportedOrder(n));
        }
        let modulus_coeffs = cyclotomic_polynomial(n)?;
        Ok(CycloContext {
            n,
            phi: modulus_coeffs.len() - 1,
            modulus_coeffs,
        })
    }
}

/// Element Σ_k c_k ω^k of ℚ(ω) (or ℤ[ω], depending on `T`), ω^N = 1.
///
/// Only the first φ(N) coefficients are ever nonzero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic<T, const N: usize> {
    coeffs: [T; N],
}

impl<T: Ring, const N: usize> Cyclotomic<T, N> {
    /// Degree of the field over ℚ.
    pub const PHI: usize = {
        assert!(N >= 2 && N <= MAX_ORDER, "unsupported root order");
        euler_phi(N)
    };
    const MODULUS: [i64; MAX_ORDER + 1] = modulus_table(N);

    pub fn context() -> CycloContext {
        CycloContext {
            n: N,
            phi: Self::PHI,
            modulus_coeffs: Self::MODULUS[..=Self::PHI].to_vec(),
        }
    }

    /// Builds an element from arbitrary powers of ω, reducing as needed.
    pub fn from_coeffs<I: IntoIterator<Item = T>>(coeffs: I) -> Self {
        let mut buf: [T; N] = std::array::from_fn(|_| T::zero());
        for (k, c) in coeffs.into_iter().enumerate() {
            buf[k % N].add_assign_ref(&c);
        }
        Self::reduce(buf)
    }

    pub fn from_scalar(c: T) -> Self {
        let mut buf: [T; N] = std::array::from_fn(|_| T::zero());
        buf[0] = c;
        Cyclotomic { coeffs: buf }
    }

    /// ω^k for any integer k.
    pub fn omega_pow(k: i64) -> Self {
        let mut buf: [T; N] = std::array::from_fn(|_| T::zero());
        buf[k.rem_euclid(N as i64) as usize] = T::one();
        Self::reduce(buf)
    }

    pub fn omega() -> Self {
        Self::omega_pow(1)
    }

    /// The φ(N) canonical coefficients.
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs[..Self::PHI]
    }

    pub fn scale(&self, c: &T) -> Self {
        Cyclotomic {
            coeffs: std::array::from_fn(|k| self.coeffs[k].mul_ref(c)),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    /// Maps the coefficients into another ring (e.g. ℤ → ℚ).
    pub fn map_coeffs<U: Ring>(&self, f: impl Fn(&T) -> U) -> Cyclotomic<U, N> {
        Cyclotomic {
            coeffs: std::array::from_fn(|k| f(&self.coeffs[k])),
        }
    }

    /// Reduces a length-N cyclic buffer modulo Φ_N.
    fn reduce(mut buf: [T; N]) -> Self {
        let phi = Self::PHI;
        for k in (phi..N).rev() {
            let c = std::mem::replace(&mut buf[k], T::zero());
            if c.is_zero() {
                continue;
            }
            for i in 0..phi {
                match Self::MODULUS[i] {
                    0 => {}
                    1 => buf[k - phi + i].sub_assign_ref(&c),
                    -1 => buf[k - phi + i].add_assign_ref(&c),
                    m => {
                        let t = c.mul_ref(&T::from_int(m));
                        buf[k - phi + i].sub_assign_ref(&t);
                    }
                }
            }
        }
        Cyclotomic { coeffs: buf }
    }
}

impl<T: Field, const N: usize> Cyclotomic<T, N> {
    /// Multiplicative inverse via the extended Euclidean algorithm against Φ_N.
    pub fn inverse(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::ZeroInverse);
        }
        let modulus: Vec<T> = Self::MODULUS[..=Self::PHI]
            .iter()
            .map(|&c| T::from_int(c))
            .collect();
        let a = trim(self.coeffs().to_vec());
        let (mut r0, mut r1) = (modulus, a);
        let (mut s0, mut s1) = (Vec::<T>::new(), vec![T::one()]);
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant because Φ_N is irreducible
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].try_inv().ok_or(ArithError::ZeroInverse)?;
        let out = Self::from_coeffs(s0.into_iter().map(|x| x.mul_ref(&c)));
        debug_assert!((out.mul_ref(self)).is_one());
        Ok(out)
    }
}

impl<T: RealCoeff, const N: usize> Cyclotomic<T, N> {
    /// Image under ω ↦ exp(2πi/N).
    pub fn to_complex(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc += Complex64::from_polar(c.to_f64(), 2.0 * std::f64::consts::PI * k as f64 / N as f64);
        }
        acc
    }
}

fn trim<T: Ring>(mut v: Vec<T>) -> Vec<T> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn poly_mul<T: Ring>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j].fma_assign(x, y);
        }
    }
    trim(out)
}

fn poly_sub<T: Ring>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i].add_assign_ref(x);
    }
    for (i, y) in b.iter().enumerate() {
        out[i].sub_assign_ref(y);
    }
    trim(out)
}

fn poly_divrem<T: Field>(a: &[T], b: &[T]) -> (Vec<T>, Vec<T>) {
    let mut rem = a.to_vec();
    if a.len() < b.len() {
        return (Vec::new(), trim(rem));
    }
    let lead_inv = b.last().unwrap().try_inv().expect("nonzero leading coefficient");
    let mut q = vec![T::zero(); a.len() - b.len() + 1];
    for k in (0..q.len()).rev() {
        let c = rem[k + b.len() - 1].mul_ref(&lead_inv);
        if c.is_zero() {
            continue;
        }
        for (i, y) in b.iter().enumerate() {
            let t = c.mul_ref(y);
            rem[k + i].sub_assign_ref(&t);
        }
        q[k] = c;
    }
    rem.truncate(b.len() - 1);
    (trim(q), trim(rem))
}

impl<T: Ring, const N: usize> Zero for Cyclotomic<T, N> {
    fn zero() -> Self {
        Cyclotomic {
            coeffs: std::array::from_fn(|_| T::zero()),
        }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl<T: Ring, const N: usize> One for Cyclotomic<T, N> {
    fn one() -> Self {
        Self::from_scalar(T::one())
    }
}

impl<T: Ring, const N: usize> Add for Cyclotomic<T, N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.add_assign_ref(&rhs);
        self
    }
}

impl<T: Ring, const N: usize> Sub for Cyclotomic<T, N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.sub_assign_ref(&rhs);
        self
    }
}

impl<T: Ring, const N: usize> Mul for Cyclotomic<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl<'a, T: Ring, const N: usize> Add<&'a Cyclotomic<T, N>> for &'a Cyclotomic<T, N> {
    type Output = Cyclotomic<T, N>;
    fn add(self, rhs: Self) -> Cyclotomic<T, N> {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<'a, T: Ring, const N: usize> Sub<&'a Cyclotomic<T, N>> for &'a Cyclotomic<T, N> {
    type Output = Cyclotomic<T, N>;
    fn sub(self, rhs: Self) -> Cyclotomic<T, N> {
        let mut out = self.clone();
        out.sub_assign_ref(rhs);
        out
    }
}

impl<'a, T: Ring, const N: usize> Mul<&'a Cyclotomic<T, N>> for &'a Cyclotomic<T, N> {
    type Output = Cyclotomic<T, N>;
    fn mul(self, rhs: Self) -> Cyclotomic<T, N> {
        self.mul_ref(rhs)
    }
}

impl<T: Ring, const N: usize> AddAssign for Cyclotomic<T, N> {
    fn add_assign(&mut self, rhs: Self) {
        self.add_assign_ref(&rhs);
    }
}

impl<T: Ring, const N: usize> SubAssign for Cyclotomic<T, N> {
    fn sub_assign(&mut self, rhs: Self) {
        self.sub_assign_ref(&rhs);
    }
}

impl<T: Ring, const N: usize> Neg for Cyclotomic<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        Cyclotomic {
            coeffs: self.coeffs.map(|c| -c),
        }
    }
}

impl<T: Field, const N: usize> Div for Cyclotomic<T, N> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let inv = rhs.inverse().expect("division by zero in cyclotomic field");
        self.mul_ref(&inv)
    }
}

impl<T: Ring, const N: usize> Ring for Cyclotomic<T, N> {
    fn from_int(n: i64) -> Self {
        Self::from_scalar(T::from_int(n))
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        let phi = Self::PHI;
        let mut buf: [T; N] = std::array::from_fn(|_| T::zero());
        for i in 0..phi {
            let a = &self.coeffs[i];
            if a.is_zero() {
                continue;
            }
            for j in 0..phi {
                let b = &rhs.coeffs[j];
                if b.is_zero() {
                    continue;
                }
                let k = (i + j) % N;
                buf[k].fma_assign(a, b);
            }
        }
        Self::reduce(buf)
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        for k in 0..Self::PHI {
            self.coeffs[k].add_assign_ref(&rhs.coeffs[k]);
        }
    }

    fn sub_assign_ref(&mut self, rhs: &Self) {
        for k in 0..Self::PHI {
            self.coeffs[k].sub_assign_ref(&rhs.coeffs[k]);
        }
    }
}

impl<T: Field, const N: usize> Field for Cyclotomic<T, N> {
    fn try_inv(&self) -> Option<Self> {
        self.inverse().ok()
    }
}

impl<T: Ring + Display, const N: usize> Display for Cyclotomic<T, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})ω")?,
                _ => write!(f, "({c})ω^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<T: Ring, const N: usize> fmt::Debug for Cyclotomic<T, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclotomic<{N}>{:?}", self.coeffs())
    }
}

/// `[n] = 1 + ω + … + ω^{n−1} = (1 − ω^n)/(1 − ω)`.
pub fn q_integer<T: Ring, const N: usize>(n: usize) -> Cyclotomic<T, N> {
    Cyclotomic::from_coeffs((0..n).map(|_| T::one()))
}

/// `[n]! = [n][n−1]⋯[1]`, with `[0]! = 1`. Vanishes for n ≥ N.
pub fn q_factorial<T: Ring, const N: usize>(n: usize) -> Cyclotomic<T, N> {
    (1..=n).fold(Cyclotomic::one(), |acc, k| acc.mul_ref(&q_integer(k)))
}

/// Text form of a rational coefficient: `"num/den"`.
pub trait CoeffText: Ring {
    fn to_text(&self) -> String;
    fn parse_text(s: &str) -> Result<Self, ArithError>;
}

fn split_fraction(s: &str) -> (&str, &str) {
    match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    }
}

impl CoeffText for BigRational {
    fn to_text(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
    fn parse_text(s: &str) -> Result<Self, ArithError> {
        let (n, d) = split_fraction(s);
        let n = BigInt::from_str(n).map_err(|_| ArithError::Parse(s.to_string()))?;
        let d = BigInt::from_str(d).map_err(|_| ArithError::Parse(s.to_string()))?;
        if d.is_zero() {
            return Err(ArithError::Parse(s.to_string()));
        }
        Ok(BigRational::new(n, d))
    }
}

impl CoeffText for CheckedRational {
    fn to_text(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
    fn parse_text(s: &str) -> Result<Self, ArithError> {
        let (n, d) = split_fraction(s);
        let n: i64 = n.parse().map_err(|_| ArithError::Parse(s.to_string()))?;
        let d: i64 = d.parse().map_err(|_| ArithError::Parse(s.to_string()))?;
        if d == 0 {
            return Err(ArithError::Parse(s.to_string()));
        }
        Ok(CheckedRational::new(CheckedI64(n), CheckedI64(d)))
    }
}

impl CoeffText for CheckedI64 {
    fn to_text(&self) -> String {
        format!("{}/1", self.0)
    }
    fn parse_text(s: &str) -> Result<Self, ArithError> {
        let (n, d) = split_fraction(s);
        if d != "1" {
            return Err(ArithError::Parse(s.to_string()));
        }
        n.parse().map(CheckedI64).map_err(|_| ArithError::Parse(s.to_string()))
    }
}

impl<T: CoeffText, const N: usize> Cyclotomic<T, N> {
    /// φ(N) strings of the form `"num/den"`.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs().iter().map(CoeffText::to_text).collect()
    }

    pub fn from_strings<S: AsRef<str>>(items: &[S]) -> Result<Self, ArithError> {
        if items.len() != Self::PHI {
            return Err(ArithError::LengthMismatch {
                expected: Self::PHI,
                found: items.len(),
            });
        }
        let coeffs = items
            .iter()
            .map(|s| T::parse_text(s.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_coeffs(coeffs))
    }
}

impl<T: CoeffText, const N: usize> Serialize for Cyclotomic<T, N> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(serializer)
    }
}

impl<'de, T: CoeffText, const N: usize> Deserialize<'de> for Cyclotomic<T, N> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(deserializer)?;
        Self::from_strings(&items).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Cyclo;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cyclotomic_polynomials_small() {
        assert_eq!(cyclotomic_polynomial(3).unwrap(), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4).unwrap(), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6).unwrap(), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12).unwrap(), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn const_table_matches_recursive_division() {
        for n in 2..=MAX_ORDER {
            let rec = cyclotomic_polynomial(n).unwrap();
            let table = modulus_table(n);
            assert_eq!(rec.len() - 1, euler_phi(n), "degree of Φ_{n}");
            assert_eq!(&table[..rec.len()], &rec[..], "Φ_{n}");
            assert!(table[rec.len()..].iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn modulus_divides_x_n_minus_one() {
        for n in 2..=30 {
            let phi = cyclotomic_polynomial(n).unwrap();
            let mut num = vec![0i64; n + 1];
            num[0] = -1;
            num[n] = 1;
            // exact_int_div asserts a zero remainder in debug builds
            let q = exact_int_div(&num, &phi);
            assert_eq!(q.len() + phi.len() - 1, n + 1);
        }
    }

    #[test]
    fn context_reports_degree() {
        let ctx = CycloContext::new(12).unwrap();
        assert_eq!(ctx.phi, 4);
        assert_eq!(Cyclo::<12>::context(), ctx);
        assert!(CycloContext::new(1).is_err());
    }

    #[test]
    fn products_at_cube_root() {
        let w = Cyclo::<3>::omega();
        let w2 = Cyclo::<3>::omega_pow(2);
        assert_eq!(w.clone() * w2.clone(), Cyclo::<3>::one());
        let a = Cyclo::<3>::one() + w.clone();
        let b = Cyclo::<3>::one() + w2;
        assert_eq!(a * b, Cyclo::<3>::one());
        assert!((w * Cyclo::<3>::zero()).is_zero());
    }

    #[test]
    fn inverses_at_cube_root() {
        let one = Cyclo::<3>::one();
        assert_eq!(one.inverse().unwrap(), one);
        let w = Cyclo::<3>::omega();
        assert_eq!(w.inverse().unwrap(), Cyclo::<3>::omega_pow(2));
        let a = one.clone() + w;
        let inv = a.inverse().unwrap();
        // 1 + ω = −ω², so its inverse is −ω
        assert_eq!(inv, -Cyclo::<3>::omega());
        assert_eq!(a * inv, one);
        assert_eq!(Cyclo::<3>::zero().inverse(), Err(ArithError::ZeroInverse));
    }

    #[test]
    fn inverse_with_nontrivial_denominator() {
        // 1 + i has norm 2
        let a = Cyclo::<4>::one() + Cyclo::<4>::omega();
        let inv = a.inverse().unwrap();
        assert_eq!(inv.coeffs(), &[rat(1, 2), rat(-1, 2)]);
    }

    #[test]
    fn q_integers_at_cube_root() {
        assert!(q_integer::<BigRational, 3>(0).is_zero());
        assert!(q_integer::<BigRational, 3>(1).is_one());
        assert_eq!(q_integer::<BigRational, 3>(2), Cyclo::<3>::one() + Cyclo::<3>::omega());
        assert!(q_integer::<BigRational, 3>(3).is_zero());
        assert!(q_factorial::<BigRational, 3>(3).is_zero());
        assert!(q_factorial::<BigRational, 3>(0).is_one());
    }

    #[test]
    fn q_integer_definition_holds() {
        fn check<const N: usize>() {
            let one_minus_w = Cyclo::<N>::one() - Cyclo::<N>::omega();
            for n in 0..=N {
                let lhs = q_integer::<BigRational, N>(n) * one_minus_w.clone();
                let rhs = Cyclo::<N>::one() - Cyclo::<N>::omega_pow(n as i64);
                assert_eq!(lhs, rhs, "N={N} n={n}");
            }
        }
        check::<2>();
        check::<3>();
        check::<4>();
        check::<5>();
        check::<6>();
        check::<8>();
    }

    #[test]
    fn complex_embedding() {
        let w = Cyclo::<3>::omega().to_complex();
        assert!((w.re + 0.5).abs() < 1e-12);
        assert!((w.im - 0.866_025_403_784_438_6).abs() < 1e-12);
        assert!((Cyclo::<3>::one().to_complex() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let s = Cyclo::<3>::from_coeffs((0..3).map(|_| rat(1, 1)));
        assert!(s.is_zero());
        assert!(s.to_complex().norm() < 1e-12);
    }

    #[test]
    fn string_serialization() {
        let a = Cyclo::<3>::from_coeffs([rat(1, 2), rat(-3, 4)]);
        let s = a.to_strings();
        assert_eq!(s, vec!["1/2", "-3/4"]);
        assert_eq!(Cyclo::<3>::from_strings(&s).unwrap(), a);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"["1/2","-3/4"]"#);
        let back: Cyclo<3> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
        assert!(Cyclo::<3>::from_strings(&["1"]).is_err());
        assert!(Cyclo::<3>::from_strings(&["1/0", "0"]).is_err());
    }

    mod laws {
        use super::*;
        use crate::scalar::ExactLift;
        use proptest::prelude::*;

        fn elem<const N: usize>() -> impl Strategy<Value = Cyclo<N>> {
            prop::collection::vec((-20i64..=20, 1i64..=6), N - 1).prop_map(|c| Cyclo::<N>::from_coeffs(c.into_iter().map(|(n, d)| rat(n, d))))
        }

        proptest! {
            #[test]
            fn ring_laws_order_5(a in elem::<5>(), b in elem::<5>(), c in elem::<5>()) {
                prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
                prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c));
                prop_assert_eq!(a.clone() * b.clone(), b * a);
            }

            #[test]
            fn inverse_order_8(a in elem::<8>()) {
                prop_assume!(!a.is_zero());
                prop_assert!((a.clone() * a.inverse().unwrap()).is_one());
            }

            #[test]
            fn embedding_is_multiplicative(a in elem::<3>(), b in elem::<3>()) {
                let lhs = (a.clone() * b.clone()).to_complex();
                let rhs = a.to_complex() * b.to_complex();
                prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
            }

            #[test]
            fn checked_agrees_with_big(c in prop::collection::vec((-20i64..=20, 1i64..=6), 6), k in 0i64..14) {
                let fast = Cyclotomic::<CheckedRational, 7>::from_coeffs(c.iter().map(|&(n, d)| CheckedRational::new(CheckedI64(n), CheckedI64(d))));
                let big = Cyclo::<7>::from_coeffs(c.iter().map(|&(n, d)| rat(n, d)));
                let prod = fast * Cyclotomic::<CheckedRational, 7>::omega_pow(k);
                prop_assert_eq!(prod.map_coeffs(|x| x.to_big()), big * Cyclo::<7>::omega_pow(k));
            }
        }
    }
}
