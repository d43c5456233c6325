//! Univariate polynomials in the spectral variable t over a [`Ring`].

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::{Field, Ring};

/// Coefficients indexed by power of t; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly<S> {
    coeffs: Vec<S>,
}

impl<S: Ring> Poly<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        let mut p = Poly { coeffs };
        p.normalize();
        p
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// `a + b t`
    pub fn linear(a: S, b: S) -> Self {
        Self::new(vec![a, b])
    }

    pub fn monomial(c: S, power: usize) -> Self {
        let mut coeffs = vec![S::zero(); power + 1];
        coeffs[power] = c;
        Self::new(coeffs)
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Coefficient of t^k (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.mul_ref(c)).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Horner evaluation.
    pub fn eval(&self, t: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(t);
            acc.add_assign_ref(c);
        }
        acc
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&S) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<S: Field> Poly<S> {
    /// Exact quotient `self / d`, or `None` if `d` is zero or does not divide.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let dd = d.degree()?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        let lead = d.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return None;
        }
        let mut quot = vec![S::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() / lead.clone();
            for (i, di) in d.coeffs.iter().enumerate() {
                rem[k + i].sub_assign_ref(&c.mul_ref(di));
            }
            quot[k] = c;
        }
        if rem.iter().all(|c| c.is_zero()) {
            Some(Self::new(quot))
        } else {
            None
        }
    }
}

impl<S: Ring> Ring for Poly<S> {
    fn from_int(n: i64) -> Self {
        Self::constant(S::from_int(n))
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

impl<S: Ring> Zero for Poly<S> {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<S: Ring> One for Poly<S> {
    fn one() -> Self {
        Self::constant(S::one())
    }
}

impl<S: Ring> Add<&Poly<S>> for &Poly<S> {
    type Output = Poly<S>;
    fn add(self, rhs: &Poly<S>) -> Poly<S> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![S::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i].add_assign_ref(c);
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            out[i].add_assign_ref(c);
        }
        Poly::new(out)
    }
}

impl<S: Ring> Sub<&Poly<S>> for &Poly<S> {
    type Output = Poly<S>;
    fn sub(self, rhs: &Poly<S>) -> Poly<S> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![S::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i].add_assign_ref(c);
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            out[i].sub_assign_ref(c);
        }
        Poly::new(out)
    }
}

impl<S: Ring> Mul<&Poly<S>> for &Poly<S> {
    type Output = Poly<S>;
    fn mul(self, rhs: &Poly<S>) -> Poly<S> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j].fma_assign(a, b);
            }
        }
        Poly::new(out)
    }
}

impl<S: Ring> Add for Poly<S> {
    type Output = Poly<S>;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl<S: Ring> Sub for Poly<S> {
    type Output = Poly<S>;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl<S: Ring> Mul for Poly<S> {
    type Output = Poly<S>;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<S: Ring> Neg for Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Self {
        Poly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Cyclo;
    use num_rational::BigRational;

    #[test]
    fn binomial_expansion_over_floats() {
        let p = Poly::linear(1.0f64, 1.0).pow(3);
        assert_eq!(p.coeffs(), &[1.0, 3.0, 3.0, 1.0]);
    }

    #[test]
    fn normalizes_trailing_zeros() {
        let p = Poly::new(vec![Cyclo::<3>::one(), Cyclo::<3>::zero()]);
        assert_eq!(p.degree(), Some(0));
        let z = &p - &p;
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
    }

    #[test]
    fn exact_division() {
        let x = Poly::linear(BigRational::from_integer(1.into()), BigRational::from_integer(1.into()));
        let p = x.pow(3);
        assert_eq!(p.div_exact(&x.pow(2)), Some(x.clone()));
        let y = Poly::linear(BigRational::from_integer(2.into()), BigRational::from_integer(1.into()));
        assert_eq!(p.div_exact(&y), None);
        assert_eq!(p.div_exact(&Poly::zero()), None);
    }

    #[test]
    fn eval_matches_expansion() {
        let w = Cyclo::<3>::omega();
        // (1 - ωt)^3 at t = ω² is (1 - 1)^3 = 0
        let p = Poly::linear(Cyclo::<3>::one(), -w.clone()).pow(3);
        assert!(p.eval(&Cyclo::<3>::omega_pow(2)).is_zero());
        assert_eq!(p.eval(&Cyclo::<3>::zero()), Cyclo::<3>::one());
    }
}
