//! Coefficients Λ_n of the Drinfeld polynomial P(z) = Σ Λ_n zⁿ.
//!
//! Λ_n counts compositions ν₁+⋯+ν_L = nN with 0 ≤ ν_m ≤ N−1, i.e. the
//! coefficient of t^{nN} in (1 − t^N)^L / (1 − t)^L.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::LatticeConfig;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrinfeldData {
    /// (N − 1)L/N
    pub r: usize,
    /// Λ₀ … Λ_r
    pub lambdas: Vec<i64>,
}

impl DrinfeldData {
    pub fn lambda(&self, n: usize) -> i64 {
        self.lambdas.get(n).copied().unwrap_or(0)
    }

    pub fn is_palindromic(&self) -> bool {
        self.lambdas.iter().eq(self.lambdas.iter().rev())
    }

    pub fn total(&self) -> i128 {
        self.lambdas.iter().map(|&x| x as i128).sum()
    }
}

/// Λ_n read off the expansion of (1 + t + ⋯ + t^{N−1})^L.
pub fn lambda_series(n: usize, l: usize) -> Vec<BigInt> {
    let mut poly = vec![BigInt::one()];
    for _ in 0..l {
        let mut next = vec![BigInt::zero(); poly.len() + n - 1];
        for (i, c) in poly.iter().enumerate() {
            for slot in &mut next[i..i + n] {
                *slot += c;
            }
        }
        poly = next;
    }
    poly.into_iter().step_by(n).collect()
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Λ_n = Σ_m (−1)^m C(L, m) (L)_{(n−m)N} / ((n−m)N)!, with (L)_k the rising
/// factorial, so that (L)_k / k! = C(L + k − 1, k).
pub fn lambda_alternating(n: usize, l: usize, index: usize) -> BigInt {
    let (n, l) = (n as u64, l as u64);
    let mut acc = BigInt::zero();
    for m in 0..=index as u64 {
        let k = (index as u64 - m) * n;
        let rising = if k == 0 { BigInt::one() } else { binomial(l + k - 1, k) };
        let term = binomial(l, m) * rising;
        if m % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Λ₀…Λ_r computed both ways; the two must agree.
pub fn lambda_coefficients(cfg: &LatticeConfig) -> Result<DrinfeldData> {
    cfg.require_multiple()?;
    let r = cfg.r();
    let series = lambda_series(cfg.n, cfg.l);
    let mut lambdas = Vec::with_capacity(r + 1);
    for idx in 0..=r {
        let a = &series[idx];
        let b = lambda_alternating(cfg.n, cfg.l, idx);
        if *a != b {
            return Err(Error::Numeric(format!("Λ_{idx}: series gives {a}, alternating sum gives {b}")));
        }
        lambdas.push(a.to_i64().ok_or_else(|| Error::Config(format!("Λ_{idx} = {a} exceeds i64")))?);
    }
    Ok(DrinfeldData { r, lambdas })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lambdas(n: usize, l: usize) -> Vec<i64> {
        lambda_coefficients(&LatticeConfig::new(n, l, 0).unwrap()).unwrap().lambdas
    }

    #[test]
    fn known_tables() {
        assert_eq!(lambdas(3, 3), vec![1, 7, 1]);
        assert_eq!(lambdas(3, 6), vec![1, 50, 141, 50, 1]);
        assert_eq!(lambdas(4, 4), vec![1, 31, 31, 1]);
        assert_eq!(lambdas(2, 2), vec![1, 1]);
    }

    #[test]
    fn palindromic_and_summing_to_sector_size() {
        for (n, l) in [(2, 4), (2, 8), (3, 9), (4, 8), (5, 5), (6, 6)] {
            let d = lambda_coefficients(&LatticeConfig::new(n, l, 0).unwrap()).unwrap();
            assert!(d.is_palindromic(), "N={n} L={l}");
            assert_eq!(d.lambdas[0], 1);
            assert_eq!(d.total(), (n as i128).pow(l as u32 - 1), "N={n} L={l}");
        }
    }

    #[test]
    fn rejects_non_multiple() {
        assert!(lambda_coefficients(&LatticeConfig::new(3, 4, 0).unwrap()).is_err());
    }
}
