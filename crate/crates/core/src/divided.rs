//! Divided powers of the boundary monodromy coefficients.
//!
//! At a root of unity B^N/[N]! is 0/0, so the divided powers are defined by
//! explicit composition sums over ν = (ν₁…ν_L) with 0 ≤ ν_m ≤ N−1. Every
//! term sends a basis ket to a single basis ket with a product of q-binomials
//! as amplitude, so the sums are built column by column without any
//! division. [`boundary_power_oracle`] recomputes the same operators for
//! generic q and specializes afterwards.

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::check::CheckResult;
use crate::cyclotomic::Cyclotomic;
use crate::error::{ArithError, Error, Result};
use crate::poly::Poly;
use crate::scalar::Ring;
use crate::sparse::SparseOp;
use crate::state::{digits, site_stride, LatticeConfig, Sector};

type Op<T, const N: usize> = SparseOp<Cyclotomic<T, N>>;

/// Which boundary coefficient a divided power is taken of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenLabel {
    /// B_L, giving x₀⁻
    X0Minus,
    /// B₁, giving x₁⁻
    X1Minus,
    /// C₀, giving x₀⁺
    X0Plus,
    /// C_{L−1}, giving x₋₁⁺
    Xm1Plus,
}

impl GenLabel {
    pub const ALL: [GenLabel; 4] = [GenLabel::X0Minus, GenLabel::X1Minus, GenLabel::X0Plus, GenLabel::Xm1Plus];

    pub fn name(self) -> &'static str {
        match self {
            GenLabel::X0Minus => "x0minus",
            GenLabel::X1Minus => "x1minus",
            GenLabel::X0Plus => "x0plus",
            GenLabel::Xm1Plus => "xm1plus",
        }
    }

    /// Built from f (raising n) rather than e.
    pub fn is_lowering(self) -> bool {
        matches!(self, GenLabel::X0Minus | GenLabel::X1Minus)
    }

    /// Z_m carries Σ_{ℓ>m} ν_ℓ (otherwise Σ_{ℓ<m} ν_ℓ).
    fn z_from_right(self) -> bool {
        matches!(self, GenLabel::X0Minus | GenLabel::X0Plus)
    }

    /// Exponent of the overall ω phase.
    fn phase(self, l: usize, k: usize, weighted: usize) -> i64 {
        match self {
            GenLabel::X0Minus | GenLabel::Xm1Plus => 0,
            GenLabel::X1Minus => (l * k) as i64 - weighted as i64,
            GenLabel::X0Plus => weighted as i64 - k as i64,
        }
    }
}

impl std::fmt::Display for GenLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Gaussian binomials [a choose b] at q = ω for 0 ≤ b ≤ a < N, by q-Pascal.
fn q_binomials<T: Ring, const N: usize>() -> Vec<Vec<Cyclotomic<T, N>>> {
    let mut t: Vec<Vec<Cyclotomic<T, N>>> = Vec::with_capacity(N);
    for a in 0..N {
        let mut row = Vec::with_capacity(a + 1);
        for b in 0..=a {
            if b == 0 || b == a {
                row.push(Cyclotomic::one());
            } else {
                let x = t[a - 1][b - 1].clone() + Cyclotomic::omega_pow(b as i64) * t[a - 1][b].clone();
                row.push(x);
            }
        }
        t.push(row);
    }
    t
}

/// Calls `visit` with each ν admissible on the ket `n` with Σν = k.
fn for_each_composition(caps: &[usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    let l = caps.len();
    let mut suffix = vec![0usize; l + 1];
    for m in (0..l).rev() {
        suffix[m] = suffix[m + 1] + caps[m];
    }
    if suffix[0] < k {
        return;
    }
    let mut nu = vec![0usize; l];
    fn rec(m: usize, left: usize, caps: &[usize], suffix: &[usize], nu: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        if m == caps.len() {
            if left == 0 {
                visit(nu);
            }
            return;
        }
        let lo = left.saturating_sub(suffix[m + 1]);
        let hi = caps[m].min(left);
        for v in lo..=hi {
            nu[m] = v;
            rec(m + 1, left - v, caps, suffix, nu, visit);
        }
        nu[m] = 0;
    }
    rec(0, k, caps, &suffix, &mut nu, visit);
}

/// Composition sum without the (1−ω)^k prefactor, restricted to the given
/// columns. `row_of` maps an output rank to a row index.
fn composition_sum<T: Ring, const N: usize>(
    label: GenLabel,
    k: usize,
    cfg: &LatticeConfig,
    columns: &[usize],
    row_of: impl Fn(usize) -> Option<usize>,
    out_dim: usize,
) -> Op<T, N> {
    let l = cfg.l;
    let qb = q_binomials::<T, N>();
    let strides: Vec<usize> = (1..=l).map(|j| site_stride(cfg, j)).collect();
    let lowering = label.is_lowering();
    let from_right = label.z_from_right();
    let mut triplets: Vec<(usize, usize, Cyclotomic<T, N>)> = Vec::new();
    let mut s = vec![0usize; l];
    for (col, &rank) in columns.iter().enumerate() {
        let n = digits(rank, cfg);
        let caps: Vec<usize> = n.iter().map(|&x| if lowering { N - 1 - x } else { x }).collect();
        for_each_composition(&caps, k, &mut |nu| {
            // Z exponents
            let mut acc = 0;
            if from_right {
                for m in (0..l).rev() {
                    s[m] = acc;
                    acc += nu[m];
                }
            } else {
                for m in 0..l {
                    s[m] = acc;
                    acc += nu[m];
                }
            }
            let weighted: usize = nu.iter().enumerate().map(|(m, &v)| (m + 1) * v).sum();
            let mut exponent = label.phase(l, k, weighted);
            let mut amp = Cyclotomic::<T, N>::one();
            let mut target = rank;
            for m in 0..l {
                let (v, x) = (nu[m], n[m]);
                if lowering {
                    exponent += (s[m] * x) as i64;
                    if v > 0 {
                        amp = amp * qb[x + v][v].clone();
                        target += v * strides[m];
                    }
                } else {
                    exponent += (s[m] * (x - v)) as i64;
                    if v > 0 {
                        amp = amp * qb[x][v].clone();
                        target -= v * strides[m];
                    }
                }
            }
            if let Some(row) = row_of(target) {
                triplets.push((row, col, amp * Cyclotomic::omega_pow(exponent)));
            }
        });
    }
    SparseOp::from_triplets(out_dim, triplets).expect("rows and columns lie in range")
}

/// O^(k) for O one of B_L, B₁, C₀, C_{L−1}, on the full edge space.
///
/// Valid for any k ≥ 0; zero once k exceeds (N−1)L.
pub fn boundary_divided_power<T: Ring, const N: usize>(label: GenLabel, k: usize, cfg: &LatticeConfig) -> Result<Op<T, N>> {
    cfg.check_order::<N>()?;
    let cols: Vec<usize> = (0..cfg.dim()).collect();
    let raw = composition_sum::<T, N>(label, k, cfg, &cols, Some, cfg.dim());
    let om = Cyclotomic::<T, N>::one() - Cyclotomic::omega();
    Ok(raw.scale(&om.pow(k as u32)))
}

/// (x)^(n) = O^(nN)/(1−ω)^{nN} on the full edge space.
pub fn divided_power<T: Ring, const N: usize>(label: GenLabel, n: usize, cfg: &LatticeConfig) -> Result<Op<T, N>> {
    cfg.check_order::<N>()?;
    cfg.require_multiple()?;
    let cols: Vec<usize> = (0..cfg.dim()).collect();
    Ok(composition_sum::<T, N>(label, n * N, cfg, &cols, Some, cfg.dim()))
}

/// (x)^(n) restricted to a charge sector, built directly on that block.
pub fn divided_power_sector<T: Ring, const N: usize>(label: GenLabel, n: usize, sector: &Sector) -> Result<Op<T, N>> {
    let cfg = &sector.config;
    cfg.check_order::<N>()?;
    cfg.require_multiple()?;
    Ok(composition_sum::<T, N>(label, n * N, cfg, sector.basis(), |r| sector.position(r), sector.len()))
}

/// Largest edge space the generic-q oracle is run on.
pub const ORACLE_MAX_DIM: usize = 30;

type QPoly = Poly<BigRational>;

fn qint(n: usize) -> QPoly {
    QPoly::new(vec![BigRational::one(); n])
}

fn qpow(k: usize) -> QPoly {
    QPoly::monomial(BigRational::one(), k)
}

/// The boundary coefficient with ω replaced by a formal q, truncated at N−1.
fn generic_boundary(label: GenLabel, cfg: &LatticeConfig) -> SparseOp<QPoly> {
    let (n_states, l) = (cfg.n, cfg.l);
    let one_minus_q = QPoly::linear(BigRational::one(), -BigRational::one());
    SparseOp::from_column_fn(cfg.dim(), |rank, push| {
        let n = digits(rank, cfg);
        for j in 1..=l {
            let x = n[j - 1];
            let stride = site_stride(cfg, j);
            let before: usize = n[..j - 1].iter().sum();
            let after: usize = n[j..].iter().sum();
            let (target, amp, zexp, phase) = match label {
                GenLabel::X0Minus if x + 1 < n_states => (rank + stride, qint(x + 1), before, 0),
                GenLabel::X1Minus if x + 1 < n_states => (rank + stride, qint(x + 1), after, l - j),
                GenLabel::X0Plus if x > 0 => (rank - stride, qint(x), before, j - 1),
                GenLabel::Xm1Plus if x > 0 => (rank - stride, qint(x), after, 0),
                _ => continue,
            };
            push(target, &(&amp * &qpow(zexp + phase)) * &one_minus_q);
        }
    })
}

/// O^(k) computed as O(q)^k / [k]_q! with exact polynomial division, then
/// specialized to q = ω.
pub fn boundary_power_oracle<const N: usize>(label: GenLabel, k: usize, cfg: &LatticeConfig) -> Result<crate::ExactOp<N>> {
    cfg.check_order::<N>()?;
    if cfg.dim() > ORACLE_MAX_DIM {
        return Err(Error::Config(format!("oracle limited to N^L ≤ {ORACLE_MAX_DIM}")));
    }
    let power = generic_boundary(label, cfg).pow(k as u32);
    let fact = (1..=k).fold(QPoly::one(), |acc, i| &acc * &qint(i));
    let w = crate::Cyclo::<N>::omega();
    let mut triplets = Vec::new();
    for (i, j, p) in power.entries_row_major() {
        let quotient = p.div_exact(&fact).ok_or(ArithError::InexactDivision)?;
        let value = quotient.map(|c| crate::Cyclo::<N>::from_scalar(c.clone())).eval(&w);
        triplets.push((i, j, value));
    }
    SparseOp::from_triplets(cfg.dim(), triplets)
}

/// O^(nN) by the oracle.
pub fn divided_power_oracle<const N: usize>(label: GenLabel, n: usize, cfg: &LatticeConfig) -> Result<crate::ExactOp<N>> {
    cfg.require_multiple()?;
    boundary_power_oracle::<N>(label, n * N, cfg)
}

/// Compares closed-form divided powers against the generic-q oracle for
/// every label and every k with a nonempty composition, plus one beyond.
pub fn verify_divided_power_oracle<const N: usize>(cfg: &LatticeConfig) -> CheckResult {
    CheckResult::timed("divided_power.oracle", |res| {
        res.params.insert("N".into(), json!(cfg.n));
        res.params.insert("L".into(), json!(cfg.l));
        if cfg.dim() > ORACLE_MAX_DIM {
            res.status = crate::check::Status::Skip;
            res.reason = Some(format!("N^L = {} exceeds {ORACLE_MAX_DIM}", cfg.dim()));
            return;
        }
        let kmax = (cfg.n - 1) * cfg.l + 1;
        let mut compared = 0;
        for label in GenLabel::ALL {
            for k in 0..=kmax {
                let closed = match boundary_divided_power::<BigRational, N>(label, k, cfg) {
                    Ok(op) => op,
                    Err(e) => return res.fail(json!({ "error": e.to_string() })),
                };
                let oracle = match boundary_power_oracle::<N>(label, k, cfg) {
                    Ok(op) => op,
                    Err(e) => return res.fail(json!({ "label": label.name(), "k": k, "error": e.to_string() })),
                };
                if let Some((row, col)) = closed.first_difference(&oracle) {
                    return res.fail(json!({ "label": label.name(), "k": k, "row": row, "col": col }));
                }
                compared += 1;
            }
        }
        res.observe("operators_compared", json!(compared));
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::boundary_coefficients;
    use crate::Cyclo;

    fn cfg(n: usize, l: usize) -> LatticeConfig {
        LatticeConfig::new(n, l, 0).unwrap()
    }

    #[test]
    fn q_binomials_at_cube_root() {
        let t = q_binomials::<BigRational, 3>();
        // [2 choose 1] = 1 + ω
        assert_eq!(t[2][1], Cyclo::<3>::one() + Cyclo::<3>::omega());
    }

    #[test]
    fn compositions_counted() {
        let mut count = 0;
        for_each_composition(&[2, 2, 2], 3, &mut |_| count += 1);
        assert_eq!(count, 7);
        count = 0;
        for_each_composition(&[2, 2, 2], 9, &mut |_| count += 1);
        assert_eq!(count, 0);
    }

    #[test]
    fn first_power_is_boundary_coefficient() {
        for (n, l) in [(3, 3), (4, 2), (2, 4)] {
            let c = cfg(n, l);
            fn go<const N: usize>(c: &LatticeConfig) {
                let bc = boundary_coefficients::<BigRational, N>(c).unwrap();
                let get = |g| boundary_divided_power::<BigRational, N>(g, 1, c).unwrap();
                assert_eq!(get(GenLabel::X0Minus), bc.b_l);
                assert_eq!(get(GenLabel::X1Minus), bc.b1);
                assert_eq!(get(GenLabel::X0Plus), bc.c0);
                assert_eq!(get(GenLabel::Xm1Plus), bc.c_lm1);
            }
            match n {
                2 => go::<2>(&c),
                3 => go::<3>(&c),
                4 => go::<4>(&c),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn below_order_matches_plain_power_over_factorial() {
        let c = cfg(3, 3);
        for g in GenLabel::ALL {
            let one = boundary_divided_power::<BigRational, 3>(g, 1, &c).unwrap();
            let two = boundary_divided_power::<BigRational, 3>(g, 2, &c).unwrap();
            let fact = crate::q_factorial::<BigRational, 3>(2).inverse().unwrap();
            assert_eq!(one.pow(2).scale(&fact), two, "{g}");
        }
    }

    #[test]
    fn zero_power_is_identity_and_overflow_is_zero() {
        let c = cfg(3, 3);
        for g in GenLabel::ALL {
            assert_eq!(divided_power::<BigRational, 3>(g, 0, &c).unwrap(), SparseOp::identity(27));
            assert!(divided_power::<BigRational, 3>(g, 3, &c).unwrap().is_zero());
        }
        assert!(divided_power::<BigRational, 3>(GenLabel::X0Minus, 1, &cfg(3, 4)).is_err());
    }

    #[test]
    fn x1minus_single_power_terms() {
        // one term per composition of 3 into 3 parts ≤ 2 on |Ω⟩
        let c = cfg(3, 3);
        let op = divided_power::<BigRational, 3>(GenLabel::X1Minus, 1, &c).unwrap();
        assert_eq!(op.column(0).len(), 7);
    }

    #[test]
    fn sector_block_matches_full_restriction() {
        let c = cfg(3, 3);
        let s = Sector::new(&c, 0);
        for g in GenLabel::ALL {
            let full = divided_power::<BigRational, 3>(g, 1, &c).unwrap().restrict(&s).unwrap();
            assert_eq!(divided_power_sector::<BigRational, 3>(g, 1, &s).unwrap(), full);
        }
    }

    #[test]
    fn oracle_agrees() {
        assert!(verify_divided_power_oracle::<2>(&cfg(2, 2)).passed());
        assert!(verify_divided_power_oracle::<2>(&cfg(2, 3)).passed());
        let r = verify_divided_power_oracle::<3>(&cfg(3, 3));
        assert!(r.passed(), "{r:?}");
        assert!(verify_divided_power_oracle::<4>(&cfg(4, 2)).passed());
        assert!(verify_divided_power_oracle::<5>(&cfg(5, 2)).passed());
    }

    #[test]
    fn oracle_for_loop_generators() {
        let c = cfg(3, 3);
        let om = Cyclo::<3>::one() - Cyclo::<3>::omega();
        for g in GenLabel::ALL {
            let lhs = divided_power::<BigRational, 3>(g, 1, &c).unwrap().scale(&om.pow(3));
            assert_eq!(divided_power_oracle::<3>(g, 1, &c).unwrap(), lhs);
        }
    }
}
