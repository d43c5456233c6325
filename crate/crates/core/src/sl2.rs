//! Numerical stage: Drinfeld roots, the evaluation-representation split of
//! the loop generators into r copies of sl₂, and dense spectra of τ₂.
//!
//! Every operator is computed exactly first and only then embedded into
//! complex doubles.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Schur, SVD};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::json;

use crate::check::CheckResult;
use crate::cyclotomic::Cyclotomic;
use crate::drinfeld::DrinfeldData;
use crate::error::{Error, Result};
use crate::loop_algebra::{Family, LoopGenerators};
use crate::scalar::{ExactLift, RealCoeff, Ring};
use crate::sparse::{OpPoly, SparseOp};
use crate::state::{LatticeConfig, Sector};
use crate::transfer::tau2_edge;

pub type CMatrix = DMatrix<Complex64>;

pub const DEFAULT_TOL: f64 = 1e-9;
/// Largest full edge space handed to the dense eigensolver.
pub const SPECTRUM_MAX_DIM: usize = 10_000;

pub fn embed<T: RealCoeff, const N: usize>(op: &SparseOp<Cyclotomic<T, N>>) -> CMatrix {
    let mut m = CMatrix::zeros(op.dim(), op.dim());
    for (i, j, v) in op.entries_row_major() {
        m[(i, j)] = v.to_complex();
    }
    m
}

/// Coefficients of τ₂(t)|_Q on the charge-0 sector, embedded.
pub fn embed_tau2<T: RealCoeff, const N: usize>(cfg: &LatticeConfig) -> Result<Vec<CMatrix>> {
    let tau: OpPoly<Cyclotomic<T, N>> = tau2_edge::<T, N>(cfg)?;
    let tau = tau.restrict(&Sector::new(cfg, 0))?;
    Ok(tau.coeffs().iter().map(embed).collect())
}

pub fn eval_matrix_poly(coeffs: &[CMatrix], t: Complex64) -> CMatrix {
    let dim = coeffs.first().map_or(0, |c| c.nrows());
    coeffs.iter().rev().fold(CMatrix::zeros(dim, dim), |acc, c| acc * t + c)
}

/// (1 − ωt)^L + ω^{−Q}(1 − t)^L, the eigenvalue carried by |Ω⟩.
pub fn ground_eigenvalue(n: usize, l: usize, q: usize, t: Complex64) -> Complex64 {
    let w = Complex64::from_polar(1.0, std::f64::consts::TAU / n as f64);
    let one = Complex64::new(1.0, 0.0);
    (one - w * t).powu(l as u32) + w.powi(-(q as i32)) * (one - t).powu(l as u32)
}

fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

#[derive(Clone, Debug)]
pub struct RootSet {
    /// Λ₀ … Λ_r.
    pub coefficients: Vec<i64>,
    pub roots: Vec<Complex64>,
    /// Smallest pairwise distance.
    pub separation: f64,
    /// Largest |P(z)| relative to Σ|Λ_n||z|ⁿ.
    pub residual: f64,
}

impl RootSet {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "roots": self.roots.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "separation": finite_or_null(self.separation),
            "residual": self.residual,
        })
    }
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}

/// Roots of P(z) = Σ Λ_n zⁿ from the companion matrix, followed by one
/// Newton step each. Roots closer than √tol (relative) abort.
pub fn drinfeld_roots(data: &DrinfeldData, tol: f64) -> Result<RootSet> {
    let coeffs: Vec<f64> = data.lambdas.iter().map(|&x| x as f64).collect();
    let r = data.r;
    if r == 0 {
        return Ok(RootSet { coefficients: data.lambdas.clone(), roots: vec![], separation: f64::INFINITY, residual: 0.0 });
    }
    let lead = coeffs[r];
    let mut comp = DMatrix::<f64>::zeros(r, r);
    for i in 1..r {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..r {
        comp[(i, r - 1)] = -coeffs[i] / lead;
    }
    let mut roots: Vec<Complex64> = comp.complex_eigenvalues().iter().copied().collect();
    for z in &mut roots {
        let (p, dp) = horner(&coeffs, *z);
        if dp.norm() > 0.0 {
            *z -= p / dp;
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let residual = roots
        .iter()
        .map(|&z| {
            let scale: f64 = coeffs.iter().enumerate().map(|(k, c)| c.abs() * z.norm().powi(k as i32)).sum();
            horner(&coeffs, z).0.norm() / scale.max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);
    let mut separation = f64::INFINITY;
    let mut closest = (0, 0);
    for i in 0..r {
        for j in i + 1..r {
            let d = (roots[i] - roots[j]).norm();
            if d < separation {
                separation = d;
                closest = (i, j);
            }
        }
    }
    let size = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if separation <= tol.sqrt() * size {
        let (i, j) = closest;
        return Err(Error::Numeric(format!(
            "Drinfeld roots {} and {} coincide to within {separation:.3e}; repeated roots are not supported",
            roots[i], roots[j]
        )));
    }
    if residual > tol {
        return Err(Error::Numeric(format!("Drinfeld root residual {residual:.3e} exceeds {tol:.1e}")));
    }
    Ok(RootSet { coefficients: data.lambdas.clone(), roots, separation, residual })
}

/// Components (E_m⁻, E_m⁺, H_m) in some basis, together with the generators
/// x_j^±, h_j (0 ≤ j ≤ r) they were solved from.
#[derive(Clone, Debug)]
pub struct Triples {
    pub e_minus: Vec<CMatrix>,
    pub e_plus: Vec<CMatrix>,
    pub h: Vec<CMatrix>,
    /// |Ω⟩ in the same basis.
    pub omega: DVector<Complex64>,
    generators: BTreeMap<(Family, i64), CMatrix>,
}

impl Triples {
    /// E_m = Σ_j (V⁻¹)_{mj} x_j with V_{jm} = z_m^j. Writing the rows of V⁻¹
    /// as Lagrange polynomials gives E_m = P'(z_m)⁻¹ Σ_k z_m^k Y_k with
    /// Y_k = Σ_{i>k} Λ_i x_{i−1−k}, and the Y_k are formed exactly.
    fn solve<const N: usize>(
        exact: &BTreeMap<(Family, i64), SparseOp<Cyclotomic<BigRational, N>>>,
        roots: &RootSet,
        omega: DVector<Complex64>,
    ) -> Self {
        let r = roots.roots.len();
        let lambda: Vec<Cyclotomic<BigRational, N>> = roots
            .coefficients
            .iter()
            .map(|&c| Cyclotomic::from_scalar(BigRational::from_integer(c.into())))
            .collect();
        let coeffs: Vec<f64> = roots.coefficients.iter().map(|&c| c as f64).collect();
        let part = |family: Family| -> Vec<CMatrix> {
            let y: Vec<CMatrix> = (0..r)
                .map(|k| {
                    let sum = (k + 1..=r).fold(SparseOp::zero(omega.len()), |acc, i| {
                        acc.add(&exact[&(family, (i - 1 - k) as i64)].scale(&lambda[i]))
                    });
                    embed(&sum)
                })
                .collect();
            roots
                .roots
                .iter()
                .map(|&z| {
                    let dp = horner(&coeffs, z).1;
                    y.iter().rev().fold(CMatrix::zeros(omega.len(), omega.len()), |acc, yk| acc * z + yk) / dp
                })
                .collect()
        };
        Triples {
            e_minus: part(Family::XMinus),
            e_plus: part(Family::XPlus),
            h: part(Family::H),
            generators: exact.iter().map(|(k, op)| (*k, embed(op))).collect(),
            omega,
        }
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    pub fn component(&self, family: Family) -> &[CMatrix] {
        match family {
            Family::XMinus => &self.e_minus,
            Family::XPlus => &self.e_plus,
            Family::H => &self.h,
        }
    }

    pub fn generator(&self, family: Family, j: i64) -> Option<&CMatrix> {
        self.generators.get(&(family, j))
    }

    /// Σ_m z_m^j times the components of `family`.
    pub fn reassemble(&self, roots: &[Complex64], family: Family, j: i64) -> CMatrix {
        let dim = self.dim();
        self.component(family)
            .iter()
            .zip(roots)
            .fold(CMatrix::zeros(dim, dim), |acc, (e, z)| acc + e * z.powi(j as i32))
    }
}

/// The r sl₂ triples with x_j^± = Σ_m z_m^j E_m^± and h_j = Σ_m z_m^j H_m.
///
/// `full` lives on the whole charge-0 sector. `space` lives on the span of
/// x⁻_{j₁}⋯x⁻_{j_k}|Ω⟩ (distinct j_i < r), where the generators are first
/// restricted exactly and only then embedded; this is where the finiteness
/// relations, and hence the decomposition, hold.
#[derive(Clone, Debug)]
pub struct Sl2Decomposition {
    pub roots: RootSet,
    /// 2-norm condition number of the Vandermonde matrix.
    pub condition: f64,
    /// Positions of |Ω⟩ and |Ω̄⟩ in the sector basis.
    pub ground: (usize, usize),
    pub full: Triples,
    pub space: Triples,
}

impl Sl2Decomposition {
    pub fn r(&self) -> usize {
        self.roots.roots.len()
    }

    pub fn dim(&self) -> usize {
        self.full.dim()
    }
}

type ExactVec<const N: usize> = Vec<Cyclotomic<BigRational, N>>;

/// Exact coordinates with respect to a set of linearly independent vectors.
struct ExactBasis<const N: usize> {
    vectors: Vec<ExactVec<N>>,
    pivots: Vec<usize>,
    /// Inverse of the vectors restricted to the pivot rows.
    inv: Vec<ExactVec<N>>,
}

impl<const N: usize> ExactBasis<N> {
    fn new(vectors: Vec<ExactVec<N>>) -> Result<Self> {
        let k = vectors.len();
        let mut rows = vectors.clone();
        let mut pivots = Vec::with_capacity(k);
        for i in 0..k {
            let p = (0..rows[i].len())
                .find(|&c| !rows[i][c].is_zero())
                .ok_or_else(|| Error::Numeric(format!("eigenspace spanning vector {i} is dependent on the previous ones")))?;
            let inv = rows[i][p].inverse()?;
            let (done, rest) = rows.split_at_mut(i + 1);
            let pivot_row = &done[i];
            for row in rest {
                if row[p].is_zero() {
                    continue;
                }
                let f = row[p].clone() * inv.clone();
                for (x, y) in row.iter_mut().zip(pivot_row) {
                    x.sub_assign_ref(&f.mul_ref(y));
                }
            }
            pivots.push(p);
        }
        // Gauss-Jordan on the k×k pivot block P[a][b] = vectors[b][pivots[a]].
        let mut a: Vec<ExactVec<N>> = (0..k).map(|r| (0..k).map(|c| vectors[c][pivots[r]].clone()).collect()).collect();
        let mut inv: Vec<ExactVec<N>> = (0..k)
            .map(|r| (0..k).map(|c| if r == c { Cyclotomic::one() } else { Cyclotomic::zero() }).collect())
            .collect();
        for col in 0..k {
            let p = (col..k).find(|&r| !a[r][col].is_zero()).ok_or_else(|| Error::Numeric("singular pivot block".into()))?;
            a.swap(col, p);
            inv.swap(col, p);
            let d = a[col][col].inverse()?;
            for x in a[col].iter_mut().chain(inv[col].iter_mut()) {
                *x = x.mul_ref(&d);
            }
            for r in 0..k {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                let (arow, irow) = (a[col].clone(), inv[col].clone());
                for (x, y) in a[r].iter_mut().zip(&arow) {
                    x.sub_assign_ref(&f.mul_ref(y));
                }
                for (x, y) in inv[r].iter_mut().zip(&irow) {
                    x.sub_assign_ref(&f.mul_ref(y));
                }
            }
        }
        Ok(ExactBasis { vectors, pivots, inv })
    }

    /// Coordinates c with Σ c_b v_b = w, or `None` if w is outside the span.
    fn coordinates(&self, w: &[Cyclotomic<BigRational, N>]) -> Option<ExactVec<N>> {
        let rhs: ExactVec<N> = self.pivots.iter().map(|&p| w[p].clone()).collect();
        let c: ExactVec<N> = self
            .inv
            .iter()
            .map(|row| row.iter().zip(&rhs).fold(Cyclotomic::zero(), |mut acc, (a, b)| {
                acc.fma_assign(a, b);
                acc
            }))
            .collect();
        let mut back = vec![Cyclotomic::<BigRational, N>::zero(); w.len()];
        for (cb, v) in c.iter().zip(&self.vectors) {
            for (x, y) in back.iter_mut().zip(v) {
                x.fma_assign(cb, y);
            }
        }
        (back.as_slice() == w).then_some(c)
    }
}

fn lift_op<T: ExactLift, const N: usize>(op: &SparseOp<Cyclotomic<T, N>>) -> SparseOp<Cyclotomic<BigRational, N>> {
    op.map(|c| c.map_coeffs(ExactLift::to_big))
}

/// Exact matrices of x_j^±, h_j (0 ≤ j ≤ r) on the span of
/// ∏_{j∈S} x_j⁻|Ω⟩, S ⊆ {0, …, r−1}, embedded after restriction.
fn restrict_to_eigenspace<T: ExactLift, const N: usize>(
    gens: &LoopGenerators<Cyclotomic<T, N>>,
    r: usize,
) -> Result<(BTreeMap<(Family, i64), SparseOp<Cyclotomic<BigRational, N>>>, DVector<Complex64>)> {
    let dim = gens.dim();
    let (po, _) = gens.ground_positions();
    let lowering: Vec<SparseOp<Cyclotomic<BigRational, N>>> =
        (0..r as i64).map(|j| gens.require(Family::XMinus, j).map(lift_op)).collect::<Result<_>>()?;
    let mut omega = vec![Cyclotomic::<BigRational, N>::zero(); dim];
    omega[po] = Cyclotomic::one();
    let mut vectors: Vec<ExactVec<N>> = Vec::with_capacity(1 << r);
    for subset in 0..1usize << r {
        let v = match (0..r).rev().find(|m| subset >> m & 1 == 1) {
            None => omega.clone(),
            Some(top) => lowering[top].apply_dense(&vectors[subset & !(1 << top)]),
        };
        vectors.push(v);
    }
    let basis = ExactBasis::new(vectors)?;
    let k = basis.vectors.len();
    let mut out = BTreeMap::new();
    for family in [Family::XMinus, Family::XPlus, Family::H] {
        for j in 0..=r as i64 {
            let op = lift_op(gens.require(family, j)?);
            let mut entries = Vec::new();
            for (b, v) in basis.vectors.iter().enumerate() {
                let image = op.apply_dense(v);
                let c = basis.coordinates(&image).ok_or_else(|| {
                    Error::Numeric(format!("{}_{j} maps eigenspace vector {b} outside the eigenspace", family.symbol()))
                })?;
                entries.extend(c.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(a, x)| (a, b, x)));
            }
            out.insert((family, j), SparseOp::from_triplets(k, entries)?);
        }
    }
    let mut omega_hat = DVector::zeros(k);
    omega_hat[0] = Complex64::new(1.0, 0.0);
    Ok((out, omega_hat))
}

/// Solves the Vandermonde systems for x_j^±, h_j with 0 ≤ j < r, both on the
/// whole sector and on the eigenspace. Generators are needed up to j = r,
/// which serves as the out-of-sample reconstruction check.
pub fn build_sl2<T: RealCoeff + ExactLift, const N: usize>(
    gens: &LoopGenerators<Cyclotomic<T, N>>,
    roots: RootSet,
    tol: f64,
) -> Result<Sl2Decomposition> {
    let r = roots.roots.len();
    let v = CMatrix::from_fn(r, r, |j, m| roots.roots[m].powi(j as i32));
    let sv = v.clone().singular_values();
    let condition = sv.max() / sv.min();
    if !condition.is_finite() || condition > 1.0 / tol {
        return Err(Error::Numeric(format!("Vandermonde condition number {condition:.3e} exceeds 1/tol")));
    }

    let mut generators = BTreeMap::new();
    for family in [Family::XMinus, Family::XPlus, Family::H] {
        for j in 0..=r as i64 {
            generators.insert((family, j), lift_op(gens.require(family, j)?));
        }
    }
    let ground = gens.ground_positions();
    let mut omega = DVector::zeros(gens.dim());
    omega[ground.0] = Complex64::new(1.0, 0.0);
    let full = Triples::solve(&generators, &roots, omega);
    let (restricted, omega_hat) = restrict_to_eigenspace(gens, r)?;
    let space = Triples::solve(&restricted, &roots, omega_hat);
    Ok(Sl2Decomposition { roots, condition, ground, full, space })
}

/// The span of ∏_{m∈S} E_m⁻|Ω⟩ over all subsets S, on the whole sector.
#[derive(Clone, Debug)]
pub struct Eigenspace {
    pub rank: usize,
    /// Orthonormal columns.
    pub basis: CMatrix,
    pub singular_values: Vec<f64>,
}

pub fn generate_eigenspace(dec: &Sl2Decomposition, tol: f64) -> Eigenspace {
    let r = dec.r();
    let columns: Vec<DVector<Complex64>> = (0..1usize << r)
        .map(|subset| {
            let mut v = dec.full.omega.clone();
            for m in (0..r).filter(|m| subset >> m & 1 == 1) {
                v = &dec.full.e_minus[m] * v;
            }
            let n = v.norm();
            if n > 0.0 {
                v / Complex64::new(n, 0.0)
            } else {
                v
            }
        })
        .collect();
    let vectors = CMatrix::from_columns(&columns);
    let svd = SVD::new(vectors, true, false);
    let sigma_max = svd.singular_values.max();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singular_values: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let rank = singular_values.iter().filter(|&&s| s > tol * sigma_max).count();
    let u = svd.u.expect("left singular vectors requested");
    let basis = CMatrix::from_columns(&order[..rank].iter().map(|&k| u.column(k).into_owned()).collect::<Vec<_>>());
    Eigenspace { rank, basis, singular_values }
}

fn sl2_params(res: &mut CheckResult, dec: &Sl2Decomposition, tol: f64) {
    res.params.insert("r".into(), json!(dec.r()));
    res.params.insert("tol".into(), json!(tol));
}

pub fn verify_eigenspace_rank(dec: &Sl2Decomposition, space: &Eigenspace, tol: f64) -> CheckResult {
    CheckResult::timed("sl2.eigenspace", |res| {
        sl2_params(res, dec, tol);
        let expected = 1usize << dec.r();
        res.observe("rank", json!(space.rank));
        res.observe("singular_values", json!(space.singular_values));
        if space.rank != expected {
            res.fail(json!({ "rank": space.rank, "expected": expected }));
        }
    })
}

/// ‖XY − YX − c·E‖ relative to the size of the terms.
fn relation_residual(x: &CMatrix, y: &CMatrix, expected: Option<(&CMatrix, f64)>) -> f64 {
    let xy = x * y;
    let yx = y * x;
    let mut diff = &xy - &yx;
    let mut scale = xy.norm().max(yx.norm()).max(1.0);
    if let Some((e, c)) = expected {
        let ce = e * Complex64::new(c, 0.0);
        scale = scale.max(ce.norm());
        diff -= ce;
    }
    diff.norm() / scale
}

fn max_relation_residual(t: &Triples, mut on_fail: impl FnMut(usize, usize, &'static str, f64)) -> f64 {
    let r = t.e_minus.len();
    let mut worst = 0.0f64;
    for m in 0..r {
        for n in 0..r {
            let d = if m == n { 1.0 } else { 0.0 };
            let rels = [
                ("[E+_m, E-_n] = d H_m", &t.e_plus[m], &t.e_minus[n], &t.h[m], d),
                ("[H_m, E-_n] = 2d E-_m", &t.h[m], &t.e_minus[n], &t.e_minus[m], 2.0 * d),
                ("[H_m, E+_n] = -2d E+_m", &t.h[m], &t.e_plus[n], &t.e_plus[m], -2.0 * d),
            ];
            for (name, x, y, e, c) in rels {
                let res = relation_residual(x, y, (c != 0.0).then_some((e, c)));
                worst = worst.max(res);
                on_fail(m, n, name, res);
            }
        }
    }
    worst
}

/// [E_m⁺, E_n⁻] = δ_mn H_m, [H_m, E_n⁻] = 2δ_mn E_m⁻, [H_m, E_n⁺] = −2δ_mn E_m⁺
/// on the eigenspace. The residual of the same relations on the whole
/// sector is recorded alongside.
pub fn verify_sl2_relations(dec: &Sl2Decomposition, tol: f64) -> CheckResult {
    CheckResult::timed("sl2.relations", |res| {
        sl2_params(res, dec, tol);
        let mut first = None;
        let worst = max_relation_residual(&dec.space, |m, n, name, r| {
            if r >= tol && first.is_none() {
                first = Some(json!({ "m": m + 1, "n": n + 1, "relation": name, "residual": r }));
            }
        });
        res.observe("max_residual", json!(worst));
        res.observe("max_residual_full_sector", json!(max_relation_residual(&dec.full, |_, _, _, _| {})));
        if let Some(w) = first {
            res.fail(w);
        }
    })
}

/// (E_m⁻)²|Ω⟩ = 0 for every m. The weights H_m|Ω⟩ = w_m|Ω⟩ are recorded.
pub fn verify_nilpotency(dec: &Sl2Decomposition, tol: f64) -> CheckResult {
    CheckResult::timed("sl2.nilpotency", |res| {
        sl2_params(res, dec, tol);
        let t = &dec.space;
        let mut norms = Vec::new();
        let mut weights = Vec::new();
        for m in 0..dec.r() {
            let once = &t.e_minus[m] * &t.omega;
            let twice = &t.e_minus[m] * &once;
            let scale = once.norm().max(1.0) * t.e_minus[m].norm().max(1.0);
            norms.push(twice.norm());
            if twice.norm() >= tol * scale && !res.failed() {
                res.fail(json!({ "m": m + 1, "norm": twice.norm() }));
            }
            let hv = &t.h[m] * &t.omega;
            let w = hv.dot(&t.omega);
            let off = (&hv - &t.omega * w).norm();
            weights.push(json!({ "m": m + 1, "weight": [w.re, w.im], "off_diagonal": off }));
        }
        res.observe("norms", json!(norms));
        res.observe("h_weights", json!(weights));
    })
}

/// Σ_m z_m^j E_m^± and Σ_m z_m^j H_m against x_j^±, h_j on the eigenspace
/// for 0 ≤ j ≤ r; j = r is not used in the solve. The whole-sector residual
/// for j < r is recorded.
pub fn verify_reconstruction(dec: &Sl2Decomposition, tol: f64) -> CheckResult {
    CheckResult::timed("sl2.reconstruction", |res| {
        sl2_params(res, dec, tol);
        res.observe("vandermonde_condition", json!(dec.condition));
        let roots = &dec.roots.roots;
        let r = dec.r() as i64;
        let mut worst = 0.0f64;
        let mut worst_full = 0.0f64;
        for family in [Family::XMinus, Family::XPlus, Family::H] {
            for j in 0..=r {
                let target = dec.space.generator(family, j).expect("built with the decomposition");
                let rel = (dec.space.reassemble(roots, family, j) - target).norm() / target.norm().max(1.0);
                worst = worst.max(rel);
                if rel >= tol && !res.failed() {
                    res.fail(json!({ "generator": family.symbol(), "j": j, "residual": rel }));
                }
                if j < r {
                    let target = dec.full.generator(family, j).expect("built with the decomposition");
                    let rel = (dec.full.reassemble(roots, family, j) - target).norm() / target.norm().max(1.0);
                    worst_full = worst_full.max(rel);
                }
            }
        }
        res.observe("max_residual", json!(worst));
        res.observe("max_residual_full_sector", json!(worst_full));
    })
}

/// Every eigenspace vector is an eigenvector of τ₂(t*)|_{Q=0} with the
/// ground-state eigenvalue, for each sample t*.
pub fn verify_eigenvectors(tau: &[CMatrix], cfg: &LatticeConfig, space: &Eigenspace, samples: &[Complex64], tol: f64) -> CheckResult {
    CheckResult::timed("sl2.eigenvectors", |res| {
        res.params.insert("N".into(), json!(cfg.n));
        res.params.insert("L".into(), json!(cfg.l));
        let mut worst = 0.0f64;
        for &t in samples {
            let m = eval_matrix_poly(tau, t);
            let eps = ground_eigenvalue(cfg.n, cfg.l, 0, t);
            let lhs = &m * &space.basis;
            let rel = (&lhs - &space.basis * eps).norm() / lhs.norm().max(1.0);
            worst = worst.max(rel);
            if rel >= tol && !res.failed() {
                res.fail(json!({ "t": [t.re, t.im], "residual": rel }));
            }
        }
        res.observe("max_residual", json!(worst));
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumRow {
    pub t: Complex64,
    pub q: usize,
    pub eigenvalue: Complex64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    pub rows: Vec<SpectrumRow>,
    /// (1 − ωt*)^L + ω^{−Q}(1 − t*)^L.
    pub target: Complex64,
    /// Eigenvalues within the cluster tolerance of `target`.
    pub target_multiplicity: usize,
    /// dim ker(τ₂(t*) − target) by singular-value threshold.
    pub target_geometric: usize,
}

/// Eigenvalues of τ₂(t*)|_Q on the charge-0 sector, grouped into clusters
/// of relative width `cluster_tol`.
pub fn spectrum(tau: &[CMatrix], cfg: &LatticeConfig, t: Complex64, cluster_tol: f64, rank_tol: f64) -> Result<Spectrum> {
    if cfg.dim() > SPECTRUM_MAX_DIM {
        return Err(Error::Config(format!("N^L = {} exceeds the dense limit {SPECTRUM_MAX_DIM}", cfg.dim())));
    }
    let m = eval_matrix_poly(tau, t);
    let dim = m.nrows();
    let eig = Schur::new(m.clone())
        .eigenvalues()
        .ok_or_else(|| Error::Numeric("Schur decomposition did not converge".into()))?;
    let mut values: Vec<Complex64> = eig.iter().copied().collect();
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let close = |a: Complex64, b: Complex64| (a - b).norm() <= cluster_tol * a.norm().max(b.norm()).max(1.0);

    let mut parent: Vec<usize> = (0..values.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            if close(values[i], values[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut clusters: BTreeMap<usize, Vec<Complex64>> = BTreeMap::new();
    for i in 0..values.len() {
        let root = find(&mut parent, i);
        clusters.entry(root).or_default().push(values[i]);
    }
    let rows = clusters
        .into_values()
        .map(|members| {
            let mean = members.iter().sum::<Complex64>() / members.len() as f64;
            SpectrumRow { t, q: cfg.q, eigenvalue: mean, multiplicity: members.len() }
        })
        .collect();

    let target = ground_eigenvalue(cfg.n, cfg.l, cfg.q, t);
    let target_multiplicity = values.iter().filter(|&&v| close(v, target)).count();
    let shifted = m - CMatrix::identity(dim, dim) * target;
    let sv = shifted.singular_values();
    let smax = sv.max().max(1.0);
    let target_geometric = sv.iter().filter(|&&s| s <= rank_tol * smax).count();
    Ok(Spectrum { rows, target, target_multiplicity, target_geometric })
}

/// Dense multiplicity of the ground-state eigenvalue against the
/// eigenspace rank, for each sample t*.
pub fn verify_spectrum_multiplicity(
    tau: &[CMatrix],
    cfg: &LatticeConfig,
    expected: usize,
    samples: &[Complex64],
    cluster_tol: f64,
    rank_tol: f64,
) -> CheckResult {
    CheckResult::timed("spectrum.multiplicity", |res| {
        res.params.insert("N".into(), json!(cfg.n));
        res.params.insert("L".into(), json!(cfg.l));
        res.params.insert("Q".into(), json!(cfg.q));
        let mut seen = Vec::new();
        for &t in samples {
            match spectrum(tau, cfg, t, cluster_tol, rank_tol) {
                Ok(s) => {
                    seen.push(json!({
                        "t": [t.re, t.im],
                        "algebraic": s.target_multiplicity,
                        "geometric": s.target_geometric,
                    }));
                    if (s.target_multiplicity != expected || s.target_geometric != expected) && !res.failed() {
                        res.fail(json!({
                            "t": [t.re, t.im],
                            "algebraic": s.target_multiplicity,
                            "geometric": s.target_geometric,
                            "expected": expected,
                        }));
                    }
                }
                Err(e) => return res.fail(json!({ "t": [t.re, t.im], "error": e.to_string() })),
            }
        }
        res.observe("multiplicities", json!(seen));
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drinfeld::lambda_coefficients;
    use crate::loop_algebra::{base_generators, extend_generators};
    use num_rational::BigRational;

    fn data(n: usize, l: usize) -> DrinfeldData {
        lambda_coefficients(&LatticeConfig::new(n, l, 0).unwrap()).unwrap()
    }

    #[test]
    fn quadratic_roots() {
        let rs = drinfeld_roots(&data(3, 3), DEFAULT_TOL).unwrap();
        let s5 = 5f64.sqrt();
        assert!((rs.roots[0].re - (-7.0 - 3.0 * s5) / 2.0).abs() < 1e-12);
        assert!((rs.roots[1].re - (-7.0 + 3.0 * s5) / 2.0).abs() < 1e-12);
        assert!(rs.roots.iter().all(|z| z.im.abs() < 1e-12));
        let prod = rs.roots[0] * rs.roots[1];
        assert!((prod - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn repeated_roots_abort() {
        let d = DrinfeldData { r: 2, lambdas: vec![1, 2, 1] };
        assert!(matches!(drinfeld_roots(&d, DEFAULT_TOL), Err(Error::Numeric(_))));
    }

    #[test]
    fn n3_roots_are_negative() {
        let rs = drinfeld_roots(&data(3, 6), DEFAULT_TOL).unwrap();
        assert_eq!(rs.roots.len(), 4);
        assert!(rs.roots.iter().all(|z| z.re < 0.0 && z.im.abs() < 1e-9));
    }

    #[test]
    fn ground_eigenvalue_at_zero() {
        let e = ground_eigenvalue(3, 3, 1, Complex64::new(0.0, 0.0));
        let w = Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        assert!((e - (1.0 + w.powi(-1))).norm() < 1e-14);
    }

    fn pipeline(n3l: usize) -> (Sl2Decomposition, Eigenspace, Vec<CMatrix>, LatticeConfig) {
        let cfg = LatticeConfig::new(3, n3l, 0).unwrap();
        let d = lambda_coefficients(&cfg).unwrap();
        let mut g = base_generators::<BigRational, 3>(&cfg).unwrap();
        assert!(extend_generators(&mut g, -1, d.r as i64 + 1).passed());
        let dec = build_sl2(&g, drinfeld_roots(&d, DEFAULT_TOL).unwrap(), DEFAULT_TOL).unwrap();
        let space = generate_eigenspace(&dec, DEFAULT_TOL);
        let tau = embed_tau2::<BigRational, 3>(&cfg).unwrap();
        (dec, space, tau, cfg)
    }

    #[test]
    fn n3_l3_decomposition() {
        let (dec, space, tau, cfg) = pipeline(3);
        assert_eq!(space.rank, 4);
        for r in [
            verify_eigenspace_rank(&dec, &space, DEFAULT_TOL),
            verify_sl2_relations(&dec, DEFAULT_TOL),
            verify_nilpotency(&dec, DEFAULT_TOL),
            verify_reconstruction(&dec, DEFAULT_TOL),
        ] {
            assert!(r.passed(), "{r:?}");
        }
        let samples = [Complex64::new(0.5, 0.0), Complex64::new(0.3, 0.2)];
        let r = verify_eigenvectors(&tau, &cfg, &space, &samples, DEFAULT_TOL);
        assert!(r.passed(), "{r:?}");
        let r = verify_spectrum_multiplicity(&tau, &cfg, 4, &samples, 1e-6, DEFAULT_TOL);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn spectrum_at_zero_is_one_cluster() {
        let cfg = LatticeConfig::new(3, 3, 1).unwrap();
        let tau = embed_tau2::<BigRational, 3>(&cfg).unwrap();
        let s = spectrum(&tau, &cfg, Complex64::new(0.0, 0.0), 1e-6, DEFAULT_TOL).unwrap();
        assert_eq!(s.rows.len(), 1);
        assert_eq!(s.rows[0].multiplicity, 9);
        assert_eq!(s.target_multiplicity, 9);
    }
}
