//! Site operators, face operators, the monodromy matrix and τ₂(t).
//!
//! The monodromy is the ordered 2×2 product U(t) = u₁u₂⋯u_L of face
//! operators. Its blocks are stored as polynomials in the bare variable t;
//! the coefficient accessors convert to the expansion in powers of (−ωt)
//! used for the closed-form boundary coefficients.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde_json::json;

use crate::check::CheckResult;
use crate::cyclotomic::{q_integer, Cyclotomic};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{Field, Ring};
use crate::sparse::{OpPoly, SparseOp};
use crate::state::{digits, site_stride, LatticeConfig, Sector};

type Op<T, const N: usize> = SparseOp<Cyclotomic<T, N>>;
type OpP<T, const N: usize> = OpPoly<Cyclotomic<T, N>>;

fn check_site(cfg: &LatticeConfig, j: usize) -> Result<()> {
    if (1..=cfg.l).contains(&j) {
        Ok(())
    } else {
        Err(Error::OutOfRange { index: j, limit: cfg.l })
    }
}

#[inline]
fn site_value(rank: usize, stride: usize, n: usize) -> usize {
    (rank / stride) % n
}

/// Z at site j: Z|m⟩ = ω^m|m⟩.
pub fn site_z<T: Ring, const N: usize>(cfg: &LatticeConfig, j: usize) -> Result<Op<T, N>> {
    cfg.check_order::<N>()?;
    check_site(cfg, j)?;
    let stride = site_stride(cfg, j);
    let powers: Vec<Cyclotomic<T, N>> = (0..N).map(|k| Cyclotomic::omega_pow(k as i64)).collect();
    Ok(SparseOp::diagonal(cfg.dim(), |r| powers[site_value(r, stride, N)].clone()))
}

/// X at site j: X|m⟩ = |m+1 mod N⟩.
pub fn site_x<T: Ring, const N: usize>(cfg: &LatticeConfig, j: usize) -> Result<Op<T, N>> {
    cfg.check_order::<N>()?;
    check_site(cfg, j)?;
    let stride = site_stride(cfg, j);
    Ok(SparseOp::from_column_fn(cfg.dim(), |r, push| {
        let m = site_value(r, stride, N);
        let target = if m + 1 < N { r + stride } else { r - m * stride };
        push(target, Cyclotomic::one());
    }))
}

/// e at site j: e|0⟩ = 0, e|n⟩ = [n]|n−1⟩.
pub fn lowering_e<T: Ring, const N: usize>(cfg: &LatticeConfig, j: usize) -> Result<Op<T, N>> {
    cfg.check_order::<N>()?;
    check_site(cfg, j)?;
    let stride = site_stride(cfg, j);
    let q: Vec<Cyclotomic<T, N>> = (0..N).map(q_integer).collect();
    Ok(SparseOp::from_column_fn(cfg.dim(), |r, push| {
        let m = site_value(r, stride, N);
        if m >= 1 {
            push(r - stride, q[m].clone());
        }
    }))
}

/// f at site j: f|N−1⟩ = 0, f|n⟩ = [n+1]|n+1⟩.
pub fn raising_f<T: Ring, const N: usize>(cfg: &LatticeConfig, j: usize) -> Result<Op<T, N>> {
    cfg.check_order::<N>()?;
    check_site(cfg, j)?;
    let stride = site_stride(cfg, j);
    let q: Vec<Cyclotomic<T, N>> = (0..=N).map(q_integer).collect();
    Ok(SparseOp::from_column_fn(cfg.dim(), |r, push| {
        let m = site_value(r, stride, N);
        if m + 1 < N {
            push(r + stride, q[m + 1].clone());
        }
    }))
}

/// ∏ Z_m over the given sites.
pub fn z_product<T: Ring, const N: usize>(cfg: &LatticeConfig, sites: impl IntoIterator<Item = usize>) -> Result<Op<T, N>> {
    let sites: Vec<usize> = sites.into_iter().collect();
    for &j in &sites {
        check_site(cfg, j)?;
    }
    let strides: Vec<usize> = sites.iter().map(|&j| site_stride(cfg, j)).collect();
    Ok(SparseOp::diagonal(cfg.dim(), |r| {
        let e: usize = strides.iter().map(|&s| site_value(r, s, N)).sum();
        Cyclotomic::omega_pow(e as i64)
    }))
}

fn one_minus_omega<T: Ring, const N: usize>() -> Cyclotomic<T, N> {
    Cyclotomic::one() - Cyclotomic::omega()
}

/// Local 2×2 operator u_j with entries polynomial in t.
pub type FaceOperator<S> = [[OpPoly<S>; 2]; 2];

/// u_j = [[1 − ωtZ_j, −ωt(1−ω)f_j], [(1−ω)e_j, ω(Z_j − t)]].
pub fn face_operator<T: Ring, const N: usize>(cfg: &LatticeConfig, j: usize) -> Result<FaceOperator<Cyclotomic<T, N>>> {
    let dim = cfg.dim();
    let w = Cyclotomic::<T, N>::omega();
    let om = one_minus_omega::<T, N>();
    let id = SparseOp::identity(dim);
    let z = site_z::<T, N>(cfg, j)?;
    let e = lowering_e::<T, N>(cfg, j)?;
    let f = raising_f::<T, N>(cfg, j)?;
    Ok([
        [
            OpPoly::linear(id.clone(), z.scale(&-w.clone())),
            OpPoly::linear(SparseOp::zero(dim), f.scale(&-(w.clone() * om.clone()))),
        ],
        [
            OpPoly::constant(e.scale(&om)),
            OpPoly::linear(z.scale(&w), id.scale(&-w.clone())),
        ],
    ])
}

/// The four blocks of U(t) = u₁⋯u_L.
#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyBlocks<S> {
    pub a: OpPoly<S>,
    pub b: OpPoly<S>,
    pub c: OpPoly<S>,
    pub d: OpPoly<S>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    A,
    B,
    C,
    D,
}

impl<T: Ring, const N: usize> MonodromyBlocks<Cyclotomic<T, N>> {
    pub fn block(&self, which: Block) -> &OpP<T, N> {
        match which {
            Block::A => &self.a,
            Block::B => &self.b,
            Block::C => &self.c,
            Block::D => &self.d,
        }
    }

    /// Coefficient X_j in the expansion X(t) = Σ_j (−ωt)^j X_j.
    pub fn coefficient(&self, which: Block, j: usize) -> Op<T, N> {
        let sign = if j % 2 == 0 { Cyclotomic::one() } else { -Cyclotomic::<T, N>::one() };
        let factor = sign * Cyclotomic::omega_pow(-(j as i64));
        self.block(which).coeff(j).scale(&factor)
    }
}

/// Ordered product u₁u₂⋯u_L.
pub fn monodromy<T: Ring, const N: usize>(cfg: &LatticeConfig) -> Result<MonodromyBlocks<Cyclotomic<T, N>>> {
    cfg.check_order::<N>()?;
    let [[mut a, mut b], [mut c, mut d]] = face_operator::<T, N>(cfg, 1)?;
    for j in 2..=cfg.l {
        let [[u00, u01], [u10, u11]] = face_operator::<T, N>(cfg, j)?;
        let na = a.mul(&u00).add(&b.mul(&u10));
        let nb = a.mul(&u01).add(&b.mul(&u11));
        let nc = c.mul(&u00).add(&d.mul(&u10));
        let nd = c.mul(&u01).add(&d.mul(&u11));
        (a, b, c, d) = (na, nb, nc, nd);
    }
    Ok(MonodromyBlocks { a, b, c, d })
}

/// Closed forms of the extreme coefficients of A, B, C, D.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCoefficients<S> {
    pub a0: SparseOp<S>,
    pub a_l: SparseOp<S>,
    pub d0: SparseOp<S>,
    pub d_l: SparseOp<S>,
    pub b_l: SparseOp<S>,
    pub b1: SparseOp<S>,
    pub c0: SparseOp<S>,
    pub c_lm1: SparseOp<S>,
}

pub fn boundary_coefficients<T: Ring, const N: usize>(cfg: &LatticeConfig) -> Result<BoundaryCoefficients<Cyclotomic<T, N>>> {
    cfg.check_order::<N>()?;
    let l = cfg.l;
    let dim = cfg.dim();
    let om = one_minus_omega::<T, N>();
    let all_z = z_product::<T, N>(cfg, 1..=l)?;
    let mut b_l = SparseOp::zero(dim);
    let mut b1 = SparseOp::zero(dim);
    let mut c0 = SparseOp::zero(dim);
    let mut c_lm1 = SparseOp::zero(dim);
    for j in 1..=l {
        let before = z_product::<T, N>(cfg, 1..j)?;
        let after = z_product::<T, N>(cfg, j + 1..=l)?;
        let f = raising_f::<T, N>(cfg, j)?;
        let e = lowering_e::<T, N>(cfg, j)?;
        b_l = b_l.add(&before.mul(&f));
        b1 = b1.add(&f.mul(&after).scale(&Cyclotomic::omega_pow((l - j) as i64)));
        c0 = c0.add(&before.mul(&e).scale(&Cyclotomic::omega_pow(j as i64 - 1)));
        c_lm1 = c_lm1.add(&e.mul(&after));
    }
    Ok(BoundaryCoefficients {
        a0: SparseOp::identity(dim),
        d0: all_z.scale(&Cyclotomic::omega_pow(l as i64)),
        a_l: all_z,
        d_l: SparseOp::identity(dim),
        b_l: b_l.scale(&om),
        b1: b1.scale(&om),
        c0: c0.scale(&om),
        c_lm1: c_lm1.scale(&om),
    })
}

/// Compares the closed-form extreme coefficients with those extracted from
/// the explicit product u₁⋯u_L.
pub fn verify_boundary<T: Ring, const N: usize>(cfg: &LatticeConfig) -> CheckResult {
    CheckResult::timed("monodromy.boundary", |res| {
        res.params.insert("N".into(), json!(cfg.n));
        res.params.insert("L".into(), json!(cfg.l));
        let (m, bc) = match (monodromy::<T, N>(cfg), boundary_coefficients::<T, N>(cfg)) {
            (Ok(m), Ok(bc)) => (m, bc),
            (Err(e), _) | (_, Err(e)) => {
                res.fail(json!({ "error": e.to_string() }));
                return;
            }
        };
        let l = cfg.l;
        let zero = SparseOp::zero(cfg.dim());
        let cases: [(&str, Block, usize, &Op<T, N>); 10] = [
            ("A_0", Block::A, 0, &bc.a0),
            ("A_L", Block::A, l, &bc.a_l),
            ("D_0", Block::D, 0, &bc.d0),
            ("D_L", Block::D, l, &bc.d_l),
            ("B_0", Block::B, 0, &zero),
            ("B_L", Block::B, l, &bc.b_l),
            ("B_1", Block::B, 1, &bc.b1),
            ("C_L", Block::C, l, &zero),
            ("C_0", Block::C, 0, &bc.c0),
            ("C_{L-1}", Block::C, l - 1, &bc.c_lm1),
        ];
        for (name, block, j, expect) in cases {
            if let Some((row, col)) = m.coefficient(block, j).first_difference(expect) {
                res.fail(json!({ "coefficient": name, "row": row, "col": col }));
                return;
            }
        }
        for (name, block, max) in [("A", Block::A, l), ("B", Block::B, l), ("C", Block::C, l - 1), ("D", Block::D, l)] {
            if m.block(block).degree().is_some_and(|d| d > max) {
                res.fail(json!({ "block": name, "degree": m.block(block).degree() }));
                return;
            }
        }
    })
}

/// A and D preserve the charge Σn_j mod N, B raises it by one and C lowers it
/// by one, coefficient by coefficient.
pub fn verify_grading<T: Ring, const N: usize>(cfg: &LatticeConfig) -> CheckResult {
    CheckResult::timed("monodromy.grading", |res| {
        res.params.insert("N".into(), json!(cfg.n));
        res.params.insert("L".into(), json!(cfg.l));
        let m = match monodromy::<T, N>(cfg) {
            Ok(m) => m,
            Err(e) => {
                res.fail(json!({ "error": e.to_string() }));
                return;
            }
        };
        let charge = |r: usize| crate::state::charge_of_rank(r, cfg);
        for (name, block, shift) in [("A", Block::A, 0), ("B", Block::B, 1), ("C", Block::C, N - 1), ("D", Block::D, 0)] {
            for (k, op) in m.block(block).coeffs().iter().enumerate() {
                match op.charge_shift(charge, N) {
                    Some(Some(s)) if s != shift => {
                        res.fail(json!({ "block": name, "t_power": k, "shift": s, "expected": shift }));
                        return;
                    }
                    None => {
                        res.fail(json!({ "block": name, "t_power": k, "reason": "mixed charge shifts" }));
                        return;
                    }
                    _ => {}
                }
            }
        }
    })
}

/// τ₂(t)|_Q = A(t) + ω^{−Q} D(t).
pub fn tau2_from_blocks<T: Ring, const N: usize>(blocks: &MonodromyBlocks<Cyclotomic<T, N>>, q: usize) -> OpP<T, N> {
    blocks.a.add(&blocks.d.scale(&Cyclotomic::omega_pow(-(q as i64))))
}

pub fn tau2_edge<T: Ring, const N: usize>(cfg: &LatticeConfig) -> Result<OpP<T, N>> {
    Ok(tau2_from_blocks(&monodromy::<T, N>(cfg)?, cfg.q))
}

/// ε_Q(t) = (1 − ωt)^L + ω^Q (1 − t)^L.
pub fn epsilon<T: Ring, const N: usize>(l: usize, q: i64) -> Poly<Cyclotomic<T, N>> {
    let one = Cyclotomic::<T, N>::one();
    let a = Poly::linear(one.clone(), -Cyclotomic::omega()).pow(l as u32);
    let d = Poly::linear(one.clone(), -one).pow(l as u32);
    &a + &d.scale(&Cyclotomic::omega_pow(q))
}

/// A(t), D(t) on |Ω⟩ and |Ω̄⟩, and τ₂(t)|_Q on both for every Q, as exact
/// polynomial identities in t:
/// A|Ω⟩ = (1 − ωt)^L|Ω⟩, D|Ω⟩ = (1 − t)^L|Ω⟩, with the two factors swapped
/// on |Ω̄⟩. Needs N | L, where D₀ is the identity on the charge-0 sector.
pub fn verify_ground_states<T: Ring, const N: usize>(cfg: &LatticeConfig) -> CheckResult {
    CheckResult::timed("eigen.ground_states", |res| {
        res.params.insert("N".into(), json!(cfg.n));
        res.params.insert("L".into(), json!(cfg.l));
        let blocks = match cfg.check_order::<N>().and_then(|_| monodromy::<T, N>(cfg)) {
            Ok(b) => b,
            Err(e) => return res.fail(json!({ "error": e.to_string() })),
        };
        if cfg.l % cfg.n != 0 {
            res.status = crate::check::Status::Skip;
            res.reason = Some(crate::loop_algebra::SKIP_NOT_MULTIPLE.into());
            return;
        }
        let one = Cyclotomic::<T, N>::one();
        let a_factor = Poly::linear(one.clone(), -Cyclotomic::omega()).pow(cfg.l as u32);
        let d_factor = Poly::linear(one.clone(), -one).pow(cfg.l as u32);
        let (omega, omega_bar) = crate::state::ground_states::<Cyclotomic<T, N>>(cfg);
        let mut cases: Vec<(String, OpP<T, N>, Poly<Cyclotomic<T, N>>, bool)> = vec![
            ("A|Ω>".into(), blocks.a.clone(), a_factor.clone(), false),
            ("D|Ω>".into(), blocks.d.clone(), d_factor.clone(), false),
            ("A|Ω̄>".into(), blocks.a.clone(), d_factor.clone(), true),
            ("D|Ω̄>".into(), blocks.d.clone(), a_factor.clone(), true),
        ];
        for q in 0..N {
            let phase = Cyclotomic::<T, N>::omega_pow(-(q as i64));
            let tau = tau2_from_blocks(&blocks, q);
            cases.push((format!("tau2|Q={q} |Ω>"), tau.clone(), epsilon::<T, N>(cfg.l, -(q as i64)), false));
            cases.push((format!("tau2|Q={q} |Ω̄>"), tau, &d_factor + &a_factor.scale(&phase), true));
        }
        for (name, op, eigen, bar) in &cases {
            let v = if *bar { &omega_bar } else { &omega };
            if let Some(power) = crate::sparse::vector_poly_matches(&op.apply(v), eigen, v) {
                return res.fail(json!({ "identity": name, "t_power": power }));
            }
        }
        res.observe("identities", json!(cases.len()));
    })
}

/// Largest spin space the Fourier cross-check will build.
pub const FOURIER_MAX_DIM: usize = 3000;

/// Weight 𝒰(a, b, c, d) of one face in spin variables, as a polynomial in t.
fn spin_face_weight<T: Ring, const N: usize>(a: usize, b: usize, c: usize, d: usize) -> Option<Poly<Cyclotomic<T, N>>> {
    let w = |k: i64| Cyclotomic::<T, N>::omega_pow(k);
    let one = Cyclotomic::<T, N>::one();
    let n = ((a + N - b) % N) as i64;
    let alpha = (a + N - d) % N;
    let beta = (b + N - c) % N;
    match (alpha, beta) {
        (0, 0) => Some(Poly::linear(one, -w(n + 1))),
        (0, 1) => Some(Poly::linear(Cyclotomic::zero(), w(1) * (w(n + 1) - one))),
        (1, 0) => Some(Poly::constant(one - w(n))),
        (1, 1) => Some(Poly::linear(w(1) * w(n), -w(1))),
        _ => None,
    }
}

/// Spin configuration (σ₁…σ_L) from σ₁ and periodic edge variables.
fn spins_from_edges(s1: usize, edges: &[usize], n: usize) -> Vec<usize> {
    let mut s = Vec::with_capacity(edges.len());
    let mut cur = s1;
    for &e in edges {
        s.push(cur);
        cur = (cur + n - e) % n;
    }
    s
}

fn spin_rank(spins: &[usize], n: usize) -> usize {
    spins.iter().fold(0, |acc, &s| acc * n + s)
}

/// Builds τ₂ on spin space from face weights, Fourier transforms the σ₁
/// dependence and compares every Q block with the edge-space τ₂|_Q on the
/// periodic (charge-0) sector. Also checks that distinct Q blocks do not mix
/// and that the spin shift acts as ω^Q on each Fourier vector.
pub fn fourier_consistency<T: Field, const N: usize>(cfg: &LatticeConfig) -> CheckResult {
    CheckResult::timed("fourier.consistency", |res| {
        res.params.insert("N".into(), json!(cfg.n));
        res.params.insert("L".into(), json!(cfg.l));
        if let Err(e) = cfg.check_order::<N>() {
            res.fail(json!({ "error": e.to_string() }));
            return;
        }
        if cfg.dim() > FOURIER_MAX_DIM {
            res.status = crate::check::Status::Skip;
            res.reason = Some(format!("N^L = {} exceeds {FOURIER_MAX_DIM}", cfg.dim()));
            return;
        }
        let l = cfg.l;
        let dim = cfg.dim();
        // spin-space matrix: only σ' = σ − α with α ∈ {0,1}^L can contribute
        let mut spin: HashMap<(usize, usize), Poly<Cyclotomic<T, N>>> = HashMap::new();
        for col in 0..dim {
            let sigma = digits(col, cfg);
            for mask in 0..(1usize << l) {
                let sp: Vec<usize> = (0..l).map(|k| (sigma[k] + N - ((mask >> (l - 1 - k)) & 1)) % N).collect();
                let mut w = Poly::constant(Cyclotomic::<T, N>::one());
                let mut alive = true;
                for jj in 0..l {
                    let nx = (jj + 1) % l;
                    match spin_face_weight::<T, N>(sigma[jj], sigma[nx], sp[nx], sp[jj]) {
                        Some(p) => w = &w * &p,
                        None => {
                            alive = false;
                            break;
                        }
                    }
                }
                if alive && !w.is_zero() {
                    let row = spin_rank(&sp, N);
                    let slot = spin.entry((row, col)).or_insert_with(Poly::zero);
                    *slot = &*slot + &w;
                }
            }
        }
        let sector = Sector::new(cfg, 0);
        let inv_n = Cyclotomic::<T, N>::from_int(N as i64).inverse().expect("N is invertible");
        let w = |k: i64| Cyclotomic::<T, N>::omega_pow(k);
        let edges: Vec<Vec<usize>> = sector.basis().iter().map(|&r| digits(r, cfg)).collect();
        // block[(Q', Q)] as OpPoly over the sector
        for q_out in 0..N {
            for q_in in 0..N {
                let mut entries: Vec<Vec<(usize, usize, Cyclotomic<T, N>)>> = Vec::new();
                for (pc, n_in) in edges.iter().enumerate() {
                    for (pr, n_out) in edges.iter().enumerate() {
                        let mut acc: Poly<Cyclotomic<T, N>> = Poly::zero();
                        for s1 in 0..N {
                            let col = spin_rank(&spins_from_edges(s1, n_in, N), N);
                            for s1p in 0..N {
                                let row = spin_rank(&spins_from_edges(s1p, n_out, N), N);
                                if let Some(p) = spin.get(&(row, col)) {
                                    let phase = w((q_out * s1p) as i64 - (q_in * s1) as i64);
                                    acc = &acc + &p.scale(&phase);
                                }
                            }
                        }
                        let acc = acc.scale(&inv_n);
                        for (k, c) in acc.coeffs().iter().enumerate() {
                            if entries.len() <= k {
                                entries.resize(k + 1, Vec::new());
                            }
                            if !c.is_zero() {
                                entries[k].push((pr, pc, c.clone()));
                            }
                        }
                    }
                }
                let coeffs = entries
                    .into_iter()
                    .map(|e| SparseOp::from_triplets(sector.len(), e).expect("indices in range"))
                    .collect();
                let block = OpPoly::from_coeffs(sector.len(), coeffs);
                if q_out != q_in {
                    if let Some((k, i, j)) = block.first_difference(&OpPoly::zero(sector.len())) {
                        res.fail(json!({ "block": [q_out, q_in], "t_power": k, "row": i, "col": j, "reason": "Q blocks mix" }));
                        return;
                    }
                    continue;
                }
                let edge_cfg = LatticeConfig { q: q_in, ..*cfg };
                let edge = match tau2_edge::<T, N>(&edge_cfg).and_then(|p| p.restrict(&sector)) {
                    Ok(p) => p,
                    Err(e) => {
                        res.fail(json!({ "error": e.to_string() }));
                        return;
                    }
                };
                if let Some((k, i, j)) = block.first_difference(&edge) {
                    res.fail(json!({ "Q": q_in, "t_power": k, "row": sector.rank_at(i), "col": sector.rank_at(j) }));
                    return;
                }
            }
        }
        // spin shift on Fourier vectors
        for q in 0..N {
            for n_in in &edges {
                let mut v: HashMap<usize, Cyclotomic<T, N>> = HashMap::new();
                let mut shifted: HashMap<usize, Cyclotomic<T, N>> = HashMap::new();
                for s1 in 0..N {
                    let spins = spins_from_edges(s1, n_in, N);
                    let up: Vec<usize> = spins.iter().map(|&s| (s + 1) % N).collect();
                    v.insert(spin_rank(&spins, N), w(-((q * s1) as i64)));
                    shifted.insert(spin_rank(&up, N), w(-((q * s1) as i64)));
                }
                let expect: HashMap<usize, Cyclotomic<T, N>> = v.into_iter().map(|(k, a)| (k, a * w(q as i64))).collect();
                if expect != shifted {
                    res.fail(json!({ "Q": q, "edges": n_in, "reason": "spin shift eigenvalue" }));
                    return;
                }
            }
        }
        res.observe("spin_nonzeros", json!(spin.len()));
    })
}

/// Checks [P_i, R_j] = 0 on sector c for every pair of coefficients, i.e.
/// [P(t), R(t′)] = 0 identically in both variables.
pub fn op_poly_commutator_zero<S: Ring>(p: &OpPoly<S>, r: &OpPoly<S>, sector: &Sector) -> CheckResult {
    CheckResult::timed("oppoly.commutator", |res| {
        res.params.insert("sector".into(), json!(sector.charge));
        let (p, r) = match (p.restrict(sector), r.restrict(sector)) {
            (Ok(p), Ok(r)) => (p, r),
            (Err(e), _) | (_, Err(e)) => {
                res.fail(json!({ "error": e.to_string() }));
                return;
            }
        };
        for (i, pi) in p.coeffs().iter().enumerate() {
            for (j, rj) in r.coeffs().iter().enumerate() {
                let c = pi.commutator(rj);
                if let Some((row, col)) = c.first_difference(&SparseOp::zero(c.dim())) {
                    res.fail(json!({ "i": i, "j": j, "row": row, "col": col }));
                    return;
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{ground_states, StateVector};
    use crate::{Cyclo, IntCyclo};
    use num_rational::BigRational;

    type C3 = Cyclo<3>;

    fn cfg(n: usize, l: usize) -> LatticeConfig {
        LatticeConfig::new(n, l, 0).unwrap()
    }

    #[test]
    fn site_operators_single_site() {
        let c = cfg(3, 1);
        let z = site_z::<BigRational, 3>(&c, 1).unwrap();
        let x = site_x::<BigRational, 3>(&c, 1).unwrap();
        assert_eq!(z.get(2, 2), C3::omega_pow(2));
        assert_eq!(x.get(0, 2), C3::one());
        // Z X = ω X Z
        assert_eq!(z.mul(&x), x.mul(&z).scale(&C3::omega()));
        assert!(site_z::<BigRational, 3>(&c, 2).is_err());
        assert!(site_x::<BigRational, 3>(&c, 0).is_err());
    }

    #[test]
    fn e_and_f_actions() {
        let c = cfg(3, 1);
        let e = lowering_e::<BigRational, 3>(&c, 1).unwrap();
        let f = raising_f::<BigRational, 3>(&c, 1).unwrap();
        assert_eq!(e.get(1, 2), C3::one() + C3::omega());
        assert!(f.column(2).is_empty());
        assert!(e.pow(3).is_zero());
        assert!(f.pow(3).is_zero());
        assert!(!e.pow(2).is_zero());
    }

    #[test]
    fn e_and_f_match_shift_clock_definitions() {
        fn check<const N: usize>(l: usize) {
            let c = LatticeConfig::new(N, l, 0).unwrap();
            let om = Cyclo::<N>::one() - Cyclo::<N>::omega();
            for j in 1..=l {
                let z = site_z::<BigRational, N>(&c, j).unwrap();
                let x = site_x::<BigRational, N>(&c, j).unwrap();
                let x_inv = x.pow(N as u32 - 1);
                let id = SparseOp::identity(c.dim());
                let e = lowering_e::<BigRational, N>(&c, j).unwrap();
                let f = raising_f::<BigRational, N>(&c, j).unwrap();
                assert_eq!(e.scale(&om), x_inv.mul(&id.sub(&z)));
                assert_eq!(f.scale(&om), id.sub(&z).mul(&x));
                // (1−ω)(ef − ω fe) = 1 − ω Z²
                let lhs = e.mul(&f).sub(&f.mul(&e).scale(&Cyclo::<N>::omega())).scale(&om);
                let rhs = id.sub(&z.mul(&z).scale(&Cyclo::<N>::omega()));
                assert_eq!(lhs, rhs, "N={N} j={j}");
            }
        }
        check::<2>(2);
        check::<3>(2);
        check::<4>(2);
        check::<5>(1);
    }

    #[test]
    fn face_operator_entries_on_vacuum() {
        let c = cfg(3, 1);
        let u = face_operator::<BigRational, 3>(&c, 1).unwrap();
        let vac = StateVector::<C3>::basis(0);
        assert_eq!(u[0][0].coeff(0).apply(&vac), vac);
        // ω(Z − t) on |0⟩ = ω − ωt
        let v = u[1][1].apply(&vac);
        assert_eq!(v[0], vac.scale(&C3::omega()));
        assert_eq!(v[1], vac.scale(&-C3::omega()));
        assert!(u[0][1].coeff(0).is_zero());
    }

    #[test]
    fn monodromy_degrees() {
        let c = cfg(3, 3);
        let m = monodromy::<BigRational, 3>(&c).unwrap();
        assert_eq!(m.a.degree(), Some(3));
        assert_eq!(m.d.degree(), Some(3));
        assert!(m.b.degree().unwrap() <= 3);
        assert!(m.c.degree().unwrap() <= 2);
        assert!(m.b.coeff(0).is_zero());
    }

    #[test]
    fn boundary_single_site() {
        let c = cfg(3, 1);
        let bc = boundary_coefficients::<BigRational, 3>(&c).unwrap();
        let f = raising_f::<BigRational, 3>(&c, 1).unwrap();
        assert_eq!(bc.b_l, f.scale(&(C3::one() - C3::omega())));
    }

    #[test]
    fn tau2_on_ground_states() {
        let c = cfg(3, 3);
        let tau = tau2_edge::<BigRational, 3>(&c).unwrap();
        let (o, ob) = ground_states::<C3>(&c);
        let at0 = tau.coeff(0).apply(&o);
        assert_eq!(at0, o.scale(&C3::from_int(2)));
        let eps = epsilon::<BigRational, 3>(3, 0);
        assert_eq!(crate::sparse::vector_poly_matches(&tau.apply(&o), &eps, &o), None);
        assert_eq!(crate::sparse::vector_poly_matches(&tau.apply(&ob), &eps, &ob), None);
    }

    #[test]
    fn integer_and_rational_monodromy_agree() {
        let c = cfg(3, 2);
        let exact = monodromy::<BigRational, 3>(&c).unwrap();
        let int = monodromy::<crate::CheckedI64, 3>(&c).unwrap();
        let lifted: OpPoly<C3> = OpPoly::from_coeffs(
            c.dim(),
            int.a
                .coeffs()
                .iter()
                .map(|op: &SparseOp<IntCyclo<3>>| op.map(|x| x.map_coeffs(|c| BigRational::from_integer(c.0.into()))))
                .collect(),
        );
        assert_eq!(lifted, exact.a);
    }

    #[test]
    fn fourier_smallest_case() {
        let r = fourier_consistency::<BigRational, 2>(&cfg(2, 2));
        assert!(r.passed(), "{r:?}");
    }
    #[test]
    fn boundary_closed_forms_match_product() {
        for l in 1..=4 {
            assert!(verify_boundary::<BigRational, 2>(&cfg(2, l)).passed(), "N=2 L={l}");
        }
        for l in 1..=3 {
            let r = verify_boundary::<BigRational, 3>(&cfg(3, l));
            assert!(r.passed(), "N=3 L={l}: {r:?}");
        }
        assert!(verify_boundary::<crate::CheckedI64, 4>(&cfg(4, 3)).passed());
        assert!(verify_boundary::<crate::CheckedI64, 5>(&cfg(5, 2)).passed());
    }

    #[test]
    fn grading_holds() {
        assert!(verify_grading::<BigRational, 3>(&cfg(3, 3)).passed());
        assert!(verify_grading::<crate::CheckedI64, 4>(&cfg(4, 3)).passed());
    }

    #[test]
    fn fourier_three_states() {
        let r = fourier_consistency::<BigRational, 3>(&cfg(3, 3));
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn ground_state_eigenvalues() {
        assert!(verify_ground_states::<BigRational, 3>(&cfg(3, 3)).passed());
        assert!(verify_ground_states::<crate::CheckedI64, 4>(&cfg(4, 4)).passed());
        assert!(verify_ground_states::<crate::CheckedI64, 2>(&cfg(2, 6)).passed());
        let skipped = verify_ground_states::<crate::CheckedI64, 2>(&cfg(2, 3));
        assert_eq!(skipped.status, crate::check::Status::Skip);
    }

    #[test]
    fn tau2_commutes_on_small_chain() {
        let c = cfg(3, 3);
        let s = Sector::new(&c, 0);
        let tau = tau2_edge::<BigRational, 3>(&c).unwrap();
        assert!(op_poly_commutator_zero(&tau, &tau, &s).passed());
    }
}
