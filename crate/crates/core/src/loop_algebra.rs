//! Loop-algebra generators on the periodic sector and their exact checks.
//!
//! All generators act on the charge-0 block. The base generators come from
//! the divided powers B_L^(N), B₁^(N), C₀^(N), C_{L−1}^(N) with the (1−ω)^N
//! prefactor stripped; higher modes follow from
//! h_m = [x⁺_{m−ℓ}, x⁻_ℓ] and x^±_{m+ℓ} = ∓½[h_m, x^±_ℓ].

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::check::CheckResult;
use crate::cyclotomic::Cyclotomic;
use crate::divided::{boundary_divided_power, divided_power_sector, GenLabel};
use crate::drinfeld::{lambda_alternating, lambda_coefficients, lambda_series, DrinfeldData};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{Field, Ring};
use crate::sparse::{OpPoly, SparseOp};
use crate::state::{ground_state_ranks, LatticeConfig, Sector};
use crate::transfer::{epsilon, monodromy, tau2_edge, tau2_from_blocks, z_product, MonodromyBlocks};

type Op<T, const N: usize> = SparseOp<Cyclotomic<T, N>>;

/// Reason attached to loop-algebra checks on chains with N ∤ L.
pub const SKIP_NOT_MULTIPLE: &str = "L not multiple of N";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    XMinus,
    XPlus,
    H,
}

impl Family {
    pub fn symbol(self) -> &'static str {
        match self {
            Family::XMinus => "x-",
            Family::XPlus => "x+",
            Family::H => "h",
        }
    }
}

/// Generators x_j^±, h_m stored on the charge-0 sector.
#[derive(Clone, Debug)]
pub struct LoopGenerators<S> {
    pub sector: Sector,
    ops: BTreeMap<(Family, i64), SparseOp<S>>,
    /// How each operator was obtained, in generation order.
    pub log: Vec<String>,
}

impl<S: Ring> LoopGenerators<S> {
    pub fn config(&self) -> &LatticeConfig {
        &self.sector.config
    }

    pub fn dim(&self) -> usize {
        self.sector.len()
    }

    pub fn get(&self, family: Family, j: i64) -> Option<&SparseOp<S>> {
        self.ops.get(&(family, j))
    }

    pub fn require(&self, family: Family, j: i64) -> Result<&SparseOp<S>> {
        self.get(family, j)
            .ok_or_else(|| Error::Config(format!("generator {}_{j} has not been built", family.symbol())))
    }

    pub fn insert(&mut self, family: Family, j: i64, op: SparseOp<S>, how: impl Into<String>) {
        self.log.push(format!("{}_{j} = {}", family.symbol(), how.into()));
        self.ops.insert((family, j), op);
    }

    /// Smallest and largest stored index of a family.
    pub fn window(&self, family: Family) -> Option<(i64, i64)> {
        let mut it = self.ops.keys().filter(|(f, _)| *f == family).map(|&(_, j)| j);
        let first = it.next()?;
        Some(it.fold((first, first), |(a, b), j| (a.min(j), b.max(j))))
    }

    /// Sector positions of |Ω⟩ and |Ω̄⟩.
    pub fn ground_positions(&self) -> (usize, usize) {
        let (o, ob) = ground_state_ranks(self.config());
        (
            self.sector.position(o).expect("|Ω⟩ is periodic"),
            self.sector.position(ob).expect("|Ω̄⟩ is periodic when N | L"),
        )
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&S) -> U + Copy) -> LoopGenerators<U> {
        LoopGenerators {
            sector: self.sector.clone(),
            ops: self.ops.iter().map(|(k, op)| (*k, op.map(f))).collect(),
            log: self.log.clone(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Family, i64, &SparseOp<S>)> {
        self.ops.iter().map(|(&(f, j), op)| (f, j, op))
    }
}

/// x₀⁻, x₁⁻, x₀⁺, x₋₁⁺ on the charge-0 sector, without h₀.
pub fn raw_generators<T: Ring, const N: usize>(cfg: &LatticeConfig) -> Result<LoopGenerators<Cyclotomic<T, N>>> {
    raw_generators_with(cfg, |label, sector| divided_power_sector::<T, N>(label, 1, sector))
}

/// As [`raw_generators`], with each (x^±)^(1) supplied by `build`.
pub fn raw_generators_with<S: Ring>(
    cfg: &LatticeConfig,
    mut build: impl FnMut(GenLabel, &Sector) -> Result<SparseOp<S>>,
) -> Result<LoopGenerators<S>> {
    cfg.require_multiple()?;
    let sector = Sector::new(cfg, 0);
    let mut gens = LoopGenerators {
        sector,
        ops: BTreeMap::new(),
        log: Vec::new(),
    };
    for (label, family, j, how) in [
        (GenLabel::X0Minus, Family::XMinus, 0, "B_L^(N)/(1-w)^N"),
        (GenLabel::X1Minus, Family::XMinus, 1, "B_1^(N)/(1-w)^N"),
        (GenLabel::X0Plus, Family::XPlus, 0, "C_0^(N)/(1-w)^N"),
        (GenLabel::Xm1Plus, Family::XPlus, -1, "C_{L-1}^(N)/(1-w)^N"),
    ] {
        let op = build(label, &gens.sector)?;
        if op.dim() != gens.sector.len() {
            return Err(Error::DimensionMismatch(op.dim(), gens.sector.len()));
        }
        gens.insert(family, j, op, how);
    }
    Ok(gens)
}

/// Adds h₀ = [x₀⁺, x₀⁻].
pub fn with_h0<S: Ring>(mut gens: LoopGenerators<S>) -> Result<LoopGenerators<S>> {
    let h0 = gens.require(Family::XPlus, 0)?.commutator(gens.require(Family::XMinus, 0)?);
    gens.insert(Family::H, 0, h0, "[x+_0, x-_0]");
    Ok(gens)
}

/// The four base generators plus h₀ = [x₀⁺, x₀⁻].
pub fn base_generators<T: Ring, const N: usize>(cfg: &LatticeConfig) -> Result<LoopGenerators<Cyclotomic<T, N>>> {
    with_h0(raw_generators::<T, N>(cfg)?)
}

fn config_params(res: &mut CheckResult, cfg: &LatticeConfig) {
    res.params.insert("N".into(), json!(cfg.n));
    res.params.insert("L".into(), json!(cfg.l));
}

fn first_column_difference<S: Ring>(a: &SparseOp<S>, b: &SparseOp<S>) -> Option<serde_json::Value> {
    a.first_difference(b).map(|(row, col)| json!({ "row": row, "col": col }))
}

/// h₀ = [x₀⁺, x₀⁻] agrees with [x₋₁⁺, x₁⁻] on the sector.
pub fn verify_h0<S: Ring>(gens: &LoopGenerators<S>) -> CheckResult {
    CheckResult::timed("loop.h0", |res| {
        config_params(res, gens.config());
        let (h0, xm1p, x1m) = match (gens.require(Family::H, 0), gens.require(Family::XPlus, -1), gens.require(Family::XMinus, 1)) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            _ => return res.fail(json!({ "error": "base generators missing" })),
        };
        if let Some(w) = first_column_difference(h0, &xm1p.commutator(x1m)) {
            res.fail(json!({ "identity": "[x+_0,x-_0] = [x+_-1,x-_1]", "at": w }));
        }
    })
}

fn half<T: Field, const N: usize>() -> Cyclotomic<T, N> {
    Cyclotomic::from_scalar(T::one() / T::from_int(2))
}

/// Extends the generators to x_j^± and h_m for lo ≤ j, m ≤ hi.
///
/// Generation uses h₁ = [x₀⁺, x₁⁻] and h₋₁ = [x₋₁⁺, x₀⁻] to step the x
/// ladders, then h_m = [x₀⁺, x_m⁻] (m > 0) or [x_m⁺, x₀⁻] (m < 0). The
/// returned result records whether alternative splittings of the same
/// total index reproduce every operator, and whether [h₀, x_j^±] = ±2x_j^±.
pub fn extend_generators<T: Field, const N: usize>(gens: &mut LoopGenerators<Cyclotomic<T, N>>, lo: i64, hi: i64) -> CheckResult {
    CheckResult::timed("loop.extend", |res| {
        config_params(res, gens.config());
        res.params.insert("range".into(), json!([lo, hi]));
        if lo > -1 || hi < 1 {
            return res.fail(json!({ "error": "range must contain -1..=1" }));
        }
        if let Err(e) = extend_inner(gens, lo, hi) {
            return res.fail(json!({ "error": e.to_string() }));
        }
        let half = half::<T, N>();
        let two = Cyclotomic::<T, N>::from_int(2);
        let mut alternatives = 0usize;
        let mut min_choices = usize::MAX;
        for m in lo..=hi {
            let canonical = if m >= 0 { m } else { 0 };
            let h = gens.get(Family::H, m).expect("built above").clone();
            let mut choices = 1;
            for ell in lo..=hi {
                if ell == canonical || !(lo..=hi).contains(&(m - ell)) || choices >= 2 {
                    continue;
                }
                let alt = gens.get(Family::XPlus, m - ell).unwrap().commutator(gens.get(Family::XMinus, ell).unwrap());
                if let Some(w) = first_column_difference(&h, &alt) {
                    return res.fail(json!({ "identity": "h_m independent of l", "m": m, "l": ell, "at": w }));
                }
                choices += 1;
                alternatives += 1;
            }
            min_choices = min_choices.min(choices);
        }
        for (family, sign) in [(Family::XMinus, 1i64), (Family::XPlus, -1i64)] {
            let factor = half.clone() * Cyclotomic::from_int(sign);
            for j in lo..=hi {
                let x = gens.get(family, j).unwrap().clone();
                let h0 = gens.get(Family::H, 0).unwrap();
                let cartan = h0.commutator(&x);
                if let Some(w) = first_column_difference(&cartan, &x.scale(&(two.clone() * Cyclotomic::from_int(sign)))) {
                    return res.fail(json!({ "identity": "[h_0, x_j] = ±2 x_j", "family": family.symbol(), "j": j, "at": w }));
                }
                let mut checked = 0;
                for ell in lo..=hi {
                    let m = j - ell;
                    if m == 0 || m == 1 || m == -1 || !(lo..=hi).contains(&m) || checked >= 1 {
                        continue;
                    }
                    let alt = gens.get(Family::H, m).unwrap().commutator(gens.get(family, ell).unwrap()).scale(&factor);
                    if let Some(w) = first_column_difference(&x, &alt) {
                        return res.fail(json!({ "identity": "x_{m+l} = ∓½[h_m, x_l]", "family": family.symbol(), "m": m, "l": ell, "at": w }));
                    }
                    checked += 1;
                    alternatives += 1;
                }
            }
        }
        res.observe("alternative_splittings", json!(alternatives));
        res.observe("min_h_choices", json!(min_choices));
    })
}

fn extend_inner<T: Field, const N: usize>(gens: &mut LoopGenerators<Cyclotomic<T, N>>, lo: i64, hi: i64) -> Result<()> {
    if gens.get(Family::H, 0).is_none() {
        let h0 = gens.require(Family::XPlus, 0)?.commutator(gens.require(Family::XMinus, 0)?);
        gens.insert(Family::H, 0, h0, "[x+_0, x-_0]");
    }
    let half = half::<T, N>();
    let neg_half = -half.clone();
    if gens.get(Family::H, 1).is_none() {
        let h1 = gens.require(Family::XPlus, 0)?.commutator(gens.require(Family::XMinus, 1)?);
        gens.insert(Family::H, 1, h1, "[x+_0, x-_1]");
    }
    if gens.get(Family::H, -1).is_none() {
        let hm1 = gens.require(Family::XPlus, -1)?.commutator(gens.require(Family::XMinus, 0)?);
        gens.insert(Family::H, -1, hm1, "[x+_-1, x-_0]");
    }
    let h1 = gens.require(Family::H, 1)?.clone();
    let hm1 = gens.require(Family::H, -1)?.clone();
    for (family, factor) in [(Family::XMinus, &half), (Family::XPlus, &neg_half)] {
        let mut j = 1;
        while j <= hi {
            if gens.get(family, j).is_none() {
                let op = h1.commutator(gens.require(family, j - 1)?).scale(factor);
                let how = format!("{}½[h_1, {}_{}]", if family == Family::XPlus { "-" } else { "" }, family.symbol(), j - 1);
                gens.insert(family, j, op, how);
            }
            j += 1;
        }
        let mut j = -1;
        while j >= lo {
            if gens.get(family, j).is_none() {
                let op = hm1.commutator(gens.require(family, j + 1)?).scale(factor);
                let how = format!("{}½[h_-1, {}_{}]", if family == Family::XPlus { "-" } else { "" }, family.symbol(), j + 1);
                gens.insert(family, j, op, how);
            }
            j -= 1;
        }
    }
    for m in lo..=hi {
        if gens.get(Family::H, m).is_some() {
            continue;
        }
        let (op, how) = if m > 0 {
            (gens.require(Family::XPlus, 0)?.commutator(gens.require(Family::XMinus, m)?), format!("[x+_0, x-_{m}]"))
        } else {
            (gens.require(Family::XPlus, m)?.commutator(gens.require(Family::XMinus, 0)?), format!("[x+_{m}, x-_0]"))
        };
        gens.insert(Family::H, m, op, how);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// dense vector helpers

fn unit<S: Ring>(dim: usize, p: usize) -> Vec<S> {
    let mut v = vec![S::zero(); dim];
    v[p] = S::one();
    v
}

fn combine<S: Ring>(terms: &[(i64, &[S])]) -> Vec<S> {
    let dim = terms[0].1.len();
    let mut out = vec![S::zero(); dim];
    for (c, v) in terms {
        let c = S::from_int(*c);
        for (o, x) in out.iter_mut().zip(v.iter()) {
            if !x.is_zero() {
                o.fma_assign(&c, x);
            }
        }
    }
    out
}

fn scaled<S: Ring>(v: &[S], c: &S) -> Vec<S> {
    v.iter().map(|x| x.mul_ref(c)).collect()
}

fn first_nonzero<S: Ring>(v: &[S]) -> Option<usize> {
    v.iter().position(|x| !x.is_zero())
}

fn first_mismatch<S: Ring>(a: &[S], b: &[S]) -> Option<usize> {
    a.iter().zip(b).position(|(x, y)| x != y)
}

/// [a, [a, [a, b]]] v = a³bv − 3a²bav + 3aba²v − ba³v.
fn triple_commutator<S: Ring>(a: &SparseOp<S>, b: &SparseOp<S>, v: &[S]) -> Vec<S> {
    let av = a.apply_dense(v);
    let a2v = a.apply_dense(&av);
    let a3v = a.apply_dense(&a2v);
    let bv = b.apply_dense(v);
    let bav = b.apply_dense(&av);
    let ba2v = b.apply_dense(&a2v);
    let ba3v = b.apply_dense(&a3v);
    let t1 = a.apply_dense(&a.apply_dense(&a.apply_dense(&bv)));
    let t2 = a.apply_dense(&a.apply_dense(&bav));
    let t3 = a.apply_dense(&ba2v);
    combine(&[(1, &t1), (-3, &t2), (3, &t3), (-1, &ba3v)])
}

/// h v = p m v − m p v for h = [p, m].
fn commutator_apply<S: Ring>(p: &SparseOp<S>, m: &SparseOp<S>, v: &[S]) -> Vec<S> {
    let pm = p.apply_dense(&m.apply_dense(v));
    let mp = m.apply_dense(&p.apply_dense(v));
    combine(&[(1, &pm), (-1, &mp)])
}

/// ([h, x] − c x) v with h = [p, m].
fn cartan_defect<S: Ring>(p: &SparseOp<S>, m: &SparseOp<S>, x: &SparseOp<S>, c: i64, v: &[S]) -> Vec<S> {
    let xv = x.apply_dense(v);
    let hxv = commutator_apply(p, m, &xv);
    let xhv = x.apply_dense(&commutator_apply(p, m, v));
    combine(&[(1, &hxv), (-1, &xhv), (-c, &xv)])
}

/// Serre and Cartan relations as (id, operands).
struct Relations<'a, S> {
    x0m: &'a SparseOp<S>,
    x1m: &'a SparseOp<S>,
    x0p: &'a SparseOp<S>,
    xm1p: &'a SparseOp<S>,
}

impl<S: Ring> Relations<'_, S> {
    const IDS: [&'static str; 8] = [
        "serre[x+_0^3, x-_1]",
        "serre[x+_-1^3, x-_0]",
        "serre[x-_0^3, x+_-1]",
        "serre[x-_1^3, x+_0]",
        "cartan[h_0, x-_0] = 2x-_0",
        "cartan[h_0, x-_1] = 2x-_1",
        "cartan[h_0, x+_0] = -2x+_0",
        "cartan[h_0, x+_-1] = -2x+_-1",
    ];

    fn eval(&self, which: usize, v: &[S]) -> Vec<S> {
        let (p, m) = (self.x0p, self.x0m);
        match which {
            0 => triple_commutator(self.x0p, self.x1m, v),
            1 => triple_commutator(self.xm1p, self.x0m, v),
            2 => triple_commutator(self.x0m, self.xm1p, v),
            3 => triple_commutator(self.x1m, self.x0p, v),
            4 => cartan_defect(p, m, self.x0m, 2, v),
            5 => cartan_defect(p, m, self.x1m, 2, v),
            6 => cartan_defect(p, m, self.x0p, -2, v),
            _ => cartan_defect(p, m, self.xm1p, -2, v),
        }
    }
}

/// Sector positions to test: every state when `samples` is `None` or at
/// least the sector size, otherwise a seeded sample without replacement.
pub fn serre_states(sector_len: usize, samples: Option<usize>, seed: u64) -> Vec<usize> {
    match samples {
        Some(k) if k < sector_len => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx = sample(&mut rng, sector_len, k).into_vec();
            idx.sort_unstable();
            idx
        }
        _ => (0..sector_len).collect(),
    }
}

/// Evaluates the Serre and Cartan relations on each listed sector state.
///
/// Only the four base generators are needed; h₀ is applied as a commutator.
pub fn verify_serre<S: Ring>(id: &str, gens: &LoopGenerators<S>, states: &[usize]) -> CheckResult {
    CheckResult::timed(id, |res| {
        config_params(res, gens.config());
        res.params.insert("states".into(), json!(states.len()));
        let rel = match (
            gens.require(Family::XMinus, 0),
            gens.require(Family::XMinus, 1),
            gens.require(Family::XPlus, 0),
            gens.require(Family::XPlus, -1),
        ) {
            (Ok(x0m), Ok(x1m), Ok(x0p), Ok(xm1p)) => Relations { x0m, x1m, x0p, xm1p },
            _ => return res.fail(json!({ "error": "base generators missing" })),
        };
        let dim = gens.dim();
        let failure = states.par_iter().find_map_first(|&p| {
            let v = unit::<S>(dim, p);
            (0..Relations::<S>::IDS.len()).find_map(|k| {
                first_nonzero(&rel.eval(k, &v)).map(|row| {
                    json!({ "relation": Relations::<S>::IDS[k], "state": gens.sector.rank_at(p), "row": row })
                })
            })
        });
        if let Some(w) = failure {
            res.fail(w);
        }
    })
}

/// The four identities on (x₁⁻)^(n)|Ω⟩ and (x₀⁻)^(n)|Ω⟩.
pub fn verify_partial_serre<T: Ring, const N: usize>(gens: &LoopGenerators<Cyclotomic<T, N>>, n: usize) -> CheckResult {
    CheckResult::timed("serre.partial", |res| {
        config_params(res, gens.config());
        res.params.insert("n".into(), json!(n));
        let run = || -> Result<Option<serde_json::Value>> {
            let x0m = gens.require(Family::XMinus, 0)?;
            let x1m = gens.require(Family::XMinus, 1)?;
            let x0p = gens.require(Family::XPlus, 0)?;
            let xm1p = gens.require(Family::XPlus, -1)?;
            let (omega, _) = gens.ground_positions();
            let vac = unit(gens.dim(), omega);
            let v1 = divided_power_sector::<T, N>(GenLabel::X1Minus, n, &gens.sector)?.apply_dense(&vac);
            let v0 = divided_power_sector::<T, N>(GenLabel::X0Minus, n, &gens.sector)?.apply_dense(&vac);
            let checks: [(&str, Vec<Cyclotomic<T, N>>); 4] = [
                ("[x+_0,[x+_0,[x+_0,x-_1]]] (x-_1)^(n)|Ω>", triple_commutator(x0p, x1m, &v1)),
                ("([[x+_-1,x-_1],x-_1] - 2x-_1) (x-_1)^(n)|Ω>", cartan_defect(xm1p, x1m, x1m, 2, &v1)),
                ("[x+_-1,[x+_-1,[x+_-1,x-_0]]] (x-_0)^(n)|Ω>", triple_commutator(xm1p, x0m, &v0)),
                ("([[x+_0,x-_0],x-_0] - 2x-_0) (x-_0)^(n)|Ω>", cartan_defect(x0p, x0m, x0m, 2, &v0)),
            ];
            Ok(checks
                .iter()
                .find_map(|(name, v)| first_nonzero(v).map(|row| json!({ "identity": name, "row": row }))))
        };
        match run() {
            Ok(Some(w)) => res.fail(w),
            Ok(None) => {}
            Err(e) => res.fail(json!({ "error": e.to_string() })),
        }
    })
}

/// Λ tables by both methods, palindromy and Σ Λ_n = N^{L−1}.
pub fn verify_lambda(cfg: &LatticeConfig) -> CheckResult {
    CheckResult::timed("lambda.tables", |res| {
        config_params(res, cfg);
        let data = match lambda_coefficients(cfg) {
            Ok(d) => d,
            Err(e) => return res.fail(json!({ "error": e.to_string() })),
        };
        // an independent recount straight from both formulas
        let series = lambda_series(cfg.n, cfg.l);
        for n in 0..=data.r {
            if lambda_alternating(cfg.n, cfg.l, n) != series[n] {
                return res.fail(json!({ "n": n, "reason": "methods disagree" }));
            }
        }
        if data.lambda(0) != 1 || data.lambda(data.r) != 1 {
            return res.fail(json!({ "reason": "end coefficients differ from 1", "lambdas": data.lambdas }));
        }
        if !data.is_palindromic() {
            return res.fail(json!({ "reason": "not palindromic", "lambdas": data.lambdas }));
        }
        let expect = (cfg.n as i128).pow(cfg.l as u32 - 1);
        if data.total() != expect {
            return res.fail(json!({ "reason": "sum differs from N^(L-1)", "sum": data.total().to_string() }));
        }
        res.observe("lambdas", json!(data.lambdas));
    })
}

/// h₀ and Λ_n identities on |Ω⟩ and |Ω̄⟩.
pub fn verify_highest_weight<T: Ring, const N: usize>(gens: &LoopGenerators<Cyclotomic<T, N>>, data: &DrinfeldData) -> CheckResult {
    CheckResult::timed("highest_weight", |res| {
        config_params(res, gens.config());
        let run = || -> Result<Option<serde_json::Value>> {
            let r = data.r as i64;
            let (po, pb) = gens.ground_positions();
            let dim = gens.dim();
            let (om, omb) = (unit::<Cyclotomic<T, N>>(dim, po), unit::<Cyclotomic<T, N>>(dim, pb));
            let c = |k: i64| Cyclotomic::<T, N>::from_int(k);
            let x0m = gens.require(Family::XMinus, 0)?;
            let x1m = gens.require(Family::XMinus, 1)?;
            let x0p = gens.require(Family::XPlus, 0)?;
            let xm1p = gens.require(Family::XPlus, -1)?;
            let h0 = gens.require(Family::H, 0)?;
            let first: [(&str, Vec<Cyclotomic<T, N>>, Vec<Cyclotomic<T, N>>); 6] = [
                ("h_0|Ω> = -r|Ω>", h0.apply_dense(&om), scaled(&om, &c(-r))),
                ("x+_-1 x-_1|Ω> = -r|Ω>", xm1p.apply_dense(&x1m.apply_dense(&om)), scaled(&om, &c(-r))),
                ("x+_0 x-_0|Ω> = -r|Ω>", x0p.apply_dense(&x0m.apply_dense(&om)), scaled(&om, &c(-r))),
                ("h_0|Ω̄> = r|Ω̄>", h0.apply_dense(&omb), scaled(&omb, &c(r))),
                ("-x-_1 x+_-1|Ω̄> = r|Ω̄>", x1m.apply_dense(&xm1p.apply_dense(&omb)), scaled(&omb, &c(-r))),
                ("-x-_0 x+_0|Ω̄> = r|Ω̄>", x0m.apply_dense(&x0p.apply_dense(&omb)), scaled(&omb, &c(-r))),
            ];
            for (name, lhs, rhs) in first.iter() {
                if let Some(row) = first_mismatch(lhs, rhs) {
                    return Ok(Some(json!({ "identity": name, "row": row })));
                }
            }
            for n in 0..=data.r {
                let dp = |g| divided_power_sector::<T, N>(g, n, &gens.sector);
                let (d0m, d1m, d0p, dm1p) = (dp(GenLabel::X0Minus)?, dp(GenLabel::X1Minus)?, dp(GenLabel::X0Plus)?, dp(GenLabel::Xm1Plus)?);
                let lam = c(data.lambda(n));
                let pairs: [(&str, &Op<T, N>, &Op<T, N>, &Vec<Cyclotomic<T, N>>); 4] = [
                    ("(x+_0)^(n)(x-_1)^(n)|Ω> = Λ_n|Ω>", &d0p, &d1m, &om),
                    ("(x+_-1)^(n)(x-_0)^(n)|Ω> = Λ_n|Ω>", &dm1p, &d0m, &om),
                    ("(x-_1)^(n)(x+_0)^(n)|Ω̄> = Λ_n|Ω̄>", &d1m, &d0p, &omb),
                    ("(x-_0)^(n)(x+_-1)^(n)|Ω̄> = Λ_n|Ω̄>", &d0m, &dm1p, &omb),
                ];
                for (name, outer, inner, v) in pairs {
                    let lhs = outer.apply_dense(&inner.apply_dense(v));
                    if let Some(row) = first_mismatch(&lhs, &scaled(v, &lam)) {
                        return Ok(Some(json!({ "identity": name, "n": n, "row": row })));
                    }
                }
            }
            Ok(None)
        };
        match run() {
            Ok(Some(w)) => res.fail(w),
            Ok(None) => res.observe("r", json!(data.r)),
            Err(e) => res.fail(json!({ "error": e.to_string() })),
        }
    })
}

/// (x₀⁺)^(n−1)(x₁⁻)^(n)|Ω⟩ = Σ_{j=1}^n Λ_{n−j} x_j⁻|Ω⟩ and its mirror
/// (x₁⁻)^(n−1)(x₀⁺)^(n)|Ω̄⟩ = Σ_{j=1}^n Λ_{n−j} x_{j−1}⁺|Ω̄⟩ for 1 ≤ n ≤ r+1.
pub fn verify_induction<T: Ring, const N: usize>(gens: &LoopGenerators<Cyclotomic<T, N>>, data: &DrinfeldData) -> CheckResult {
    CheckResult::timed("induction.xpm", |res| {
        config_params(res, gens.config());
        let run = || -> Result<Option<serde_json::Value>> {
            let (po, pb) = gens.ground_positions();
            let dim = gens.dim();
            let (om, omb) = (unit::<Cyclotomic<T, N>>(dim, po), unit::<Cyclotomic<T, N>>(dim, pb));
            for n in 1..=data.r + 1 {
                let dp = |g, k| divided_power_sector::<T, N>(g, k, &gens.sector);
                let lhs = dp(GenLabel::X0Plus, n - 1)?.apply_dense(&dp(GenLabel::X1Minus, n)?.apply_dense(&om));
                let lhs_bar = dp(GenLabel::X1Minus, n - 1)?.apply_dense(&dp(GenLabel::X0Plus, n)?.apply_dense(&omb));
                let mut rhs = vec![Cyclotomic::<T, N>::zero(); dim];
                let mut rhs_bar = vec![Cyclotomic::<T, N>::zero(); dim];
                for j in 1..=n {
                    let lam = Cyclotomic::<T, N>::from_int(data.lambda(n - j));
                    let a = gens.require(Family::XMinus, j as i64)?.apply_dense(&om);
                    let b = gens.require(Family::XPlus, j as i64 - 1)?.apply_dense(&omb);
                    for (o, x) in rhs.iter_mut().zip(&a) {
                        o.fma_assign(&lam, x);
                    }
                    for (o, x) in rhs_bar.iter_mut().zip(&b) {
                        o.fma_assign(&lam, x);
                    }
                }
                if let Some(row) = first_mismatch(&lhs, &rhs) {
                    return Ok(Some(json!({ "identity": "lowering from |Ω>", "n": n, "row": row })));
                }
                if let Some(row) = first_mismatch(&lhs_bar, &rhs_bar) {
                    return Ok(Some(json!({ "identity": "raising from |Ω̄>", "n": n, "row": row })));
                }
            }
            Ok(None)
        };
        match run() {
            Ok(Some(w)) => res.fail(w),
            Ok(None) => {}
            Err(e) => res.fail(json!({ "error": e.to_string() })),
        }
    })
}

/// Σ_{j=0}^r Λ_j x_{j+1}⁻ (or Σ Λ_j x_j⁺) annihilates the ground state and
/// every state obtained from it by one or two further generators of the
/// same family.
pub fn verify_finiteness<T: Ring, const N: usize>(
    gens: &LoopGenerators<Cyclotomic<T, N>>,
    data: &DrinfeldData,
    family: Family,
) -> CheckResult {
    let id = if family == Family::XMinus { "finite.xminus" } else { "finite.xplus" };
    CheckResult::timed(id, |res| {
        config_params(res, gens.config());
        let run = || -> Result<(Option<serde_json::Value>, usize)> {
            let (po, pb) = gens.ground_positions();
            let dim = gens.dim();
            let r = data.r as i64;
            let (start, offset) = if family == Family::XMinus { (unit(dim, po), 1) } else { (unit(dim, pb), 0) };
            let mut sum = SparseOp::zero(dim);
            for j in 0..=r {
                let lam = Cyclotomic::<T, N>::from_int(data.lambda(j as usize));
                sum = sum.add(&gens.require(family, j + offset)?.scale(&lam));
            }
            let mut states: Vec<(Vec<i64>, Vec<Cyclotomic<T, N>>)> = vec![(vec![], start)];
            for a in 0..=r {
                let va = gens.require(family, a)?.apply_dense(&states[0].1);
                for b in a..=r {
                    let vab = gens.require(family, b)?.apply_dense(&va);
                    states.push((vec![a, b], vab));
                }
                states.push((vec![a], va));
            }
            for (path, v) in &states {
                if let Some(row) = first_nonzero(&sum.apply_dense(v)) {
                    return Ok((Some(json!({ "descendant_of": path, "row": row })), states.len()));
                }
            }
            Ok((None, states.len()))
        };
        match run() {
            Ok((Some(w), _)) => res.fail(w),
            Ok((None, n)) => res.observe("states_tested", json!(n)),
            Err(e) => res.fail(json!({ "error": e.to_string() })),
        }
    })
}

/// Pieces of the monodromy shared by the commutation identities.
struct CommData<T: Ring, const N: usize> {
    blocks: MonodromyBlocks<Cyclotomic<T, N>>,
    a_l_minus_1: Op<T, N>,
    d0_minus_1: Op<T, N>,
}

impl<T: Ring, const N: usize> CommData<T, N> {
    fn new(cfg: &LatticeConfig) -> Result<Self> {
        let blocks = monodromy::<T, N>(cfg)?;
        let id = SparseOp::identity(cfg.dim());
        let all_z = z_product::<T, N>(cfg, 1..=cfg.l)?;
        let d0 = all_z.scale(&Cyclotomic::omega_pow(cfg.l as i64));
        Ok(CommData {
            blocks,
            a_l_minus_1: all_z.sub(&id),
            d0_minus_1: d0.sub(&id),
        })
    }
}

fn poly_commutator<S: Ring>(p: &OpPoly<S>, op: &SparseOp<S>) -> OpPoly<S> {
    p.mul_op_right(op).sub(&p.mul_op_left(op))
}

fn poly_witness(name: &str, d: Option<(usize, usize, usize)>) -> Option<serde_json::Value> {
    d.map(|(k, i, j)| json!({ "identity": name, "t_power": k, "row": i, "col": j }))
}

/// One operator-polynomial identity, together with the variant carrying the
/// signs and boundary factors exactly as usually printed.
struct PolyIdentity<S> {
    name: &'static str,
    lhs: OpPoly<S>,
    rhs: OpPoly<S>,
    printed_rhs: OpPoly<S>,
}

/// Fails on the first identity that does not hold; records for every
/// identity whether the printed variant holds as well.
fn judge_identities<S: Ring>(res: &mut CheckResult, ids: &[PolyIdentity<S>]) {
    let mut printed = serde_json::Map::new();
    for id in ids {
        let status = match id.lhs.first_difference(&id.printed_rhs) {
            None => json!("holds"),
            Some((k, i, j)) => json!({ "fails_at": { "t_power": k, "row": i, "col": j } }),
        };
        printed.insert(id.name.to_string(), status);
    }
    res.observe("printed_form", serde_json::Value::Object(printed));
    for id in ids {
        if let Some(w) = poly_witness(id.name, id.lhs.first_difference(&id.rhs)) {
            return res.fail(w);
        }
    }
}

/// The four commutators of τ₂(t)|_{Q=0} with B_L^(N), B₁^(N), C₀^(N),
/// C_{L−1}^(N) as polynomial identities on the full edge space:
///
/// ```text
/// [τ₂, B_L^(N)]     = (ω−1) B(t) B_L^(N−1) (A_L−1)
/// [τ₂, B₁^(N)]      = (ω⁻¹−1) t⁻¹ B(t) B₁^(N−1) (D₀−1)
/// [τ₂, C₀^(N)]      = (1−ω) C(t) C₀^(N−1) (D₀−1)
/// [τ₂, C_{L−1}^(N)] = (ω−1) ωt C(t) C_{L−1}^(N−1) (A_L−1)
/// ```
///
/// The second and third lines are often printed with the opposite overall
/// sign.
pub fn verify_comm_identities<T: Ring, const N: usize>(cfg: &LatticeConfig) -> CheckResult {
    CheckResult::timed("comm.identities", |res| {
        config_params(res, cfg);
        let run = || -> Result<Vec<PolyIdentity<Cyclotomic<T, N>>>> {
            let cfg0 = cfg.with_q(0)?;
            let cd = CommData::<T, N>::new(&cfg0)?;
            let tau = tau2_from_blocks(&cd.blocks, 0);
            let w = Cyclotomic::<T, N>::omega();
            let one = Cyclotomic::<T, N>::one();
            let dp = |g, k| boundary_divided_power::<T, N>(g, k, &cfg0);
            let b_t = &cd.blocks.b;
            let c_t = &cd.blocks.c;
            let b_over_t = b_t.shift_down().ok_or_else(|| Error::Numeric("B(t) has a constant term".into()))?;
            let w_minus_1 = w.clone() - one.clone();

            let rhs1 = b_t.mul_op_right(&dp(GenLabel::X0Minus, N - 1)?).mul_op_right(&cd.a_l_minus_1).scale(&w_minus_1);
            let base2 = b_over_t.mul_op_right(&dp(GenLabel::X1Minus, N - 1)?).mul_op_right(&cd.d0_minus_1);
            let rhs2 = base2.scale(&(Cyclotomic::omega_pow(-1) - one.clone()));
            let printed2 = base2.scale(&(one.clone() - Cyclotomic::omega_pow(-1)));
            let base3 = c_t.mul_op_right(&dp(GenLabel::X0Plus, N - 1)?).mul_op_right(&cd.d0_minus_1);
            let rhs3 = base3.scale(&(one.clone() - w.clone()));
            let printed3 = base3.scale(&w_minus_1);
            let rhs4 = c_t
                .shift_up()
                .mul_op_right(&dp(GenLabel::Xm1Plus, N - 1)?)
                .mul_op_right(&cd.a_l_minus_1)
                .scale(&(w_minus_1 * w));
            Ok(vec![
                PolyIdentity {
                    name: "[tau2, B_L^(N)]",
                    lhs: poly_commutator(&tau, &dp(GenLabel::X0Minus, N)?),
                    printed_rhs: rhs1.clone(),
                    rhs: rhs1,
                },
                PolyIdentity {
                    name: "[tau2, B_1^(N)]",
                    lhs: poly_commutator(&tau, &dp(GenLabel::X1Minus, N)?),
                    rhs: rhs2,
                    printed_rhs: printed2,
                },
                PolyIdentity {
                    name: "[tau2, C_0^(N)]",
                    lhs: poly_commutator(&tau, &dp(GenLabel::X0Plus, N)?),
                    rhs: rhs3,
                    printed_rhs: printed3,
                },
                PolyIdentity {
                    name: "[tau2, C_{L-1}^(N)]",
                    lhs: poly_commutator(&tau, &dp(GenLabel::Xm1Plus, N)?),
                    printed_rhs: rhs4.clone(),
                    rhs: rhs4,
                },
            ])
        };
        match run() {
            Ok(ids) => judge_identities(res, &ids),
            Err(e) => res.fail(json!({ "error": e.to_string() })),
        }
    })
}

/// [τ₂(t)|_{Q=0}, g] = 0 on the charge-0 sector for the four generators.
pub fn verify_comm_sector<T: Ring, const N: usize>(cfg: &LatticeConfig) -> CheckResult {
    CheckResult::timed("comm.sector", |res| {
        config_params(res, cfg);
        let run = || -> Result<Option<serde_json::Value>> {
            cfg.require_multiple()?;
            let cfg0 = cfg.with_q(0)?;
            let sector = Sector::new(&cfg0, 0);
            let tau = tau2_edge::<T, N>(&cfg0)?.restrict(&sector)?;
            for g in GenLabel::ALL {
                let op = divided_power_sector::<T, N>(g, 1, &sector)?;
                let c = poly_commutator(&tau, &op);
                if let Some(w) = poly_witness(g.name(), c.first_difference(&OpPoly::zero(sector.len()))) {
                    return Ok(Some(w));
                }
            }
            Ok(None)
        };
        match run() {
            Ok(Some(w)) => res.fail(w),
            Ok(None) => {}
            Err(e) => res.fail(json!({ "error": e.to_string() })),
        }
    })
}

/// The two operator identities relating A(t) + ω^m D(t) to the products
/// y = B_L^(N−m)B₁^(m) and z = C₀^(N−m)C_{L−1}^(m), 1 ≤ m ≤ N−1:
///
/// ```text
/// [A+ω^m D] y = y [ω^m A+D] + (1−ω)[(ωt)⁻¹ B(t) B_L^(N−m) B₁^(m−1) (D₀−1)
///                                 − ω^m B(t) B_L^(N−m−1) B₁^(m) (A_L−1)]
/// [A+ω^m D] z = z [ω^m A+D] − (1−ω)[ωt C(t) C₀^(N−m) C_{L−1}^(m−1) (A_L−1)
///                                 − ω^m C(t) C₀^(N−m−1) C_{L−1}^(m) (D₀−1)]
/// ```
///
/// At m = 0 and m = N these reduce to the commutation identities of
/// [`verify_comm_identities`]. The printed variant recorded alongside has
/// the opposite sign on one term of each line and, on the second line,
/// (D₀−1) and (A_L−1) interchanged.
pub fn verify_adq_identities<T: Ring, const N: usize>(cfg: &LatticeConfig, m: usize) -> CheckResult {
    CheckResult::timed("adq.identities", |res| {
        config_params(res, cfg);
        res.params.insert("m".into(), json!(m));
        let run = || -> Result<Vec<PolyIdentity<Cyclotomic<T, N>>>> {
            if m == 0 || m >= N {
                return Err(Error::Config(format!("m={m} must lie in 1..N")));
            }
            let cd = CommData::<T, N>::new(cfg)?;
            let (a, d) = (&cd.blocks.a, &cd.blocks.d);
            let wm = Cyclotomic::<T, N>::omega_pow(m as i64);
            let om = Cyclotomic::<T, N>::one() - Cyclotomic::omega();
            let left = a.add(&d.scale(&wm));
            let right = a.scale(&wm).add(d);
            let dp = |g, k| boundary_divided_power::<T, N>(g, k, cfg);
            let b_over_t = cd.blocks.b.shift_down().ok_or_else(|| Error::Numeric("B(t) has a constant term".into()))?;
            let c_times_t = cd.blocks.c.shift_up();

            let y = dp(GenLabel::X0Minus, N - m)?.mul(&dp(GenLabel::X1Minus, m)?);
            let y1 = dp(GenLabel::X0Minus, N - m)?.mul(&dp(GenLabel::X1Minus, m - 1)?);
            let y2 = dp(GenLabel::X0Minus, N - m - 1)?.mul(&dp(GenLabel::X1Minus, m)?);
            let by1 = b_over_t.mul_op_right(&y1.mul(&cd.d0_minus_1)).scale(&(om.clone() * Cyclotomic::omega_pow(-1)));
            let by2 = cd.blocks.b.mul_op_right(&y2.mul(&cd.a_l_minus_1)).scale(&(om.clone() * wm.clone()));
            let y_comm = right.mul_op_left(&y);

            let z = dp(GenLabel::X0Plus, N - m)?.mul(&dp(GenLabel::Xm1Plus, m)?);
            let z1 = dp(GenLabel::X0Plus, N - m)?.mul(&dp(GenLabel::Xm1Plus, m - 1)?);
            let z2 = dp(GenLabel::X0Plus, N - m - 1)?.mul(&dp(GenLabel::Xm1Plus, m)?);
            let cz_scale1 = om.clone() * Cyclotomic::omega();
            let cz_scale2 = om * wm;
            let z_comm = right.mul_op_left(&z);
            let cz1 = c_times_t.mul_op_right(&z1.mul(&cd.a_l_minus_1)).scale(&cz_scale1);
            let cz2 = cd.blocks.c.mul_op_right(&z2.mul(&cd.d0_minus_1)).scale(&cz_scale2);
            let printed_cz1 = c_times_t.mul_op_right(&z1.mul(&cd.d0_minus_1)).scale(&cz_scale1);
            let printed_cz2 = cd.blocks.c.mul_op_right(&z2.mul(&cd.a_l_minus_1)).scale(&cz_scale2);
            Ok(vec![
                PolyIdentity {
                    name: "(A+w^m D) B_L^(N-m) B_1^(m)",
                    lhs: left.mul_op_right(&y),
                    rhs: y_comm.add(&by1).sub(&by2),
                    printed_rhs: y_comm.add(&by1).add(&by2),
                },
                PolyIdentity {
                    name: "(A+w^m D) C_0^(N-m) C_{L-1}^(m)",
                    lhs: left.mul_op_right(&z),
                    rhs: z_comm.sub(&cz1).add(&cz2),
                    printed_rhs: z_comm.add(&printed_cz1).add(&printed_cz2),
                },
            ])
        };
        match run() {
            Ok(ids) => judge_identities(res, &ids),
            Err(e) => res.fail(json!({ "error": e.to_string() })),
        }
    })
}

/// [A(t) + ω^Q D(t)] y_Q⁻|Ω⟩ = ω^Q ε_{−Q} y_Q⁻|Ω⟩ and
/// [A(t) + ω^Q D(t)] z_Q⁻|Ω̄⟩ = ε_Q z_Q⁻|Ω̄⟩.
pub fn verify_adq_eigen<T: Ring, const N: usize>(cfg: &LatticeConfig, q: usize) -> CheckResult {
    CheckResult::timed("adq.eigen", |res| {
        config_params(res, cfg);
        res.params.insert("Q".into(), json!(q));
        let mut run = || -> Result<Option<serde_json::Value>> {
            if q >= N {
                return Err(Error::Config(format!("Q={q} must lie below N")));
            }
            let blocks = monodromy::<T, N>(cfg)?;
            let wq = Cyclotomic::<T, N>::omega_pow(q as i64);
            let op = blocks.a.add(&blocks.d.scale(&wq));
            let dp = |g, k| boundary_divided_power::<T, N>(g, k, cfg);
            let y = dp(GenLabel::X0Minus, N - q)?.mul(&dp(GenLabel::X1Minus, q)?);
            let z = dp(GenLabel::X0Plus, N - q)?.mul(&dp(GenLabel::Xm1Plus, q)?);
            let (om, omb) = crate::state::ground_states::<Cyclotomic<T, N>>(cfg);
            let yv = y.apply(&om);
            let zv = z.apply(&omb);
            let eig_y: Poly<Cyclotomic<T, N>> = epsilon::<T, N>(cfg.l, -(q as i64)).scale(&wq);
            let eig_z = epsilon::<T, N>(cfg.l, q as i64);
            res.observe("y_nonzeros", json!(yv.nnz()));
            res.observe("z_nonzeros", json!(zv.nnz()));
            if let Some(k) = crate::sparse::vector_poly_matches(&op.apply(&yv), &eig_y, &yv) {
                return Ok(Some(json!({ "identity": "y_Q|Ω>", "t_power": k })));
            }
            if let Some(k) = crate::sparse::vector_poly_matches(&op.apply(&zv), &eig_z, &zv) {
                return Ok(Some(json!({ "identity": "z_Q|Ω̄>", "t_power": k })));
            }
            Ok(None)
        };
        match run() {
            Ok(Some(w)) => res.fail(w),
            Ok(None) => {}
            Err(e) => res.fail(json!({ "error": e.to_string() })),
        }
    })
}

/// Skip record for checks that need N | L.
pub fn skip_not_multiple(id: &str, cfg: &LatticeConfig) -> CheckResult {
    let mut r = CheckResult::skip(id, SKIP_NOT_MULTIPLE);
    config_params(&mut r, cfg);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{CheckedI64, Cyclo};
    use num_rational::BigRational;

    fn cfg(n: usize, l: usize) -> LatticeConfig {
        LatticeConfig::new(n, l, 0).unwrap()
    }

    #[test]
    fn h0_on_ground_states_n2() {
        let g = base_generators::<BigRational, 2>(&cfg(2, 2)).unwrap();
        let (po, pb) = g.ground_positions();
        let h0 = g.get(Family::H, 0).unwrap();
        assert_eq!(h0.get(po, po), Cyclo::<2>::from_int(-1));
        assert_eq!(h0.get(pb, pb), Cyclo::<2>::from_int(1));
        assert!(verify_h0(&g).passed());
    }

    #[test]
    fn base_checks_n3_l3() {
        let c = cfg(3, 3);
        let g = base_generators::<BigRational, 3>(&c).unwrap();
        let data = lambda_coefficients(&c).unwrap();
        assert!(verify_h0(&g).passed());
        let hw = verify_highest_weight(&g, &data);
        assert!(hw.passed(), "{hw:?}");
        for n in 0..=2 {
            let r = verify_partial_serre(&g, n);
            assert!(r.passed(), "n={n}: {r:?}");
        }
        let states = serre_states(g.dim(), None, 0);
        let r = verify_serre("serre.q0.exhaustive", &g, &states);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn integer_generators_agree_with_rational() {
        let c = cfg(3, 3);
        let gi = raw_generators::<CheckedI64, 3>(&c).unwrap();
        let gr = raw_generators::<BigRational, 3>(&c).unwrap();
        for (f, j, op) in gi.iter() {
            let lifted = op.map(|x| x.map_coeffs(|k| BigRational::from_integer(k.0.into())));
            assert_eq!(&lifted, gr.get(f, j).unwrap());
        }
    }

    #[test]
    fn extension_and_finiteness_n3_l3() {
        let c = cfg(3, 3);
        let mut g = base_generators::<BigRational, 3>(&c).unwrap();
        let data = lambda_coefficients(&c).unwrap();
        let ext = extend_generators(&mut g, -2, 3);
        assert!(ext.passed(), "{ext:?}");
        assert!(g.window(Family::XMinus) == Some((-2, 3)));
        assert!(verify_induction(&g, &data).passed());
        assert!(verify_finiteness(&g, &data, Family::XMinus).passed());
        assert!(verify_finiteness(&g, &data, Family::XPlus).passed());
    }

    #[test]
    fn commutation_small() {
        for (n, l) in [(2, 2)] {
            let r = verify_comm_identities::<BigRational, 2>(&cfg(n, l));
            assert!(r.passed(), "{r:?}");
        }
        let r = verify_comm_identities::<BigRational, 3>(&cfg(3, 3));
        assert!(r.passed(), "{r:?}");
        assert!(verify_comm_sector::<BigRational, 3>(&cfg(3, 3)).passed());
    }

    #[test]
    #[ignore = "[τ₂, B₁^(N)] and [τ₂, C₀^(N)] only hold with the opposite overall sign"]
    fn comm_identities_as_printed() {
        let r = verify_comm_identities::<BigRational, 3>(&cfg(3, 3));
        for (name, v) in r.observed["printed_form"].as_object().unwrap() {
            assert_eq!(v, "holds", "{name}");
        }
    }

    #[test]
    fn adq_small() {
        let c = cfg(3, 3);
        for m in 1..=2 {
            let r = verify_adq_identities::<BigRational, 3>(&c, m);
            assert!(r.passed(), "m={m}: {r:?}");
        }
        for q in 0..3 {
            let r = verify_adq_eigen::<BigRational, 3>(&c, q);
            assert!(r.passed(), "Q={q}: {r:?}");
        }
    }

    #[test]
    fn sampled_states_are_seeded() {
        let a = serre_states(243, Some(10), 7);
        let b = serre_states(243, Some(10), 7);
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(serre_states(5, Some(10), 0), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn lambda_check() {
        assert!(verify_lambda(&cfg(3, 6)).passed());
        assert!(verify_lambda(&cfg(4, 4)).passed());
    }
}

