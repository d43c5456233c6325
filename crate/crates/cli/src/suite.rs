//! Check registry and orchestration.

use std::path::PathBuf;

use log::{info, warn};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use sipotts_core::cyclotomic::CoeffText;
use sipotts_core::divided::{divided_power_sector, verify_divided_power_oracle};
use sipotts_core::drinfeld::lambda_coefficients;
use sipotts_core::loop_algebra::{
    extend_generators, raw_generators_with, serre_states, skip_not_multiple, verify_adq_eigen, verify_adq_identities,
    verify_comm_identities, verify_comm_sector, verify_finiteness, verify_h0, verify_highest_weight, verify_induction,
    verify_lambda, verify_partial_serre, verify_serre, with_h0,
};
use sipotts_core::scalar::catch_overflow;
use sipotts_core::sl2::{
    build_sl2, drinfeld_roots, embed_tau2, generate_eigenspace, verify_eigenspace_rank, verify_eigenvectors,
    verify_nilpotency, verify_reconstruction, verify_sl2_relations, verify_spectrum_multiplicity,
};
use sipotts_core::transfer::{fourier_consistency, op_poly_commutator_zero, tau2_edge, verify_boundary, verify_grading, verify_ground_states};
use sipotts_core::{
    BigRational, CheckResult, CheckedI64, CheckedRational, Cyclotomic, Error, ExactLift, Family, Field, LatticeConfig,
    LoopGenerators, OperatorCache, RealCoeff, Result, Sector,
};

pub struct CheckSpec {
    pub id: &'static str,
    /// Skipped unless N | L.
    pub needs_multiple: bool,
}

const fn spec(id: &'static str, needs_multiple: bool) -> CheckSpec {
    CheckSpec { id, needs_multiple }
}

/// Every check, cheapest first.
pub const CHECKS: &[CheckSpec] = &[
    spec("lambda.tables", true),
    spec("monodromy.boundary", false),
    spec("monodromy.grading", false),
    spec("eigen.ground_states", true),
    spec("divided_power.oracle", false),
    spec("fourier.consistency", false),
    spec("tau2.commute", false),
    spec("comm.identities", false),
    spec("comm.sector", true),
    spec("adq.identities", true),
    spec("adq.eigen", true),
    spec("loop.h0", true),
    spec("highest_weight", true),
    spec("serre.partial", true),
    spec("serre.q0.sampled", true),
    spec("serre.q0.exhaustive", true),
    spec("loop.extend", true),
    spec("induction.xpm", true),
    spec("finite.xminus", true),
    spec("finite.xplus", true),
    spec("drinfeld.roots", true),
    spec("sl2.relations", true),
    spec("sl2.nilpotency", true),
    spec("sl2.reconstruction", true),
    spec("sl2.eigenspace", true),
    spec("sl2.eigenvectors", true),
    spec("spectrum.multiplicity", true),
];

/// Checks that need the extended generators x_j^±, h_j for 0 ≤ j ≤ r.
const EXTENDED: &[&str] = &["loop.extend", "induction.xpm", "finite.xminus", "finite.xplus", "drinfeld.roots"];
const SL2: &[&str] = &["sl2.relations", "sl2.nilpotency", "sl2.reconstruction", "sl2.eigenspace", "sl2.eigenvectors"];

/// Largest sector swept state by state in `serre.q0.exhaustive`.
pub const SERRE_EXHAUSTIVE_MAX: usize = 5000;

pub fn default_samples() -> Vec<Complex64> {
    vec![Complex64::new(0.5, 0.0), Complex64::new(0.3, 0.2)]
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "Q")]
    pub q: Vec<usize>,
    pub checks: Vec<String>,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    #[serde(serialize_with = "complex_pairs")]
    pub t: Vec<Complex64>,
    pub cache_dir: Option<PathBuf>,
    pub workers: Option<usize>,
}

fn complex_pairs<S: serde::Serializer>(t: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(t.iter().map(|z| [z.re, z.im]))
}

impl RunConfig {
    pub fn lattice(&self) -> Result<LatticeConfig> {
        LatticeConfig::new(self.n, self.l, 0)
    }

    fn t_samples(&self) -> Vec<Complex64> {
        if self.t.is_empty() {
            default_samples()
        } else {
            self.t.clone()
        }
    }
}

/// Registry order of the requested ids; "all" selects everything.
pub fn resolve(requested: &[String]) -> std::result::Result<Vec<&'static str>, String> {
    if requested.is_empty() || requested.iter().any(|r| r == "all") {
        return Ok(CHECKS.iter().map(|c| c.id).collect());
    }
    if let Some(bad) = requested.iter().find(|r| !CHECKS.iter().any(|c| c.id == r.as_str())) {
        return Err(format!("unknown check id '{bad}'; available ids:\n  all\n  {}", available().join("\n  ")));
    }
    Ok(CHECKS.iter().map(|c| c.id).filter(|id| requested.iter().any(|r| r == id)).collect())
}

pub fn available() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.id).collect()
}

/// Dispatches a generic function over the runtime N.
macro_rules! with_n {
    ($n:expr, $f:ident :: <_> ( $($arg:expr),* )) => {
        match $n {
            2 => $f::<2>($($arg),*),
            3 => $f::<3>($($arg),*),
            4 => $f::<4>($($arg),*),
            5 => $f::<5>($($arg),*),
            6 => $f::<6>($($arg),*),
            7 => $f::<7>($($arg),*),
            8 => $f::<8>($($arg),*),
            n => Err(Error::Config(format!("N={n} is outside the supported range 2..=8"))),
        }
    };
}
pub(crate) use with_n;

/// Runs `fast` and, if 64-bit arithmetic overflows, `slow` instead.
pub fn exact<R>(what: &str, fast: impl FnOnce() -> R, slow: impl FnOnce() -> R) -> R {
    match catch_overflow(fast) {
        Ok(r) => r,
        Err(msg) => {
            warn!("{what}: {msg}; retrying with arbitrary-precision rationals");
            slow()
        }
    }
}

type Job<'a> = Box<dyn FnOnce() -> Vec<CheckResult> + Send + 'a>;

/// Runs the selected checks. Results are ordered by id, and by execution
/// order within one id.
pub fn run(rc: &RunConfig, selected: &[&'static str]) -> Result<Vec<CheckResult>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(rc.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let mut results = pool.install(|| with_n!(rc.n, run_n::<_>(rc, selected)))?;
    results.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(results)
}

fn run_n<const N: usize>(rc: &RunConfig, selected: &[&'static str]) -> Result<Vec<CheckResult>> {
    let lat = rc.lattice()?;
    let multiple = lat.is_superintegrable_size();
    let wanted = |id: &str| selected.contains(&id);
    let mut skipped = Vec::new();
    let mut active: Vec<&'static str> = Vec::new();
    for c in CHECKS.iter().filter(|c| wanted(c.id)) {
        if c.needs_multiple && !multiple {
            skipped.push(skip_not_multiple(c.id, &lat));
        } else {
            active.push(c.id);
        }
    }
    let on = |id: &str| active.contains(&id);

    let lat = &lat;
    let mut jobs: Vec<Job> = Vec::new();
    if on("lambda.tables") {
        jobs.push(Box::new(move || vec![verify_lambda(lat)]));
    }
    if on("monodromy.boundary") {
        jobs.push(Box::new(move || {
            vec![exact("monodromy.boundary", || verify_boundary::<CheckedI64, N>(lat), || verify_boundary::<BigRational, N>(lat))]
        }));
    }
    if on("monodromy.grading") {
        jobs.push(Box::new(move || {
            vec![exact("monodromy.grading", || verify_grading::<CheckedI64, N>(lat), || verify_grading::<BigRational, N>(lat))]
        }));
    }
    if on("eigen.ground_states") {
        jobs.push(Box::new(move || {
            vec![exact(
                "eigen.ground_states",
                || verify_ground_states::<CheckedI64, N>(lat),
                || verify_ground_states::<BigRational, N>(lat),
            )]
        }));
    }
    if on("divided_power.oracle") {
        jobs.push(Box::new(move || vec![verify_divided_power_oracle::<N>(lat)]));
    }
    if on("fourier.consistency") {
        jobs.push(Box::new(move || {
            vec![exact(
                "fourier.consistency",
                || fourier_consistency::<CheckedRational, N>(lat),
                || fourier_consistency::<BigRational, N>(lat),
            )]
        }));
    }
    if on("tau2.commute") {
        for &q in &rc.q {
            jobs.push(Box::new(move || {
                vec![exact("tau2.commute", || tau2_commute::<CheckedI64, N>(lat, q), || tau2_commute::<BigRational, N>(lat, q))]
            }));
        }
    }
    if on("comm.identities") {
        jobs.push(Box::new(move || {
            vec![exact(
                "comm.identities",
                || verify_comm_identities::<CheckedI64, N>(lat),
                || verify_comm_identities::<BigRational, N>(lat),
            )]
        }));
    }
    if on("comm.sector") {
        jobs.push(Box::new(move || {
            vec![exact("comm.sector", || verify_comm_sector::<CheckedI64, N>(lat), || verify_comm_sector::<BigRational, N>(lat))]
        }));
    }
    if on("adq.identities") {
        for m in 1..N {
            jobs.push(Box::new(move || {
                vec![exact(
                    "adq.identities",
                    || verify_adq_identities::<CheckedI64, N>(lat, m),
                    || verify_adq_identities::<BigRational, N>(lat, m),
                )]
            }));
        }
    }
    if on("adq.eigen") {
        for q in 0..N {
            jobs.push(Box::new(move || {
                vec![exact("adq.eigen", || verify_adq_eigen::<CheckedI64, N>(lat, q), || verify_adq_eigen::<BigRational, N>(lat, q))]
            }));
        }
    }
    if on("spectrum.multiplicity") {
        jobs.push(Box::new(move || vec![spectrum_multiplicity::<N>(rc, lat)]));
    }
    let loop_ids: Vec<&'static str> = active
        .iter()
        .copied()
        .filter(|id| {
            ["loop.h0", "highest_weight", "serre.partial", "serre.q0.sampled", "serre.q0.exhaustive"].contains(id)
                || EXTENDED.contains(id)
                || SL2.contains(id)
        })
        .collect();
    if !loop_ids.is_empty() {
        jobs.push(Box::new(move || {
            exact(
                "loop algebra",
                || {
                    let lift = |c: &CheckedI64| CheckedRational::from_integer(*c);
                    loop_stage::<CheckedI64, CheckedRational, N>(rc, lat, &loop_ids, lift)
                },
                || loop_stage::<BigRational, BigRational, N>(rc, lat, &loop_ids, BigRational::clone),
            )
        }));
    }

    let mut results: Vec<CheckResult> = jobs.into_par_iter().map(|job| job()).flatten().collect();
    results.extend(skipped);
    for r in &mut results {
        r.params.entry("N").or_insert(json!(lat.n));
        r.params.entry("L").or_insert(json!(lat.l));
    }
    Ok(results)
}

/// [τ₂(t)|_Q, τ₂(t′)|_Q] = 0 on the charge-0 sector.
fn tau2_commute<T: sipotts_core::Ring, const N: usize>(lat: &LatticeConfig, q: usize) -> CheckResult {
    let mut res = match lat.with_q(q).and_then(|c| tau2_edge::<T, N>(&c)) {
        Ok(tau) => op_poly_commutator_zero(&tau, &tau, &Sector::new(lat, 0)),
        Err(e) => {
            let mut r = CheckResult::new("tau2.commute");
            r.fail(json!({ "error": e.to_string() }));
            r
        }
    };
    res.id = "tau2.commute".into();
    res.params.insert("N".into(), json!(lat.n));
    res.params.insert("L".into(), json!(lat.l));
    res.params.insert("Q".into(), json!(q));
    res
}

fn spectrum_multiplicity<const N: usize>(rc: &RunConfig, lat: &LatticeConfig) -> CheckResult {
    let tau = exact("spectrum", || embed_tau2::<CheckedI64, N>(lat), || embed_tau2::<BigRational, N>(lat));
    match tau {
        Ok(tau) => verify_spectrum_multiplicity(&tau, lat, 1 << lat.r(), &rc.t_samples(), rc.tol.sqrt(), rc.tol),
        Err(e) => failed("spectrum.multiplicity", lat, &e),
    }
}

fn failed(id: &str, lat: &LatticeConfig, e: &Error) -> CheckResult {
    let mut r = CheckResult::new(id).param("N", lat.n).param("L", lat.l);
    r.fail(json!({ "error": e.to_string() }));
    r
}

/// x₀⁻, x₁⁻, x₀⁺, x₋₁⁺ on the charge-0 sector, read from and written to
/// the operator cache when one is configured.
pub fn base_generators<T: CoeffText, const N: usize>(
    rc: &RunConfig,
    lat: &LatticeConfig,
) -> Result<LoopGenerators<Cyclotomic<T, N>>> {
    let cache = rc.cache_dir.as_ref().map(OperatorCache::new);
    raw_generators_with(lat, |label, sector| {
        let build = || divided_power_sector::<T, N>(label, 1, sector);
        match &cache {
            None => build(),
            Some(cache) => {
                let (op, outcome) = cache.get_or_build(lat, label.name(), build)?;
                match outcome {
                    sipotts_core::CacheOutcome::Rebuilt(why) => warn!("cache entry {} rebuilt: {why}", label.name()),
                    outcome => info!("cache entry {}: {outcome:?}", label.name()),
                }
                Ok(op)
            }
        }
    })
}

/// Generator-based checks, in dependency order: base generators over `B`,
/// then, lifted to the field `T`, h₀ and the extension to −1 ≤ j ≤ r + 1,
/// then the numerical sl₂ stage. h₀ is only formed when a check needs it.
fn loop_stage<B, T, const N: usize>(
    rc: &RunConfig,
    lat: &LatticeConfig,
    ids: &[&'static str],
    lift: impl Fn(&B) -> T + Copy,
) -> Vec<CheckResult>
where
    B: CoeffText,
    T: Field + RealCoeff + ExactLift + CoeffText,
{
    let on = |id: &str| ids.contains(&id);
    let fail_rest = |out: &mut Vec<CheckResult>, e: &Error| {
        let done: Vec<String> = out.iter().map(|r| r.id.clone()).collect();
        for id in ids.iter().filter(|id| !done.iter().any(|d| d == *id)) {
            out.push(failed(id, lat, e));
        }
    };
    let mut out = Vec::new();
    let data = match lambda_coefficients(lat) {
        Ok(d) => d,
        Err(e) => {
            fail_rest(&mut out, &e);
            return out;
        }
    };
    let base = match base_generators::<B, N>(rc, lat) {
        Ok(g) => g,
        Err(e) => {
            fail_rest(&mut out, &e);
            return out;
        }
    };
    if on("serre.partial") {
        for n in 0..=data.r {
            out.push(verify_partial_serre(&base, n));
        }
    }
    let sector_len = base.dim();
    if on("serre.q0.sampled") {
        let states = serre_states(sector_len, Some(rc.samples), rc.seed);
        out.push(verify_serre("serre.q0.sampled", &base, &states).param("seed", rc.seed));
    }
    if on("serre.q0.exhaustive") {
        if sector_len > SERRE_EXHAUSTIVE_MAX {
            let reason = format!("charge-0 sector has {sector_len} states (limit {SERRE_EXHAUSTIVE_MAX}); use serre.q0.sampled");
            out.push(CheckResult::skip("serre.q0.exhaustive", reason).param("N", lat.n).param("L", lat.l));
        } else {
            out.push(verify_serre("serre.q0.exhaustive", &base, &serre_states(sector_len, None, rc.seed)));
        }
    }
    let needs_h0 = ["loop.h0", "highest_weight"].iter().any(|id| on(id)) || ids.iter().any(|id| EXTENDED.contains(id) || SL2.contains(id));
    if !needs_h0 {
        return out;
    }
    let mut gens = match with_h0(base.map(move |c| c.map_coeffs(lift))) {
        Ok(g) => g,
        Err(e) => {
            fail_rest(&mut out, &e);
            return out;
        }
    };
    drop(base);
    if on("loop.h0") {
        out.push(verify_h0(&gens));
    }
    if on("highest_weight") {
        out.push(verify_highest_weight(&gens, &data));
    }
    if !ids.iter().any(|id| EXTENDED.contains(id) || SL2.contains(id)) {
        return out;
    }

    let r = data.r as i64;
    let ext = extend_generators(&mut gens, -1, r + 1);
    if on("loop.extend") {
        out.push(ext);
    }
    if on("induction.xpm") {
        out.push(verify_induction(&gens, &data));
    }
    if on("finite.xminus") {
        out.push(verify_finiteness(&gens, &data, Family::XMinus));
    }
    if on("finite.xplus") {
        out.push(verify_finiteness(&gens, &data, Family::XPlus));
    }
    if !ids.iter().any(|id| *id == "drinfeld.roots" || SL2.contains(id)) {
        return out;
    }

    let roots = match drinfeld_roots(&data, rc.tol) {
        Ok(roots) => roots,
        Err(e) => {
            fail_rest(&mut out, &e);
            return out;
        }
    };
    if on("drinfeld.roots") {
        let mut res = CheckResult::new("drinfeld.roots").param("N", lat.n).param("L", lat.l).param("tol", rc.tol);
        res.observe("roots", roots.to_json());
        out.push(res);
    }
    if !ids.iter().any(|id| SL2.contains(id)) {
        return out;
    }
    let dec = match build_sl2(&gens, roots, rc.tol) {
        Ok(d) => d,
        Err(e) => {
            fail_rest(&mut out, &e);
            return out;
        }
    };
    if on("sl2.relations") {
        out.push(verify_sl2_relations(&dec, rc.tol));
    }
    if on("sl2.nilpotency") {
        out.push(verify_nilpotency(&dec, rc.tol));
    }
    if on("sl2.reconstruction") {
        out.push(verify_reconstruction(&dec, rc.tol));
    }
    if on("sl2.eigenspace") || on("sl2.eigenvectors") {
        let space = generate_eigenspace(&dec, rc.tol);
        if on("sl2.eigenspace") {
            out.push(verify_eigenspace_rank(&dec, &space, rc.tol));
        }
        if on("sl2.eigenvectors") {
            match embed_tau2::<T, N>(lat) {
                Ok(tau) => out.push(verify_eigenvectors(&tau, lat, &space, &rc.t_samples(), rc.tol)),
                Err(e) => out.push(failed("sl2.eigenvectors", lat, &e)),
            }
        }
    }
    out
}
