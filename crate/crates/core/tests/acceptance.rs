//! Acceptance suite: one line per criterion, nonzero exit on any
//! unexpected failure.

use std::time::Instant;

use num_complex::Complex64;
use serde_json::Value;

use sipotts_core::drinfeld::lambda_coefficients;
use sipotts_core::loop_algebra::{
    base_generators, extend_generators, raw_generators, serre_states, verify_adq_eigen, verify_adq_identities,
    verify_comm_identities, verify_comm_sector, verify_finiteness, verify_highest_weight, verify_induction, verify_lambda,
    verify_serre,
};
use sipotts_core::scalar::catch_overflow;
use sipotts_core::sl2::{
    build_sl2, drinfeld_roots, embed_tau2, generate_eigenspace, verify_nilpotency, verify_reconstruction,
    verify_sl2_relations, verify_spectrum_multiplicity,
};
use sipotts_core::sparse::vector_poly_matches;
use sipotts_core::state::ground_states;
use sipotts_core::transfer::{epsilon, fourier_consistency, tau2_edge};
use sipotts_core::{
    BigRational, CheckResult, CheckedI64, CheckedRational, Cyclo, DrinfeldData, Family, LatticeConfig,
    FastCyclo, LoopGenerators,
};

struct Outcome {
    pass: bool,
    /// Holds for a documented reason even though `pass` is false.
    expected_failure: bool,
    note: String,
}

impl Outcome {
    fn from_checks(checks: &[CheckResult]) -> Self {
        match checks.iter().find(|c| !c.passed()) {
            None => Outcome { pass: true, expected_failure: false, note: format!("{} checks", checks.len()) },
            Some(c) => Outcome {
                pass: false,
                expected_failure: false,
                note: format!("{} {} failed: {}", c.id, Value::Object(c.params.clone()), c.witness.clone().unwrap_or(Value::Null)),
            },
        }
    }

    fn within(mut self, start: Instant, limit_s: f64) -> Self {
        let s = start.elapsed().as_secs_f64();
        if s > limit_s {
            self.pass = false;
            self.note = format!("{}; took {s:.1} s, limit {limit_s} s", self.note);
        }
        self
    }
}

fn cfg(n: usize, l: usize) -> LatticeConfig {
    LatticeConfig::new(n, l, 0).unwrap()
}

fn fast_or_exact(fast: impl FnOnce() -> CheckResult, exact: impl FnOnce() -> CheckResult) -> CheckResult {
    catch_overflow(fast).unwrap_or_else(|_| exact())
}

/// Extended generators x_j^±, h_j for −1 ≤ j ≤ r + 1 at N = 3.
fn extended(l: usize) -> (LoopGenerators<FastCyclo<3>>, DrinfeldData, CheckResult) {
    let c = cfg(3, l);
    let data = lambda_coefficients(&c).unwrap();
    let mut g = base_generators::<CheckedRational, 3>(&c).unwrap();
    let ext = extend_generators(&mut g, -1, data.r as i64 + 1);
    (g, data, ext)
}

fn printed_form_failures(c: &CheckResult) -> Vec<String> {
    c.observed
        .get("printed_form")
        .and_then(Value::as_object)
        .map(|m| m.iter().filter(|(_, v)| *v != "holds").map(|(k, _)| k.clone()).collect())
        .unwrap_or_default()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    for l in [3, 6] {
        let c = cfg(3, l);
        let tau = tau2_edge::<BigRational, 3>(&c).unwrap();
        let (omega, _) = ground_states::<Cyclo<3>>(&c);
        // (1 − ωt)^L + (1 − t)^L
        let eigen = epsilon::<BigRational, 3>(l, 0);
        if let Some(k) = vector_poly_matches(&tau.apply(&omega), &eigen, &omega) {
            return Outcome { pass: false, expected_failure: false, note: format!("L={l}: mismatch at t^{k}") };
        }
    }
    Outcome { pass: true, expected_failure: false, note: "exact in t for L=3,6".into() }.within(start, 5.0)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let tables: [(usize, usize, &[i64]); 3] = [(3, 3, &[1, 7, 1]), (3, 6, &[1, 50, 141, 50, 1]), (4, 4, &[1, 31, 31, 1])];
    let mut checks = Vec::new();
    for (n, l, expect) in tables {
        let c = cfg(n, l);
        let data = lambda_coefficients(&c).unwrap();
        if data.lambdas != expect {
            return Outcome { pass: false, expected_failure: false, note: format!("N={n} L={l}: {:?}", data.lambdas) };
        }
        checks.push(verify_lambda(&c));
    }
    Outcome::from_checks(&checks).within(start, 1.0)
}

fn criterion_3() -> Outcome {
    let g = base_generators::<CheckedI64, 3>(&cfg(3, 6)).unwrap();
    let states = serre_states(g.dim(), None, 0);
    let exhaustive = verify_serre("serre.q0.exhaustive", &g, &states);
    let states_ok = states.len() == 243;
    let g = raw_generators::<CheckedI64, 4>(&cfg(4, 8)).unwrap();
    let sampled = verify_serre("serre.q0.sampled", &g, &serre_states(g.dim(), Some(100), 0));
    let mut out = Outcome::from_checks(&[exhaustive, sampled]);
    if !states_ok {
        out.pass = false;
        out.note = format!("exhaustive sweep covered {} states", states.len());
    } else if out.pass {
        out.note = "243 states at N=3 L=6; 100 seeded states at N=4 L=8".into();
    }
    out
}

fn criterion_4() -> Outcome {
    let mut checks = vec![
        verify_comm_identities::<BigRational, 3>(&cfg(3, 3)),
        verify_comm_identities::<BigRational, 2>(&cfg(2, 2)),
    ];
    let printed: Vec<String> = checks.iter().flat_map(printed_form_failures).collect();
    for l in [3, 6] {
        let c = cfg(3, l);
        checks.push(fast_or_exact(|| verify_comm_sector::<CheckedI64, 3>(&c), || verify_comm_sector::<BigRational, 3>(&c)));
    }
    let corrected = Outcome::from_checks(&checks);
    if !corrected.pass {
        return corrected;
    }
    if printed.is_empty() {
        return Outcome { pass: true, expected_failure: false, note: "all four identities and the sector statement".into() };
    }
    Outcome {
        pass: false,
        expected_failure: true,
        note: format!(
            "as printed, {} fail; they hold exactly with the opposite overall sign, and the other two identities and \
             [τ₂, g] = 0 on the charge-0 sector (N=3 L=3,6) hold",
            printed.join(", ")
        ),
    }
}

fn criterion_5() -> Outcome {
    let mut checks = Vec::new();
    for l in [3, 6] {
        let c = cfg(3, l);
        let g = base_generators::<BigRational, 3>(&c).unwrap();
        checks.push(verify_highest_weight(&g, &lambda_coefficients(&c).unwrap()));
    }
    Outcome::from_checks(&checks)
}

fn criterion_6(ext: &[(LoopGenerators<FastCyclo<3>>, DrinfeldData, CheckResult)]) -> Outcome {
    let mut checks = Vec::new();
    for (g, data, e) in ext {
        checks.push(e.clone());
        checks.push(verify_induction(g, data));
        checks.push(verify_finiteness(g, data, Family::XMinus));
        checks.push(verify_finiteness(g, data, Family::XPlus));
    }
    Outcome::from_checks(&checks)
}

fn criterion_7_8(ext: &[(LoopGenerators<FastCyclo<3>>, DrinfeldData, CheckResult)]) -> (Outcome, Outcome) {
    let start = Instant::now();
    let tol = 1e-8;
    let samples = [Complex64::new(0.5, 0.0), Complex64::new(0.3, 0.2)];
    let mut degeneracy = Vec::new();
    let mut decomposition = Vec::new();
    let mut ranks = Vec::new();
    for (g, data, _) in ext {
        let c = *g.config();
        let expected = 1usize << ((c.n - 1) * c.l / c.n);
        let dec = build_sl2(g, drinfeld_roots(data, tol).unwrap(), tol).unwrap();
        let space = generate_eigenspace(&dec, 1e-9);
        ranks.push(space.rank);
        let mut rank = CheckResult::new("eigenspace.rank").param("L", c.l);
        if space.rank != expected {
            rank.fail(serde_json::json!({ "rank": space.rank, "expected": expected }));
        }
        degeneracy.push(rank);
        let tau = embed_tau2::<CheckedRational, 3>(&c).unwrap();
        degeneracy.push(verify_spectrum_multiplicity(&tau, &c, expected, &samples, 1e-6, 1e-9));
        decomposition.push(verify_sl2_relations(&dec, tol));
        decomposition.push(verify_nilpotency(&dec, tol));
        decomposition.push(verify_reconstruction(&dec, tol));
    }
    let mut seven = Outcome::from_checks(&degeneracy).within(start, 120.0);
    if seven.pass {
        seven.note = format!("ranks {ranks:?}, multiplicities match at t* = 0.5, 0.3+0.2i");
    }

    let rs = drinfeld_roots(&lambda_coefficients(&cfg(3, 3)).unwrap(), tol).unwrap();
    let s5 = 5f64.sqrt();
    let closed = [(-7.0 - 3.0 * s5) / 2.0, (-7.0 + 3.0 * s5) / 2.0];
    let err = rs.roots.iter().zip(closed).map(|(z, x)| (z - x).norm()).fold(0.0, f64::max);
    let mut eight = Outcome::from_checks(&decomposition);
    if err >= 1e-10 {
        eight.pass = false;
        eight.note = format!("roots of z²+7z+1 off by {err:.2e}");
    } else if eight.pass {
        let worst = decomposition
            .iter()
            .filter_map(|c| c.observed.get("max_residual").and_then(Value::as_f64))
            .fold(0.0, f64::max);
        eight.note = format!("max residual {worst:.1e}; z²+7z+1 roots within {err:.1e}");
    }
    (seven, eight)
}

fn criterion_9() -> Outcome {
    let c = cfg(3, 3);
    let mut checks = Vec::new();
    for m in [1, 2] {
        checks.push(verify_adq_identities::<BigRational, 3>(&c, m));
    }
    let printed: Vec<String> = checks
        .iter()
        .flat_map(|r| printed_form_failures(r).into_iter().map(move |k| format!("{k} (m={})", r.params["m"])))
        .collect();
    for q in [1, 2] {
        checks.push(verify_adq_eigen::<BigRational, 3>(&c, q));
    }
    let corrected = Outcome::from_checks(&checks);
    if !corrected.pass {
        return corrected;
    }
    if printed.is_empty() {
        return Outcome { pass: true, expected_failure: false, note: "Q, m ∈ {1, 2}".into() };
    }
    Outcome {
        pass: false,
        expected_failure: true,
        note: format!(
            "as printed, {} fail (one term has the wrong sign; on the C line (D₀−1) and (A_L−1) are also \
             interchanged); the corrected identities and the eigenvector relations hold for Q, m ∈ {{1, 2}}",
            printed.join(", ")
        ),
    }
}

fn criterion_10() -> Outcome {
    Outcome::from_checks(&[
        fourier_consistency::<BigRational, 2>(&cfg(2, 2)),
        fourier_consistency::<BigRational, 3>(&cfg(3, 2)),
        fourier_consistency::<BigRational, 3>(&cfg(3, 3)),
    ])
}

fn main() {
    let ext: Vec<_> = [3, 6].into_iter().map(extended).collect();
    let (seven, eight) = criterion_7_8(&ext);
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "exact ground-state eigenvalue of τ₂|_{Q=0}", criterion_1()),
        (2, "Λ tables, two methods, palindromy, Σ Λ_n = N^(L−1)", criterion_2()),
        (3, "Serre relations on charge-0 states", criterion_3()),
        (4, "commutation identities of τ₂ with the four products", criterion_4()),
        (5, "highest-weight relations on |Ω⟩ and |Ω̄⟩", criterion_5()),
        (6, "induction and finiteness", criterion_6(&ext)),
        (7, "degeneracy 2^r of the ground eigenvalue", seven),
        (8, "sl₂ decomposition", eight),
        (9, "Q ≠ 0 relations", criterion_9()),
        (10, "Fourier cross-representation consistency", criterion_10()),
    ];
    let mut unexpected = 0;
    for (k, title, o) in &results {
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {k:>2} {status}  {title}: {}", o.note);
        if !o.pass && !o.expected_failure {
            unexpected += 1;
        }
    }
    let failing: Vec<String> = results.iter().filter(|(_, _, o)| !o.pass).map(|(k, _, _)| k.to_string()).collect();
    println!(
        "{} of {} criteria pass{}",
        results.len() - failing.len(),
        results.len(),
        if failing.is_empty() { String::new() } else { format!("; failing: {}", failing.join(", ")) }
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
