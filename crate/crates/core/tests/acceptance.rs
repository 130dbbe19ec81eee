//! Acceptance battery. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use dowling_core::bell::{bell_complete, bell_inner, bell_partial, bell_partial_series};
use dowling_core::dowling::{
    dobinski_eval, stirling2, stirling2_degen_rows, stirling2_prob_rows, whitney_triangle, Route,
};
use dowling_core::identities::{run_inversion_battery, run_suite, Checker, SuiteBounds};
use dowling_core::montecarlo::estimate_sum_degen_moment;
use dowling_core::ratcore::{binom, degen_falling, factorial, frac, int, pow, to_f64};
use dowling_core::{ModelKind, MomentModel, Params, PolyX, Rational};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MC_SIGMAS: f64 = 5.0;
const MC_SAMPLES: usize = 100_000;
const MC_SEEDS: u64 = 50;
const MC_MIN_PASS_RATE: f64 = 0.99;
const DOBINSKI_REL_TOL: f64 = 1e-10;

fn models() -> Vec<MomentModel> {
    ModelKind::builtins().into_iter().map(|k| MomentModel::new(k).unwrap()).collect()
}

fn stochastic_models() -> Vec<MomentModel> {
    models()
        .into_iter()
        .filter(|y| !matches!(y.kind(), ModelKind::PointMass { .. }))
        .collect()
}

fn grid() -> Vec<Params> {
    let lambdas = [int(0), int(1), frac(1, 2), frac(-1, 3)];
    let mut out = Vec::new();
    for m in 1..=3 {
        for l in &lambdas {
            out.push(Params::new(m, l.clone(), 1).unwrap());
        }
    }
    out
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(detail: String) -> Outcome {
    Outcome { pass: true, detail }
}

fn fail(detail: String) -> Outcome {
    Outcome { pass: false, detail }
}

/// Routes EGF, alternating sum, Stirling expansion and Bell form agree on
/// `0 ≤ k ≤ n ≤ 12` over every built-in model and the `(m, λ)` grid.
fn four_route_agreement() -> Outcome {
    let mut entries = 0usize;
    for y in models() {
        for p in grid() {
            let reference = whitney_triangle(&y, &p, 12, Route::Egf).unwrap();
            for route in [Route::AltSum, Route::StirlingExpand, Route::BellForm] {
                let t = whitney_triangle(&y, &p, 12, route).unwrap();
                if t != reference {
                    return fail(format!("{} {p}: {route:?} disagrees with Egf", y.kind()));
                }
            }
            entries += reference.rows().iter().map(Vec::len).sum::<usize>();
        }
    }
    ok(format!("{entries} triangle entries, 4 routes each"))
}

/// `(x)_k` as a polynomial.
fn falling_poly(k: usize) -> PolyX {
    (0..k).fold(PolyX::constant(int(1)), |p, i| p.mul(&PolyX::new(vec![int(-(i as i64)), int(1)])))
}

/// `(a x + b)_{n,λ}` as a polynomial.
fn degen_linear_poly(a: &Rational, b: &Rational, n: usize, lambda: &Rational) -> PolyX {
    (0..n).fold(PolyX::constant(int(1)), |p, i| {
        p.mul(&PolyX::new(vec![b - lambda * int(i as i64), a.clone()]))
    })
}

/// Point-mass Whitney numbers expand `(mx + r)_{n,λ}` over `m^k (x)_k`; at
/// `λ = 0` they match the closed form of the classical `r`-Whitney numbers
/// and the `((x-1)/m)_k` expansion of `x^n`.
fn defining_relations() -> Outcome {
    let one = MomentModel::point_mass(int(1));
    let mut checked = 0usize;
    for p in grid() {
        let m = p.m_rat();
        for r in 0..=2u32 {
            let pr = p.with_r(r);
            let t = whitney_triangle(&one, &pr, 10, Route::Egf).unwrap();
            for n in 0..=10 {
                let lhs = degen_linear_poly(&m, &pr.r_rat(), n, &p.lambda);
                let rhs = (0..=n).fold(PolyX::zero(), |acc, k| {
                    acc.add(&falling_poly(k).scale(&(t.get(n, k) * pow(&m, k))))
                });
                if lhs != rhs {
                    return fail(format!("{pr} n={n}: {lhs} != {rhs}"));
                }
                checked += 1;
                if p.lambda.is_zero() {
                    // W_m^{(r)}(n,k) = (1/(m^k k!)) Σ_j C(k,j)(-1)^{k-j}(mj + r)^n
                    for k in 0..=n {
                        let s: Rational = (0..=k)
                            .map(|j| {
                                let v = binom(k, j) * pow(&(&m * int(j as i64) + pr.r_rat()), n);
                                if (k - j) % 2 == 0 { v } else { -v }
                            })
                            .sum();
                        let closed = s / (pow(&m, k) * factorial(k));
                        if closed != t.get(n, k) {
                            return fail(format!("classical {pr} ({n},{k}): {closed} != {}", t.get(n, k)));
                        }
                    }
                    if r == 1 {
                        // x^n = Σ_k W_m(n,k) m^k ((x-1)/m)_k
                        let shifted = |k: usize| {
                            degen_linear_poly(&(int(1) / &m), &(-(int(1) / &m)), k, &int(1))
                        };
                        let rhs = (0..=n).fold(PolyX::zero(), |acc, k| {
                            acc.add(&shifted(k).scale(&(t.get(n, k) * pow(&m, k))))
                        });
                        if rhs != PolyX::monomial(int(1), n) {
                            return fail(format!("x^n expansion {pr} n={n}"));
                        }
                    }
                    checked += 1;
                }
            }
        }
    }
    ok(format!("{checked} polynomial identities"))
}

/// The full identity suite on every built-in model and `(m, λ)`, plus 20
/// random binomial-inversion round trips.
fn theorem_suite() -> Outcome {
    let bounds = SuiteBounds { max_n: 8, max_big_n: 6, convolution_max_n: 6, min_points: 5 };
    let mut total = 0usize;
    for y in models() {
        for p in grid() {
            let checker = Checker::new(&y, &p);
            let reports = run_suite(&checker, &bounds).unwrap();
            if let Some(bad) = reports.iter().find(|r| !r.pass) {
                return fail(format!("{:?} {} {p} {:?}", bad.theorem, bad.model, bad.indices));
            }
            total += reports.len();
        }
    }
    let inversions = run_inversion_battery(20, 10, 2024);
    if inversions.iter().any(|r| !r.pass) {
        return fail("binomial inversion round trip failed".into());
    }
    total += inversions.len();
    ok(format!("{total} exact identity checks"))
}

/// Enumeration vs series for `B_{n,k}` and complete Bell vs `exp`.
fn bell_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0usize;
    for _ in 0..100 {
        let args: Vec<Rational> = (0..10)
            .map(|_| frac(rng.random_range(-50..=50), rng.random_range(1..=12)))
            .collect();
        let inner = bell_inner(&args, 10);
        let exp = inner.exp().unwrap();
        for k in 0..=10 {
            let series = bell_partial_series(k, &inner).unwrap();
            for n in k..=10 {
                if bell_partial(n, k, &args).unwrap() != series.coeffs()[n] {
                    return fail(format!("B_{{{n},{k}}} mismatch for {args:?}"));
                }
                checked += 1;
            }
        }
        for n in 0..=10 {
            if bell_complete(n, &args).unwrap() != exp.coeffs()[n] {
                return fail(format!("B_{n} mismatch for {args:?}"));
            }
            checked += 1;
        }
    }
    ok(format!("{checked} Bell values over 100 argument vectors"))
}

/// Truncated Dobinski series against exact polynomial evaluation.
fn dobinski_convergence() -> Outcome {
    let xs = [frac(1, 2), int(1), int(2)];
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for y in stochastic_models() {
        for p in grid() {
            for r in [1u32, 0, 2] {
                let pr = p.with_r(r);
                let t = whitney_triangle(&y, &pr, 6, Route::Egf).unwrap();
                for n in 0..=6 {
                    let poly = t.dowling_poly(n);
                    for x in &xs {
                        let exact = to_f64(&poly.eval(x));
                        let approx = match dobinski_eval(&y, &pr, n, x, DOBINSKI_REL_TOL) {
                            Ok(v) => v,
                            Err(e) => return fail(format!("{} {pr} n={n} x={x}: {e}", y.kind())),
                        };
                        let gap = (approx - exact).abs();
                        let rel = if exact == 0.0 { gap } else { gap / exact.abs() };
                        worst = worst.max(rel);
                        if rel > DOBINSKI_REL_TOL {
                            return fail(format!(
                                "{} {pr} n={n} x={x}: series {approx} vs exact {exact} (rel {rel:e})",
                                y.kind()
                            ));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    ok(format!("{checked} evaluations, worst relative gap {worst:.2e}"))
}

/// Monte Carlo means within 5 standard errors of the exact moments over a
/// 50-seed battery per `(model, k, n)`.
fn monte_carlo_consistency() -> Outcome {
    let lambda = frac(1, 2);
    let (scale, shift) = (2u32, 1u32);
    let mut worst_rate = 1.0f64;
    let mut failures = Vec::new();
    let mut runs = 0usize;
    for y in stochastic_models() {
        for (k, n) in [(1usize, 1usize), (2, 2), (3, 3)] {
            let mut passed = 0u64;
            for seed in 0..MC_SEEDS {
                let est = estimate_sum_degen_moment(&y, k, scale, shift, n, &lambda, MC_SAMPLES, seed).unwrap();
                runs += 1;
                if est.within(MC_SIGMAS) {
                    passed += 1;
                } else {
                    failures.push(format!("{} k={k} n={n} seed={seed} z={:.2}", y.kind(), est.z_score()));
                }
            }
            worst_rate = worst_rate.min(passed as f64 / MC_SEEDS as f64);
        }
    }
    for f in &failures {
        println!("    outside {MC_SIGMAS} sigma: {f}");
    }
    let detail = format!("{runs} runs, worst battery pass rate {:.1}%", 100.0 * worst_rate);
    if worst_rate >= MC_MIN_PASS_RATE { ok(detail) } else { fail(detail) }
}

/// `{n k}_0 = S(n,k)` and `{n k}_{1,λ} = {n k}_λ`.
fn stirling_bridges() -> Outcome {
    let classical = stirling2_degen_rows(12, &Rational::zero());
    for n in 0..=12 {
        for k in 0..=n {
            if classical[n][k] != stirling2(n, k) {
                return fail(format!("lambda=0 ({n},{k})"));
            }
        }
    }
    let one = MomentModel::point_mass(int(1));
    for lambda in [int(0), int(1), frac(1, 2), frac(-1, 3), frac(7, 5)] {
        let degen = stirling2_degen_rows(12, &lambda);
        if stirling2_prob_rows(&one, 12, &lambda).unwrap() != degen {
            return fail(format!("point mass vs degenerate at lambda={lambda}"));
        }
        // Defining relation (x)_{n,λ} = Σ_k {n k}_λ (x)_k, spot-checked at x = 13/4.
        let x = frac(13, 4);
        for (n, row) in degen.iter().enumerate() {
            let mut rhs = Rational::zero();
            let mut fall = Rational::one();
            for (k, s) in row.iter().enumerate() {
                rhs += s * &fall;
                fall *= &x - int(k as i64);
            }
            if rhs != degen_falling(&x, n, &lambda) {
                return fail(format!("defining relation n={n} lambda={lambda}"));
            }
        }
    }
    ok("n <= 12, 5 values of lambda".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("AC1 four-route Whitney agreement (exact)", four_route_agreement),
        ("AC2 defining relations and classical limit (exact)", defining_relations),
        ("AC3 identity suite (exact)", theorem_suite),
        ("AC4 Bell enumeration vs series (exact)", bell_oracle),
        ("AC5 Dobinski convergence (rel 1e-10)", dobinski_convergence),
        ("AC6 Monte Carlo consistency (5 sigma, >=99% of 50 seeds)", monte_carlo_consistency),
        ("AC7 Stirling bridges (exact)", stirling_bridges),
    ];
    let mut all = true;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        all &= outcome.pass;
        println!(
            "[{}] {name}: {} ({:.1}s)",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if all { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
