//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p qquasi --test acceptance`. The process fails when
//! a criterion fails, except for those listed in `UNATTAINABLE`, whose
//! failure is expected and explained there.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use qquasi::catalog::{self, catalog_entries, lookup, BaseSequence, Kind};
use qquasi::linrep::{rat, sub_vec, LinRepError, Matrix};
use qquasi::quasi::{split, split_evaluate, verify_definition};
use qquasi::stats::{
    self, brute_force_f_coeff, clt_experiment, count_series_check, denominator_identity, exact_constants_additive,
    f_coefficients, Scale,
};
use qquasi::{BigRational, BigUint, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_160_517;

/// Criteria that cannot be met as stated. Criterion 12 asks for a raw KS
/// distance below 0.05 for the NAF weight at k = 64 (and K = 10^18). That
/// function is integer valued, so its standardized values lie on a lattice
/// of spacing 1/(σ√k) ≈ 0.46; a lattice distribution with that spacing is at
/// KS distance about φ(0)·0.46/2 ≈ 0.09 from any continuous law, and the
/// O(1) offset of the finite-k mean adds to it. The suite still runs the
/// experiment and reports the raw, continuity-corrected and
/// sample-standardized distances.
const UNATTAINABLE: &[usize] = &[12];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn b(n: u64) -> BigUint {
    BigUint::from(n)
}

fn exact(v: &Value) -> BigRational {
    v.as_exact().expect("exact value").clone()
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

fn known_values() -> Outcome {
    let c = lookup("c_0101").unwrap();
    let h = catalog::h_naf();
    let r = catalog::r_opt_function();
    let got = [
        c.eval_u64(469),
        c.eval_u64(22),
        c.eval_u64(240150),
        h.eval_u64(314159265),
        r.eval_u64(204280974),
        r.eval_u64(3),
        r.eval_u64(45),
        r.eval_u64(41),
        r.eval_u64(7),
    ];
    let want = [2, 1, 3, 11, 10, 2, 5, 1, 1].map(Value::from_int);
    let text: Vec<String> = got.iter().map(ToString::to_string).collect();
    Outcome::new(got == want, format!("c_0101(469, 22, 240150), h_naf(314159265), r_opt(204280974, 3, 45, 41, 7) = {}", text.join(", ")))
}

fn oracle_equivalence() -> Outcome {
    let oracle = common::signed_representation_oracle(1 << 9, 12);
    let mut mismatches = Vec::new();
    for n in 0..(1u64 << 9) {
        let (weight, count) = oracle[&(n as i64)];
        if catalog::r_opt(&b(n)) != b(count) || qquasi::digits::h_naf(&b(n)) != weight as u64 {
            mismatches.push(n);
        }
    }
    Outcome::new(mismatches.is_empty(), format!("512 values checked against all 3^12 signed digit strings, mismatches: {mismatches:?}"))
}

fn multiplicative_classifier() -> Outcome {
    let rep = common::optimal_count_rep();
    let profile = rep.parameter_profile(Kind::Multiplicative, 8).unwrap();
    let optimal_ok = rep.is_zero_insensitive()
        && rep.is_minimal()
        && profile == [false, false, false, true, true, true, true, true, true];

    let redundant = common::redundant_two_pow_rep();
    let raw_fails = (0..=8).all(|r| !redundant.raw_multiplicative_test(r) && redundant.matrix(0).pow(r).rank() == 2);
    let rejected = matches!(redundant.is_quasimultiplicative(0), Err(LinRepError::NotMinimal { .. }));
    let min = redundant.minimize().unwrap();
    let min_ok = min.dim() == 1
        && min.matrix(0) == &Matrix::from_i64(&[&[1]])
        && min.matrix(1) == &Matrix::from_i64(&[&[2]])
        && min.is_quasimultiplicative(0).unwrap();
    Outcome::new(
        optimal_ok && raw_fails && rejected && min_ok,
        format!(
            "6-dim profile r=0..8 {profile:?}; redundant rep: raw test fails for r<=8: {raw_fails}, rejected as non-minimal: {rejected}, minimized to dim {} passing at r=0: {min_ok}",
            min.dim()
        ),
    )
}

fn additive_classifier() -> Outcome {
    let rep = common::naf_rep();
    let r = rep.min_parameter(Kind::Additive, 8).unwrap();
    let u = rep.affine_closure_u();
    let v = rep.affine_closure_v();
    let (m0, m1) = (rep.matrix(0), rep.matrix(1));
    let row = |ms: &[&Matrix]| ms.iter().fold(rep.u().to_vec(), |x, m| m.left_mul(&x));
    let col = |ms: &[&Matrix]| ms.iter().rev().fold(rep.v().to_vec(), |y, m| m.right_mul(&y));
    let spanning_u = [row(&[m1]), row(&[m1, m1]), row(&[m1, m0, m1])].map(|w| u.contains(&sub_vec(&w, rep.u())));
    let spanning_v = [col(&[m1]), col(&[m1, m1]), col(&[m1, m0, m1])].map(|w| v.contains(&sub_vec(&w, rep.v())));
    let pass = r == Some(2)
        && u.len() == 3
        && v.len() == 3
        && spanning_u.iter().chain(&spanning_v).all(|&x| x)
        && !rep.is_quasiadditive(1).unwrap();
    Outcome::new(pass, format!("minimal r = {r:?}, dim U = {}, dim V = {}, listed spanning vectors contained: {spanning_u:?} {spanning_v:?}", u.len(), v.len()))
}

fn transducer_test() -> Outcome {
    let t = common::naf_transducer();
    let at2 = t.check_reset(2);
    let at1 = t.check_reset(1);
    let rep = t.to_linear_representation();
    let mismatches = (0..1u64 << 10).filter(|&n| rep.evaluate(&b(n)) != t.output_sum(&b(n))).count();
    let block = |m: &Matrix, cols: std::ops::Range<usize>| -> Vec<Vec<_>> {
        (0..3).map(|i| m.row(i)[cols.clone()].to_vec()).collect()
    };
    let n0 = Matrix::from_i64(&[&[1, 0, 0], &[1, 0, 0], &[0, 1, 0]]).to_rows();
    let n1 = Matrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 1]]).to_rows();
    let delta0: Vec<_> = [0, 0, 1].map(rat).to_vec();
    let delta1: Vec<_> = [1, 0, 0].map(rat).to_vec();
    let blocks_ok = block(rep.matrix(0), 0..3) == n0
        && block(rep.matrix(1), 0..3) == n1
        && rep.matrix(0).column(3)[..3] == delta0[..]
        && rep.matrix(1).column(3)[..3] == delta1[..]
        && rep.v()[..3] == [0, 0, 1].map(rat)[..];
    let pass = at2.passes() && !at1.leads_to_initial && mismatches == 0 && blocks_ok;
    Outcome::new(
        pass,
        format!(
            "r=2: reset to initial {}, outputs = finals {}, zeros neutral {}; r=1: reset to initial {}; representation blocks as listed {blocks_ok}, disagreements for n<2^10: {mismatches}",
            at2.leads_to_initial, at2.reset_output_is_final, at2.trailing_zeros_neutral, at1.leads_to_initial
        ),
    )
}

fn split_evaluation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = Vec::new();
    for f in catalog_entries() {
        for _ in 0..10_000 {
            let bits = rng.random_range(1..=96u32);
            let n = BigUint::from(rng.random::<u128>() >> (128 - bits));
            if split_evaluate(&f, &n) != f.eval(&n) {
                failures.push(format!("{}({n})", f.name()));
                break;
            }
        }
    }
    let e1 = split(&b(314159265), 2, 2);
    let e2 = split(&b(204280974), 2, 3);
    let parts_ok = e1.parts == [4, 348, 432, 80, 1].map(b)
        && e1.reduced == [1, 87, 27, 5, 1].map(b)
        && e2.parts == [48, 360, 328, 14].map(b)
        && e2.reduced == [3, 45, 41, 7].map(b);
    Outcome::new(
        failures.is_empty() && parts_ok,
        format!("7 entries x 10^4 random n, failures: {failures:?}; decompositions {:?} and {:?}", e1.parts, e2.parts),
    )
}

fn count_series_identities() -> Outcome {
    let mut bad = Vec::new();
    for q in 2..=4u32 {
        for r in 1..=3u32 {
            for x in [ratio(1, 5), ratio(1, 3)] {
                if !count_series_check(q, r, &x).unwrap().holds() {
                    bad.push(format!("({q},{r},{x})"));
                }
            }
            if !denominator_identity(q, r) {
                bad.push(format!("identity ({q},{r})"));
            }
            let at_root = count_series_check(q, r, &ratio(1, q as i64)).unwrap();
            if at_root.lhs.as_deref() != Some("0") {
                bad.push(format!("root ({q},{r}): {:?}", at_root.lhs));
            }
        }
    }
    Outcome::new(bad.is_empty(), format!("9 (q, r) pairs at x = 1/5, 1/3, as rational functions, and at x = 1/q; failures: {bad:?}"))
}

fn coefficient_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for (f, r, max_k) in [(catalog::h_naf(), 2, 14u32), (catalog::r_opt_function(), 3, 12)] {
        for t in [0.0, 0.5] {
            let c = f_coefficients(&f, r, t, max_k as usize).unwrap();
            for k in 0..=max_k {
                let brute = brute_force_f_coeff(&f, k, t);
                worst = worst.max((c[k as usize] - brute).abs() / brute.abs().max(1.0));
            }
        }
    }
    Outcome::new(worst <= 1e-9, format!("largest relative deviation {worst:.2e}"))
}

fn exact_pairs() -> [(&'static str, u32, BigRational, BigRational); 2] {
    [("c_0101", 4, ratio(1, 16), ratio(17, 256)), ("h_naf", 2, ratio(1, 3), ratio(2, 27))]
}

fn exact_constants() -> Outcome {
    let mut pass = true;
    let mut text = Vec::new();
    for (name, r, mu, sigma2) in exact_pairs() {
        let f = lookup(name).unwrap();
        let mut rs = vec![r, f.parameter()];
        rs.dedup();
        for rr in rs {
            let c = exact_constants_additive(&f, Some(rr)).unwrap();
            pass &= exact(&c.mu) == mu && exact(&c.sigma2) == sigma2;
            text.push(format!("{name} r={rr}: {}, {}", c.mu, c.sigma2));
        }
    }
    Outcome::new(pass, text.join("; "))
}

fn r_invariance() -> Outcome {
    let mut pass = true;
    let mut text = Vec::new();
    for (name, r, _, _) in exact_pairs() {
        let f = lookup(name).unwrap();
        let mut rs = vec![r, f.parameter()];
        rs.dedup();
        for rr in rs {
            let a = exact_constants_additive(&f, Some(rr)).unwrap();
            let c = exact_constants_additive(&f, Some(rr + 1)).unwrap();
            pass &= exact(&a.mu) == exact(&c.mu) && exact(&a.sigma2) == exact(&c.sigma2);
            text.push(format!("{name} r={}: {}, {}", rr + 1, c.mu, c.sigma2));
        }
    }
    Outcome::new(pass, text.join("; "))
}

fn numeric_constants() -> Outcome {
    let mc = stats::monte_carlo_constants(&catalog::r_opt_function(), 1000, 10_000, SEED).unwrap();
    let (mu, sigma2) = (mc.mu.to_f64(), mc.sigma2.to_f64());
    let rl = stats::runlength_constants(&BaseSequence::jacobsthal(), 60).unwrap();
    let (rmu, rsigma2) = (rl.mu.to_f64(), rl.sigma2.to_f64());
    let pass = (mu - 0.060829).abs() < 1e-3
        && (sigma2 - 0.038212).abs() < 5e-3
        && (rmu - 0.429947).abs() < 1e-4
        && (rsigma2 - 0.121137).abs() < 1e-4;
    Outcome::new(
        pass,
        format!(
            "r_opt Monte Carlo k=1000 m=10^4: mu = {mu:.6} ± {:.1e}, sigma2 = {sigma2:.6} ± {:.1e} (95%); Jacobsthal run length I=60: mu = {rmu:.6}, sigma2 = {rsigma2:.6} (tail bounds {:.1e}, {:.1e})",
            mc.mu_error, mc.sigma2_error, rl.mu_error, rl.sigma2_error
        ),
    )
}

fn clt() -> Outcome {
    let h = catalog::h_naf();
    let hc = exact_constants_additive(&h, None).unwrap();
    let r = catalog::r_opt_function();
    let rc = stats::truncated_constants(&r, None, 28, None).unwrap();
    let bound = BigUint::from(10u32).pow(18);
    let mut pass = true;
    let mut text = Vec::new();
    for (f, c) in [(&h, &hc), (&r, &rc)] {
        for scale in [Scale::Power(64), Scale::Bound(bound.clone())] {
            let e = clt_experiment(f, &scale, 100_000, SEED, c.mu.to_f64(), c.sigma2.to_f64()).unwrap();
            pass &= e.ks_distance < 0.05;
            let label = match scale {
                Scale::Power(k) => format!("k={k}"),
                Scale::Bound(_) => "K=10^18".to_string(),
            };
            let mut line = format!("{} {label}: KS {:.4}", f.name(), e.ks_distance);
            if let Some(l) = e.ks_distance_lattice {
                line += &format!(" (continuity-corrected {l:.4})");
            }
            if let Some(s) = e.ks_distance_sample_standardized {
                line += &format!(" (sample-standardized {s:.4})");
            }
            text.push(line);
        }
    }
    Outcome::new(pass, text.join("; "))
}

fn definition_suite() -> Outcome {
    let mut pass = true;
    let mut text = Vec::new();
    for f in catalog_entries() {
        let r = f.parameter();
        let at_r = verify_definition(&f, r, 10_000, SEED);
        pass &= at_r.passed;
        let mut line = format!("{} r={r} {}", f.name(), if at_r.passed { "ok" } else { "FAILED" });
        if r >= 1 {
            let below = verify_definition(&f, r - 1, 10_000, SEED);
            let witnessed = below.counterexample.as_ref().is_some_and(|c| {
                let joined = f.eval(&(BigUint::from(f.base()).pow(c.k + c.r) * &c.a + &c.b));
                joined != f.combine(&f.eval(&c.a), &f.eval(&c.b))
            });
            pass &= !below.passed && witnessed;
            match &below.counterexample {
                Some(c) => line += &format!(", r={} fails at a={} b={} k={}", r - 1, c.a, c.b, c.k),
                None => line += &format!(", r={} NOT refuted", r - 1),
            }
        }
        text.push(line);
    }
    Outcome::new(pass, text.join("; "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("known values", known_values),
        ("brute-force oracle for r_opt and h_naf", oracle_equivalence),
        ("multiplicative classifier", multiplicative_classifier),
        ("additive classifier", additive_classifier),
        ("reset-sequence test and transducer representation", transducer_test),
        ("zero-run split evaluation", split_evaluation),
        ("count series identities", count_series_identities),
        ("coefficients of F(x, t)", coefficient_identity),
        ("exact constants", exact_constants),
        ("parameter invariance", r_invariance),
        ("numeric constants", numeric_constants),
        ("normal approximation", clt),
        ("definition suite", definition_suite),
    ];
    let mut unexpected = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed().as_secs_f64();
        let status = match (outcome.pass, UNATTAINABLE.contains(&id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (expected)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("criterion {id:>2}: {status} {name} [{elapsed:.2}s] - {}", outcome.detail);
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria failed");
        ExitCode::FAILURE
    }
}
