//! Checking the defining identity directly, splitting at long zero runs, and
//! building new quasiadditive / quasimultiplicative functions from old ones.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{ArithmeticFunction, GrowthBound, Kind};
use crate::digits::{self, DigitString};
use crate::value::{serialize_display, serialize_display_vec};
use crate::{Rational, Value};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuasiError {
    #[error("{name} is not {expected}")]
    WrongKind { name: String, expected: Kind },
    #[error("bases differ: {0} vs {1}")]
    BaseMismatch(u32, u32),
    #[error("{name} is not positive at n = {n}")]
    NonPositive { name: String, n: BigUint },
    #[error("transform base must be positive{}", if *.not_one { " and different from 1" } else { "" })]
    InvalidTransformBase { not_one: bool },
}

/// `n` cut after every maximal run of at least `r` zeros.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitDecomposition {
    #[serde(serialize_with = "serialize_display")]
    pub source: BigUint,
    pub base: u32,
    pub parameter: u32,
    /// Values of the blocks, most significant first. Each block keeps the
    /// zeros that end it.
    #[serde(serialize_with = "serialize_display_vec")]
    pub parts: Vec<BigUint>,
    /// Each part with all factors of `q` removed.
    #[serde(serialize_with = "serialize_display_vec")]
    pub reduced: Vec<BigUint>,
}

impl SplitDecomposition {
    /// Concatenation of the blocks; equals the expansion of `source`.
    pub fn reconstruct(&self) -> DigitString {
        let mut msb_first = Vec::new();
        for p in &self.parts {
            let d = digits::to_digits(p, self.base);
            msb_first.extend(d.msb_first());
        }
        msb_first.reverse();
        DigitString::new(self.base, msb_first).expect("blocks start with a nonzero digit")
    }
}

/// Splits `n` after each maximal run of `r` or more zeros. Trailing zeros of
/// `n` stay with the last part; `r = 0` and `n = 0` give one part and no
/// part respectively.
pub fn split(n: &BigUint, q: u32, r: u32) -> SplitDecomposition {
    let msb_first: Vec<u32> = digits::to_digits(n, q).msb_first().collect();
    let mut blocks: Vec<&[u32]> = Vec::new();
    if r == 0 {
        if !n.is_zero() {
            blocks.push(&msb_first);
        }
    } else {
        let mut start = 0;
        let mut i = 0;
        while i < msb_first.len() {
            if msb_first[i] != 0 {
                i += 1;
                continue;
            }
            let run_start = i;
            while i < msb_first.len() && msb_first[i] == 0 {
                i += 1;
            }
            if i - run_start >= r as usize && i < msb_first.len() {
                blocks.push(&msb_first[start..i]);
                start = i;
            }
        }
        if start < msb_first.len() {
            blocks.push(&msb_first[start..]);
        }
    }
    let parts: Vec<BigUint> = blocks
        .iter()
        .map(|b| b.iter().fold(BigUint::zero(), |acc, &d| acc * q + d))
        .collect();
    let reduced = parts.iter().map(|p| strip_base(p, q)).collect();
    SplitDecomposition { source: n.clone(), base: q, parameter: r, parts, reduced }
}

fn strip_base(n: &BigUint, q: u32) -> BigUint {
    let mut m = n.clone();
    if m.is_zero() {
        return m;
    }
    let q = BigUint::from(q);
    loop {
        let (d, rem) = m.div_rem(&q);
        if !rem.is_zero() {
            return m;
        }
        m = d;
    }
}

/// Evaluates `f(n)` by combining `f` over the reduced parts of the split at
/// `f`'s declared parameter.
pub fn split_evaluate(f: &ArithmeticFunction, n: &BigUint) -> Value {
    split_evaluate_with(f, n, f.parameter())
}

pub fn split_evaluate_with(f: &ArithmeticFunction, n: &BigUint, r: u32) -> Value {
    split(n, f.base(), r)
        .reduced
        .iter()
        .fold(f.identity_value(), |acc, m| f.combine(&acc, &f.eval(m)))
}

/// A triple violating the identity for parameter `r`.
#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    #[serde(serialize_with = "serialize_display")]
    pub a: BigUint,
    #[serde(serialize_with = "serialize_display")]
    pub b: BigUint,
    pub k: u32,
    pub r: u32,
    /// `f(q^{k+r}·a + b)`.
    pub joined: Value,
    /// `f(a) ⊕ f(b)`.
    pub combined: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub function: String,
    pub kind: Kind,
    pub r: u32,
    pub passed: bool,
    pub random_trials: usize,
    pub exhaustive_checks: usize,
    pub seed: u64,
    pub counterexample: Option<Counterexample>,
}

/// Largest `a` and `b` exponent (`a, b < q^6`, `k ≤ 6`) of the exhaustive pass.
pub const EXHAUSTIVE_DIGITS: u32 = 6;
/// Random `k` is drawn from `1..=48`, `a` from `[0, 2^48)`.
pub const MAX_RANDOM_K: u32 = 48;
const RANDOM_A_BITS: u32 = 48;

/// Uniform on `[0, bound)` by rejection from the next power of two.
pub(crate) fn random_below<R: Rng>(rng: &mut R, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero());
    let bits = bound.bits();
    let words = bits.div_ceil(64) as usize;
    let top_mask = if bits.is_multiple_of(64) { u64::MAX } else { (1u64 << (bits % 64)) - 1 };
    loop {
        let mut w: Vec<u64> = (0..words).map(|_| rng.random()).collect();
        *w.last_mut().unwrap() &= top_mask;
        let x = BigUint::from_slice(
            &w.iter().flat_map(|&x| [x as u32, (x >> 32) as u32]).collect::<Vec<_>>(),
        );
        if &x < bound {
            return x;
        }
    }
}

fn check_triple(f: &ArithmeticFunction, a: &BigUint, b: &BigUint, k: u32, r: u32) -> Option<Counterexample> {
    let q = BigUint::from(f.base());
    let n = q.pow(k + r) * a + b;
    let joined = f.eval(&n);
    let combined = f.combine(&f.eval(a), &f.eval(b));
    (!joined.approx_eq(&combined)).then(|| Counterexample {
        a: a.clone(),
        b: b.clone(),
        k,
        r,
        joined,
        combined,
    })
}

/// Checks `f(q^{k+r}a + b) = f(a) ⊕ f(b)` (sum or product by `f`'s kind) on
/// `trials` random triples and then on every triple with `a, b < q^6`,
/// `b < q^k`, `k ≤ 6`. Stops at the first violation.
pub fn verify_definition(f: &ArithmeticFunction, r: u32, trials: usize, seed: u64) -> Verdict {
    let mut verdict = Verdict {
        function: f.name().to_string(),
        kind: f.kind(),
        r,
        passed: true,
        random_trials: 0,
        exhaustive_checks: 0,
        seed,
        counterexample: None,
    };
    let q = BigUint::from(f.base());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let k = rng.random_range(1..=MAX_RANDOM_K);
        let a = BigUint::from(rng.random::<u64>() >> (64 - RANDOM_A_BITS));
        let b = random_below(&mut rng, &q.clone().pow(k));
        verdict.random_trials += 1;
        if let Some(c) = check_triple(f, &a, &b, k, r) {
            verdict.passed = false;
            verdict.counterexample = Some(c);
            return verdict;
        }
    }
    let a_max = q.clone().pow(EXHAUSTIVE_DIGITS).to_u64().expect("small base");
    for k in 0..=EXHAUSTIVE_DIGITS {
        let b_max = q.clone().pow(k).to_u64().unwrap();
        for a in 0..a_max {
            let a = BigUint::from(a);
            for b in 0..b_max {
                verdict.exhaustive_checks += 1;
                if let Some(c) = check_triple(f, &a, &BigUint::from(b), k, r) {
                    verdict.passed = false;
                    verdict.counterexample = Some(c);
                    return verdict;
                }
            }
        }
    }
    verdict
}

fn check_transform_base(c: &Value, not_one: bool) -> Result<(), QuasiError> {
    let bad = !c.is_positive() || (not_one && c.approx_eq(&Value::one()));
    if bad {
        Err(QuasiError::InvalidTransformBase { not_one })
    } else {
        Ok(())
    }
}

fn exact_integer(v: &Value) -> Option<i64> {
    v.as_exact().filter(|r| r.is_integer()).and_then(|r| r.to_integer().to_i64())
}

fn pow_value(c: &Value, e: &Value) -> Value {
    if let (Some(base), Some(k)) = (c.as_exact(), exact_integer(e)) {
        if k.unsigned_abs() <= 1 << 16 {
            let p: Rational = Pow::pow(base, k.unsigned_abs() as u32);
            return Value::Exact(if k < 0 { p.recip() } else { p });
        }
    }
    Value::Approx((e.to_f64() * c.ln().expect("positive base")).exp())
}

/// `log_c(g)`, exact when `g` is an exact integer power of an exact `c`.
fn log_value(g: &Value, c: &Value) -> Option<Value> {
    if !g.is_positive() {
        return None;
    }
    if let (Some(g), Some(c)) = (g.as_exact(), c.as_exact()) {
        let (mut lo, mut up) = (Rational::one(), 0i64);
        let (big, inv) = if c > &Rational::one() { (c.clone(), false) } else { (c.recip(), true) };
        let target = if g >= &Rational::one() { g.clone() } else { g.recip() };
        while lo < target {
            lo *= &big;
            up += 1;
        }
        if lo == target {
            let flip = inv ^ (g < &Rational::one());
            return Some(Value::from_int(if flip { -up } else { up }));
        }
    }
    Some(Value::Approx(g.ln()? / c.ln()?))
}

/// `n ↦ c^{f(n)}` for additive `f`; multiplicative with the same parameter.
pub fn exp_transform(f: &ArithmeticFunction, c: Value) -> Result<ArithmeticFunction, QuasiError> {
    if f.kind() != Kind::Additive {
        return Err(QuasiError::WrongKind { name: f.name().into(), expected: Kind::Additive });
    }
    check_transform_base(&c, false)?;
    let ln_c = c.ln().unwrap().abs();
    let g = f.growth_bound();
    let inner = f.clone();
    Ok(ArithmeticFunction::new(
        format!("exp_{c}_{}", f.name()),
        f.base(),
        Kind::Multiplicative,
        f.parameter(),
        GrowthBound { per_digit: g.per_digit * ln_c, offset: g.offset * ln_c },
        move |n| pow_value(&c, &inner.eval(n)),
    ))
}

/// `n ↦ log_c g(n)` for positive multiplicative `g`; additive with the same
/// parameter. Positivity is checked on `n < 4096` up front; evaluating at a
/// later nonpositive value panics with the offending `n`.
pub fn log_transform(g: &ArithmeticFunction, c: Value) -> Result<ArithmeticFunction, QuasiError> {
    if g.kind() != Kind::Multiplicative {
        return Err(QuasiError::WrongKind { name: g.name().into(), expected: Kind::Multiplicative });
    }
    check_transform_base(&c, true)?;
    for n in 0..4096u32 {
        let n = BigUint::from(n);
        if !g.eval(&n).is_positive() {
            return Err(QuasiError::NonPositive { name: g.name().into(), n });
        }
    }
    let ln_c = c.ln().unwrap().abs();
    let growth = g.growth_bound();
    let inner = g.clone();
    Ok(ArithmeticFunction::new(
        format!("log_{c}_{}", g.name()),
        g.base(),
        Kind::Additive,
        g.parameter(),
        GrowthBound { per_digit: growth.per_digit / ln_c, offset: growth.offset / ln_c },
        move |n| {
            log_value(&inner.eval(n), &c)
                .unwrap_or_else(|| panic!("{} is not positive at n = {n}", inner.name()))
        },
    ))
}

/// `αf + βg` for additive `f`, `g` of the same base, with parameter
/// `max(r_f, r_g)`.
pub fn linear_combination(
    f: &ArithmeticFunction,
    g: &ArithmeticFunction,
    alpha: Rational,
    beta: Rational,
) -> Result<ArithmeticFunction, QuasiError> {
    for h in [f, g] {
        if h.kind() != Kind::Additive {
            return Err(QuasiError::WrongKind { name: h.name().into(), expected: Kind::Additive });
        }
    }
    if f.base() != g.base() {
        return Err(QuasiError::BaseMismatch(f.base(), g.base()));
    }
    let (a, b) = (alpha.abs(), beta.abs());
    let (gf, gg) = (f.growth_bound(), g.growth_bound());
    let (af, bf) = (crate::value::rational_to_f64(&a), crate::value::rational_to_f64(&b));
    let growth = GrowthBound {
        per_digit: af * gf.per_digit + bf * gg.per_digit,
        offset: af * gf.offset + bf * gg.offset,
    };
    let (ff, gc) = (f.clone(), g.clone());
    let name = format!("({alpha})*{}+({beta})*{}", f.name(), g.name());
    Ok(ArithmeticFunction::new(
        name,
        f.base(),
        Kind::Additive,
        f.parameter().max(g.parameter()),
        growth,
        move |n| &ff.eval(n).scale(&alpha) + &gc.eval(n).scale(&beta),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, lookup};

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn list(xs: &[BigUint]) -> Vec<u64> {
        xs.iter().map(|x| x.to_u64().unwrap()).collect()
    }

    #[test]
    fn first_worked_split() {
        let s = split(&b(314159265), 2, 2);
        assert_eq!(list(&s.parts), [4, 348, 432, 80, 1]);
        assert_eq!(list(&s.reduced), [1, 87, 27, 5, 1]);
        assert_eq!(s.reconstruct(), digits::to_digits(&b(314159265), 2));
    }

    #[test]
    fn second_worked_split() {
        let s = split(&b(204280974), 2, 3);
        assert_eq!(list(&s.parts), [48, 360, 328, 14]);
        assert_eq!(list(&s.reduced), [3, 45, 41, 7]);
    }

    #[test]
    fn degenerate_splits() {
        assert_eq!(list(&split(&b(5), 2, 2).parts), [5]);
        assert_eq!(list(&split(&b(0b1001), 2, 0).parts), [9]);
        assert!(split(&b(0), 2, 2).parts.is_empty());
        // trailing zeros stay attached
        assert_eq!(list(&split(&b(0b1000100), 2, 2).parts), [0b1000, 0b100]);
    }

    #[test]
    fn split_round_trip_and_separators() {
        for q in [2u32, 3] {
            for r in 0..4 {
                for n in 0..3000u64 {
                    let s = split(&b(n), q, r);
                    assert_eq!(s.reconstruct(), digits::to_digits(&b(n), q));
                    for (p, m) in s.parts.iter().zip(&s.reduced) {
                        assert!(!(m % q).is_zero());
                        assert!((p % m).is_zero());
                    }
                    if r > 0 {
                        for p in &s.parts[..s.parts.len().saturating_sub(1)] {
                            let d = digits::to_digits(p, q);
                            assert!(d.digits().iter().take(r as usize).all(|&x| x == 0));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn worked_split_evaluations() {
        assert_eq!(split_evaluate(&catalog::h_naf(), &b(314159265)).to_string(), "11");
        assert_eq!(split_evaluate(&catalog::r_opt_function(), &b(204280974)).to_string(), "10");
        assert_eq!(split_evaluate(&catalog::sum_of_digits(2), &b(0)).to_string(), "0");
    }

    #[test]
    fn naf_weight_needs_two_zeros() {
        let h = catalog::h_naf();
        assert!(verify_definition(&h, 2, 2000, 1).passed);
        let v = verify_definition(&h, 1, 2000, 1);
        assert!(!v.passed);
        let c = v.counterexample.unwrap();
        let n = (c.a.clone() << (c.k + 1)) + &c.b;
        assert_eq!(Value::from_int(digits::h_naf(&n)), c.joined);
        assert!(c.b < BigUint::one() << c.k);
    }

    #[test]
    fn strong_additivity_of_digit_sum() {
        assert!(verify_definition(&catalog::sum_of_digits(2), 0, 2000, 3).passed);
        assert!(verify_definition(&catalog::sum_of_digits(3), 0, 500, 3).passed);
    }

    #[test]
    fn exp_of_digit_sum_is_the_catalog_entry() {
        let g = exp_transform(&catalog::sum_of_digits(2), Value::from_int(2)).unwrap();
        let e = catalog::exp_sum_of_digits();
        assert_eq!((g.kind(), g.parameter()), (Kind::Multiplicative, 0));
        for n in 0..5000u64 {
            assert_eq!(g.eval_u64(n), e.eval_u64(n));
            assert!(g.eval_u64(n).is_exact());
        }
    }

    #[test]
    fn log_undoes_exp() {
        let h = catalog::h_naf();
        let e = Value::Approx(std::f64::consts::E);
        let back = log_transform(&exp_transform(&h, e.clone()).unwrap(), e).unwrap();
        for n in 0..10_000u64 {
            assert!(back.eval_u64(n).approx_eq(&h.eval_u64(n)));
        }
        let three = Value::from_int(3);
        let exact = log_transform(&exp_transform(&h, three.clone()).unwrap(), three).unwrap();
        assert!(exact.eval_u64(314159265).is_exact());
        assert_eq!(exact.eval_u64(314159265).to_string(), "11");
    }

    #[test]
    fn log_rejects_nonpositive_functions() {
        let zero = ArithmeticFunction::new(
            "vanishing",
            2,
            Kind::Multiplicative,
            0,
            GrowthBound { per_digit: 0.0, offset: 0.0 },
            |n| if *n == BigUint::from(6u32) { Value::zero() } else { Value::one() },
        );
        let err = log_transform(&zero, Value::from_int(2)).unwrap_err();
        assert_eq!(err, QuasiError::NonPositive { name: "vanishing".into(), n: b(6) });
        assert!(log_transform(&catalog::r_opt_function(), Value::one()).is_err());
        assert!(exp_transform(&catalog::r_opt_function(), Value::from_int(2)).is_err());
    }

    #[test]
    fn exp_of_block_count_at_block_length() {
        let c = lookup("c_0101").unwrap();
        let g = exp_transform(&c, Value::from_int(3)).unwrap();
        assert!(verify_definition(&g, 4, 1000, 5).passed);
    }

    #[test]
    fn linear_combinations() {
        let h = catalog::h_naf();
        let c01 = lookup("c_01").unwrap();
        let sum = linear_combination(&h, &c01, Rational::one(), Rational::one()).unwrap();
        assert_eq!(sum.parameter(), 2);
        assert!(verify_definition(&sum, 2, 2000, 9).passed);

        let zero = Rational::zero();
        let same = linear_combination(&h, &c01, Rational::one(), zero).unwrap();
        let s = catalog::sum_of_digits(2);
        let twice_minus = linear_combination(&s, &s, Rational::from_integer(2.into()), Rational::from_integer((-1).into())).unwrap();
        for n in 0..4096u64 {
            assert_eq!(same.eval_u64(n), h.eval_u64(n));
            assert_eq!(twice_minus.eval_u64(n), s.eval_u64(n));
        }
        let s3 = catalog::sum_of_digits(3);
        assert_eq!(
            linear_combination(&s, &s3, Rational::one(), Rational::one()).unwrap_err(),
            QuasiError::BaseMismatch(2, 3)
        );
    }
}
