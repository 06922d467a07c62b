//! `B(x, t)`, `F(x, t)` and their coefficients.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use super::bset::BSet;
use super::truncated::{block_sums, tail_sum};
use super::{effective_parameter, StatsError};
use crate::catalog::{ArithmeticFunction, Kind};
use crate::{Rational, Value};

/// `f(n)^t` for multiplicative and `e^{t f(n)}` for additive `f`, from an
/// already computed value.
fn weight_of(kind: Kind, value: &Value, t: f64) -> f64 {
    match kind {
        Kind::Multiplicative if t == 0.0 => 1.0,
        Kind::Multiplicative => value.to_f64().powf(t),
        Kind::Additive => (t * value.to_f64()).exp(),
    }
}

/// The summand of the generating functions: `f(n)^t` (multiplicative) or
/// `e^{t f(n)}` (additive).
pub fn weight(f: &ArithmeticFunction, n: &BigUint, t: f64) -> f64 {
    weight_of(f.kind(), &f.eval(n), t)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BTruncated {
    pub value: f64,
    pub tail_bound: f64,
    pub truncation: usize,
}

/// `Σ_{n∈𝓑, ℓ(n)≤L} x^{ℓ(n)} w(n)` plus a bound on the neglected terms from
/// the declared growth of `f`.
pub fn b_truncated(
    f: &ArithmeticFunction,
    r: u32,
    x: f64,
    t: f64,
    max_len: usize,
) -> Result<BTruncated, StatsError> {
    let bset = BSet::new(f.base(), r)?;
    let growth = f.growth_bound();
    let rate = bset.beta() * (t.abs() * growth.per_digit).exp();
    if x.abs() * rate >= 1.0 {
        return Err(StatsError::DivergenceRisk { x: x.abs(), radius: 1.0 / rate });
    }
    let per_len = length_weights(f, &bset, t, max_len)?;
    let value = (1..=max_len).map(|l| x.powi(l as i32) * per_len[l]).sum();
    let tail_bound = tail_sum(&bset, max_len, |l, n| {
        n * x.abs().powi(l as i32) * (t.abs() * growth.at(l).abs()).exp()
    });
    Ok(BTruncated { value, tail_bound, truncation: max_len })
}

/// `b[ℓ] = Σ_{n∈𝓑, ℓ(n)=ℓ} w(n)` for `ℓ ≤ max_len`.
fn length_weights(f: &ArithmeticFunction, bset: &BSet, t: f64, max_len: usize) -> Result<Vec<f64>, StatsError> {
    let kind = f.kind();
    let sums = block_sums::<1, _>(f, bset, max_len, |_, v| Ok([weight_of(kind, v, t)]))?;
    Ok(sums.iter().map(|s| s[0]).collect())
}

/// `(1 + (1 + x + ⋯ + x^{r-1}) B) / (1 - x - x^r B)`.
pub fn f_from_b(x: f64, r: u32, b: f64) -> Result<f64, StatsError> {
    let geometric: f64 = (0..r).map(|i| x.powi(i as i32)).sum();
    let den = 1.0 - x - x.powi(r as i32) * b;
    if den == 0.0 {
        return Err(StatsError::Pole(x));
    }
    Ok((1.0 + geometric * b) / den)
}

pub fn f_from_b_exact(x: &Rational, r: u32, b: &Rational) -> Result<Rational, StatsError> {
    let mut geometric = Rational::zero();
    let mut p = Rational::from_integer(1.into());
    for _ in 0..r {
        geometric += &p;
        p *= x;
    }
    let one = Rational::from_integer(1.into());
    let den = &one - x - &p * b;
    if den.is_zero() {
        return Err(StatsError::Pole(crate::value::rational_to_f64(x)));
    }
    Ok((one + geometric * b) / den)
}

/// `[x^k] F(x, t)` for `k ≤ max_k`, by expanding the quotient in terms of `B`
/// as a power series; `B`'s coefficients come from enumerating `𝓑`.
pub fn f_coefficients(f: &ArithmeticFunction, r: u32, t: f64, max_k: usize) -> Result<Vec<f64>, StatsError> {
    let r = effective_parameter(r);
    let bset = BSet::new(f.base(), r)?;
    let b = length_weights(f, &bset, t, max_k)?;
    let n = max_k + 1;
    let ru = r as usize;
    // numerator 1 + (1 + ⋯ + x^{r-1}) B, denominator 1 - x - x^r B
    let mut num = vec![0.0; n];
    let mut den = vec![0.0; n];
    num[0] = 1.0;
    den[0] = 1.0;
    if n > 1 {
        den[1] -= 1.0;
    }
    for (l, &bl) in b.iter().enumerate().skip(1) {
        for shift in 0..ru {
            if l + shift < n {
                num[l + shift] += bl;
            }
        }
        if l + ru < n {
            den[l + ru] -= bl;
        }
    }
    let mut out = vec![0.0; n];
    for k in 0..n {
        let s: f64 = (1..=k).map(|j| den[j] * out[k - j]).sum();
        out[k] = num[k] - s;
    }
    Ok(out)
}

/// `Σ_{n < q^k} w(n)` by direct evaluation.
pub fn brute_force_f_coeff(f: &ArithmeticFunction, k: u32, t: f64) -> f64 {
    let q = f.base() as u64;
    let limit = q.checked_pow(k).expect("q^k fits in 64 bits");
    (0..limit).map(|n| weight(f, &BigUint::from(n), t)).sum()
}
