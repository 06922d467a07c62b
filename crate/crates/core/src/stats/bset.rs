use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use super::StatsError;
use crate::linrep::{rat, Matrix};
use crate::Rational;

/// Positive integers not divisible by `q` whose expansion has no run of `r`
/// zeros.
///
/// Membership is tracked by a small automaton: states `0..r` hold the length
/// of the current zero run, state `r` is the start (nothing read yet, first
/// digit must be nonzero). Words are accepted in state 0. The conditions are
/// symmetric, so the reading direction does not matter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BSet {
    q: u32,
    r: u32,
}

impl BSet {
    pub fn new(q: u32, r: u32) -> Result<Self, StatsError> {
        if q < 2 {
            return Err(StatsError::InvalidParameter(format!("base {q} < 2")));
        }
        if r == 0 {
            return Err(StatsError::InvalidParameter("r must be at least 1".into()));
        }
        Ok(BSet { q, r })
    }

    pub fn base(&self) -> u32 {
        self.q
    }

    pub fn parameter(&self) -> u32 {
        self.r
    }

    /// Number of automaton states including the start state.
    pub fn states(&self) -> usize {
        self.r as usize + 1
    }

    pub fn start(&self) -> usize {
        self.r as usize
    }

    pub fn step(&self, state: usize, digit: u32) -> Option<usize> {
        if digit != 0 {
            Some(0)
        } else if state == self.start() || state + 1 >= self.r as usize {
            None
        } else {
            Some(state + 1)
        }
    }

    pub fn accepts(&self, state: usize) -> bool {
        state == 0
    }

    pub fn contains(&self, n: &BigUint) -> bool {
        let digits = crate::digits::raw_digits(n, self.q);
        let mut s = Some(self.start());
        for d in digits {
            s = s.and_then(|s| self.step(s, d));
        }
        matches!(s, Some(0))
    }

    /// Members of expansion length exactly `len`, increasing.
    pub fn members_of_length(&self, len: usize) -> Vec<BigUint> {
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(len);
        self.collect(len, self.start(), &mut prefix, &mut out);
        out
    }

    fn collect(&self, len: usize, state: usize, prefix: &mut Vec<u32>, out: &mut Vec<BigUint>) {
        if prefix.len() == len {
            if self.accepts(state) {
                let n = prefix.iter().fold(BigUint::zero(), |acc, &d| acc * self.q + d);
                out.push(n);
            }
            return;
        }
        for d in 0..self.q {
            if let Some(next) = self.step(state, d) {
                prefix.push(d);
                self.collect(len, next, prefix, out);
                prefix.pop();
            }
        }
    }

    /// All members of length at most `max_len` with their lengths, ordered by
    /// length and then value.
    pub fn enumerate(&self, max_len: usize) -> impl Iterator<Item = (BigUint, usize)> + '_ {
        (1..=max_len).flat_map(move |len| self.members_of_length(len).into_iter().map(move |n| (n, len)))
    }

    /// `counts[ℓ]` = number of members of length `ℓ`, for `ℓ ≤ max_len`,
    /// from the automaton.
    pub fn counts(&self, max_len: usize) -> Vec<BigUint> {
        let mut dist = vec![BigUint::zero(); self.states()];
        dist[self.start()] = BigUint::one();
        let mut counts = vec![BigUint::zero()];
        for _ in 0..max_len {
            let mut next = vec![BigUint::zero(); self.states()];
            for (s, c) in dist.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for d in 0..self.q {
                    if let Some(t) = self.step(s, d) {
                        next[t] += c;
                    }
                }
            }
            counts.push(next[0].clone());
            dist = next;
        }
        counts
    }

    /// Same as [`counts`](Self::counts) in floating point, which stays cheap
    /// for very long ranges.
    pub(crate) fn counts_f64(&self, max_len: usize) -> Vec<f64> {
        let mut dist = vec![0.0; self.states()];
        dist[self.start()] = 1.0;
        let mut counts = vec![0.0];
        for _ in 0..max_len {
            let mut next = vec![0.0; self.states()];
            for (s, c) in dist.iter().enumerate() {
                for d in 0..self.q {
                    if let Some(t) = self.step(s, d) {
                        next[t] += c;
                    }
                }
            }
            counts.push(next[0]);
            dist = next;
        }
        counts
    }

    /// The transfer matrix of the automaton: entry `(s, t)` counts digits
    /// leading from `s` to `t`.
    pub fn transfer_matrix(&self) -> Matrix {
        let m = self.states();
        let mut a = Matrix::zeros(m, m);
        for s in 0..m {
            for d in 0..self.q {
                if let Some(t) = self.step(s, d) {
                    a[(s, t)] += Rational::one();
                }
            }
        }
        a
    }

    /// `B(x, 0) = Σ_{n∈𝓑} x^{ℓ(n)}` evaluated exactly through the resolvent of
    /// the transfer matrix; `None` if `I - xA` is singular.
    pub fn count_series_at(&self, x: &Rational) -> Option<Rational> {
        let a = self.transfer_matrix();
        let m = self.states();
        let system = Matrix::identity(m).sub(&a.scaled(x));
        // B = e_start^t (I - xA)^{-1} (xA) e_0, since every member has length ≥ 1
        let target: Vec<Rational> = a.column(0).iter().map(|c| c * x).collect();
        let y = system.solve(&[target])?.pop()?;
        Some(y[self.start()].clone())
    }

    /// `(q-1)x / (1 - (q-1)x - ⋯ - (q-1)x^r)`; `None` at a pole.
    pub fn count_series_closed_form(&self, x: &Rational) -> Option<Rational> {
        let qm1 = rat(self.q as i64 - 1);
        let mut denom = Rational::one();
        let mut p = Rational::one();
        for _ in 0..self.r {
            p *= x;
            denom -= &qm1 * &p;
        }
        (!denom.is_zero()).then(|| qm1 * x / denom)
    }

    /// Growth rate of the member counts, see [`beta`].
    pub fn beta(&self) -> f64 {
        beta(self.q, self.r)
    }
}

/// Largest real root of `x^r - (q-1)(x^{r-1} + ⋯ + 1)`, by bisection on
/// `[0, q]` to `10^{-12}`.
pub fn beta(q: u32, r: u32) -> f64 {
    let p = |x: f64| {
        let tail: f64 = (0..r).map(|i| x.powi(i as i32)).sum();
        x.powi(r as i32) - (q as f64 - 1.0) * tail
    };
    let (mut lo, mut hi) = (0.0f64, q as f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if p(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Both closed-form identities for the count series at one point.
#[derive(Debug, Clone, Serialize)]
pub struct CountSeriesCheck {
    pub q: u32,
    pub r: u32,
    pub x: String,
    /// `B(x, 0)` from the automaton (`None`: pole).
    pub series: Option<String>,
    /// `B(x, 0)` from the closed form (`None`: pole).
    pub closed_form: Option<String>,
    /// `1 - x - x^r B(x, 0)` (`None`: pole).
    pub lhs: Option<String>,
    /// `(1-x)(1-qx) / (1 - qx + (q-1)x^{r+1})` (`None`: pole).
    pub rhs: Option<String>,
    pub series_matches: bool,
    pub denominator_identity: bool,
}

impl CountSeriesCheck {
    pub fn holds(&self) -> bool {
        self.series_matches && self.denominator_identity
    }
}

pub fn count_series_check(q: u32, r: u32, x: &Rational) -> Result<CountSeriesCheck, StatsError> {
    let b = BSet::new(q, r)?;
    let series = b.count_series_at(x);
    let closed = b.count_series_closed_form(x);
    let xr = (0..r).fold(Rational::one(), |acc, _| acc * x);
    let one = Rational::one();
    let lhs = closed.as_ref().map(|bv| &one - x - &xr * bv);
    let qx = rat(q as i64) * x;
    let den = &one - &qx + rat(q as i64 - 1) * &xr * x;
    let rhs = (!den.is_zero()).then(|| (&one - x) * (&one - &qx) / den);
    let s = |v: &Option<Rational>| v.as_ref().map(|v| v.to_string());
    Ok(CountSeriesCheck {
        q,
        r,
        x: x.to_string(),
        series: s(&series),
        closed_form: s(&closed),
        lhs: s(&lhs),
        rhs: s(&rhs),
        series_matches: series == closed,
        denominator_identity: lhs == rhs,
    })
}

type Poly = Vec<BigInt>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
        .collect()
}

fn poly_is_zero(a: &Poly) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Checks `1 - x - x^r B(x, 0) = (1-x)(1-qx)/(1-qx+(q-1)x^{r+1})` as an
/// identity of rational functions, by cross-multiplying with
/// `P(x) = 1 - (q-1)(x + ⋯ + x^r)`:
/// `((1-x)P - (q-1)x^{r+1}) · (1-qx+(q-1)x^{r+1}) = (1-x)(1-qx) · P`.
pub fn denominator_identity(q: u32, r: u32) -> bool {
    let q = BigInt::from(q);
    let qm1: BigInt = &q - 1;
    let r = r as usize;
    let mut p: Poly = vec![BigInt::zero(); r + 1];
    p[0] = BigInt::one();
    for c in p.iter_mut().skip(1) {
        *c = -qm1.clone();
    }
    let one_minus_x: Poly = vec![1.into(), (-1).into()];
    let one_minus_qx: Poly = vec![1.into(), -q.clone()];
    let mut mono: Poly = vec![BigInt::zero(); r + 2];
    mono[r + 1] = qm1.clone();
    let left_first = poly_sub(&poly_mul(&one_minus_x, &p), &mono);
    let mut den = vec![BigInt::zero(); r + 2];
    den[0] = BigInt::one();
    den[1] -= &q;
    den[r + 1] += &qm1;
    let left = poly_mul(&left_first, &den);
    let right = poly_mul(&poly_mul(&one_minus_x, &one_minus_qx), &p);
    poly_is_zero(&poly_sub(&left, &right))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn no_zeros_allowed_for_r_one() {
        let s = BSet::new(2, 1).unwrap();
        let all: Vec<_> = s.enumerate(3).collect();
        assert_eq!(all, vec![(b(1), 1), (b(3), 2), (b(7), 3)]);
    }

    #[test]
    fn membership() {
        let s = BSet::new(2, 2).unwrap();
        assert!(!s.contains(&b(4)));
        assert!(!s.contains(&b(9)));
        assert!(s.contains(&b(5)));
        assert!(!s.contains(&b(0)));
        let members: Vec<_> = s.enumerate(4).map(|(n, _)| n).collect();
        assert_eq!(members, [1u64, 3, 5, 7, 11, 13, 15].map(b));
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn counts_follow_the_recurrence() {
        let s = BSet::new(2, 2).unwrap();
        let c = s.counts(30);
        for l in 3..=30 {
            assert_eq!(c[l], &c[l - 1] + &c[l - 2]);
        }
        for l in 1..=12 {
            assert_eq!(c[l], b(s.members_of_length(l).len() as u64));
        }
        for (q, r) in [(3, 1), (3, 2), (4, 3)] {
            let s = BSet::new(q, r).unwrap();
            let c = s.counts(8);
            for l in 1..=8 {
                let brute = (1..(q as u64).pow(l as u32))
                    .filter(|&n| crate::digits::expansion_len(&b(n), q) == l && s.contains(&b(n)))
                    .count();
                assert_eq!(c[l], b(brute as u64));
            }
        }
    }

    #[test]
    fn beta_roots() {
        assert!((beta(2, 2) - 1.618033988749895).abs() < 1e-11);
        assert!((beta(2, 1) - 1.0).abs() < 1e-11);
        assert!((beta(3, 1) - 2.0).abs() < 1e-11);
        assert!((beta(2, 3) - 1.839286755214161).abs() < 1e-11);
        let c = BSet::new(2, 3).unwrap().counts_f64(200);
        assert!((c[200] / c[199] - beta(2, 3)).abs() < 1e-9);
    }

    #[test]
    fn closed_forms() {
        let third = Rational::new(1.into(), 3.into());
        let chk = count_series_check(2, 2, &third).unwrap();
        assert!(chk.holds());
        assert_eq!(chk.closed_form.as_deref(), Some("3/5"));
        let pole = count_series_check(4, 1, &third).unwrap();
        assert!(pole.holds());
        assert!(pole.series.is_none() && pole.lhs.is_none() && pole.rhs.is_none());
        for q in 2..=4 {
            for r in 1..=3 {
                assert!(denominator_identity(q, r));
            }
        }
        assert_eq!(BSet::new(2, 2).unwrap().count_series_at(&Rational::zero()), Some(Rational::zero()));
    }
}
