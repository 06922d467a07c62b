//! Sums over the members of `𝓑` up to a length cutoff, with tail bounds.

use num_bigint::BigUint;
use rayon::prelude::*;

use super::bset::BSet;
use super::{constants_from_derivatives, effective_parameter, ConstantsResult, ErrorKind, Method, StatsError};
use crate::catalog::{ArithmeticFunction, BaseSequence, Kind};
use crate::Value;

/// Depth at which the enumeration is split into independent subtrees.
const SPLIT_DEPTH: usize = 10;

/// Evaluates `f` along a depth-first walk of `𝓑` that appends one less
/// significant digit at a time. With a linear representation the walk keeps
/// the column vector `M_{n_0} ⋯ M_{n_L} v` (floating point); otherwise each
/// member is evaluated directly.
enum Walker<'a> {
    Linear { u: Vec<f64>, mats: Vec<Vec<Vec<f64>>> },
    Direct(&'a ArithmeticFunction),
}

#[derive(Clone)]
struct Node {
    value: BigUint,
    len: usize,
    state: usize,
    column: Vec<f64>,
}

impl Walker<'_> {
    fn root(&self, f: &ArithmeticFunction, start: usize) -> Node {
        let column = match self {
            Walker::Linear { .. } => f
                .linear_representation()
                .unwrap()
                .v()
                .iter()
                .map(crate::value::rational_to_f64)
                .collect(),
            Walker::Direct(_) => Vec::new(),
        };
        Node { value: BigUint::default(), len: 0, state: start, column }
    }

    fn child(&self, node: &Node, q: u32, digit: u32, state: usize) -> Node {
        let column = match self {
            Walker::Linear { mats, .. } => mats[digit as usize]
                .iter()
                .map(|row| row.iter().zip(&node.column).map(|(a, b)| a * b).sum())
                .collect(),
            Walker::Direct(_) => Vec::new(),
        };
        Node { value: &node.value * q + digit, len: node.len + 1, state, column }
    }

    fn value(&self, node: &Node) -> Value {
        match self {
            Walker::Linear { u, .. } => Value::Approx(u.iter().zip(&node.column).map(|(a, b)| a * b).sum()),
            Walker::Direct(f) => f.eval(&node.value),
        }
    }
}

/// Per-length sums `Σ φ(f(n))` over members of `𝓑` of each length
/// `1..=max_len`; `sums[ℓ]` holds length `ℓ` (index 0 unused). The result
/// is independent of thread scheduling.
pub(crate) fn block_sums<const K: usize, P>(
    f: &ArithmeticFunction,
    bset: &BSet,
    max_len: usize,
    phi: P,
) -> Result<Vec<[f64; K]>, StatsError>
where
    P: Fn(&BigUint, &Value) -> Result<[f64; K], StatsError> + Sync,
{
    let walker = match f.linear_representation() {
        Some(rep) if rep.base() == bset.base() => Walker::Linear {
            u: rep.u().iter().map(crate::value::rational_to_f64).collect(),
            mats: rep.matrices().iter().map(|m| m.to_f64()).collect(),
        },
        _ => Walker::Direct(f),
    };
    let q = bset.base();
    // breadth-first expansion to the split depth
    let mut frontier = vec![walker.root(f, bset.start())];
    let mut shallow = vec![[0.0; K]; max_len + 1];
    for _ in 0..SPLIT_DEPTH.min(max_len) {
        let mut next = Vec::new();
        for node in &frontier {
            for d in 0..q {
                if let Some(s) = bset.step(node.state, d) {
                    let child = walker.child(node, q, d, s);
                    if bset.accepts(s) {
                        let v = walker.value(&child);
                        add(&mut shallow[child.len], &phi(&child.value, &v)?);
                    }
                    next.push(child);
                }
            }
        }
        frontier = next;
    }
    let partials: Vec<Vec<[f64; K]>> = frontier
        .par_iter()
        .map(|node| {
            let mut acc = vec![[0.0; K]; max_len + 1];
            descend(&walker, bset, node, max_len, &phi, &mut acc)?;
            Ok(acc)
        })
        .collect::<Result<_, StatsError>>()?;
    for part in &partials {
        for (s, p) in shallow.iter_mut().zip(part) {
            add(s, p);
        }
    }
    Ok(shallow)
}

fn add<const K: usize>(acc: &mut [f64; K], x: &[f64; K]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += b;
    }
}

fn descend<const K: usize, P>(
    walker: &Walker<'_>,
    bset: &BSet,
    node: &Node,
    max_len: usize,
    phi: &P,
    acc: &mut [[f64; K]],
) -> Result<(), StatsError>
where
    P: Fn(&BigUint, &Value) -> Result<[f64; K], StatsError>,
{
    if node.len == max_len {
        return Ok(());
    }
    let q = bset.base();
    for d in 0..q {
        if let Some(s) = bset.step(node.state, d) {
            let child = walker.child(node, q, d, s);
            if bset.accepts(s) {
                let v = walker.value(&child);
                add(&mut acc[child.len], &phi(&child.value, &v)?);
            }
            descend(walker, bset, &child, max_len, phi, acc)?;
        }
    }
    Ok(())
}

/// `Σ_{ℓ > after} term(ℓ, N_ℓ)` with `N_ℓ` the member counts of `bset`.
/// Terms are summed explicitly until they are negligible and the rest is
/// bounded geometrically; returns infinity if the terms do not decay.
pub(crate) fn tail_sum(bset: &BSet, after: usize, term: impl Fn(usize, f64) -> f64) -> f64 {
    const MAX_EXTRA: usize = 20_000;
    let counts = bset.counts_f64(after + MAX_EXTRA);
    let mut sum = 0.0;
    let mut prev: Option<f64> = None;
    for (len, &n) in counts.iter().enumerate().skip(after + 1) {
        let t = term(len, n);
        if !t.is_finite() {
            return f64::INFINITY;
        }
        sum += t;
        if let Some(p) = prev {
            let ratio = if p > 0.0 { t / p } else { 0.0 };
            let small = t <= 1e-18 * sum.max(1e-300) || t == 0.0;
            if small && ratio < 1.0 && len > after + 50 {
                return sum + t * ratio / (1.0 - ratio);
            }
        }
        prev = Some(t);
    }
    f64::INFINITY
}

/// Per-length sums `(Σ g, Σ g²)` over members of `𝓑` with `g = f` or
/// `g = ln f`, up to a length cutoff.
#[derive(Debug, Clone)]
pub struct BlockSums {
    pub q: u32,
    pub r: u32,
    pub max_len: usize,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

impl BlockSums {
    pub fn compute(f: &ArithmeticFunction, r: u32, max_len: usize) -> Result<Self, StatsError> {
        let bset = BSet::new(f.base(), r)?;
        let kind = f.kind();
        let name = f.name().to_string();
        let sums = block_sums::<2, _>(f, &bset, max_len, |n, v| {
            let g = match kind {
                Kind::Additive => v.to_f64(),
                Kind::Multiplicative => v.ln().ok_or_else(|| StatsError::NonPositive {
                    name: name.clone(),
                    n: n.to_string(),
                })?,
            };
            Ok([g, g * g])
        })?;
        Ok(BlockSums {
            q: f.base(),
            r,
            max_len,
            first: sums.iter().map(|s| s[0]).collect(),
            second: sums.iter().map(|s| s[1]).collect(),
        })
    }

    /// Truncated `(B_t, B_tt, B_tx)` at `(1/q, 0)`.
    pub fn derivatives(&self) -> [f64; 3] {
        let q = self.q as f64;
        let mut d = [0.0; 3];
        for len in 1..=self.max_len {
            let w = q.powi(-(len as i32));
            d[0] += w * self.first[len];
            d[1] += w * self.second[len];
            d[2] += len as f64 * q * w * self.first[len];
        }
        d
    }
}

/// Largest deviation of the variance formula from its value at `d` over the
/// box `[lo, hi]` of derivative triples. The formula is quadratic in `B_t`
/// and linear in the others, so the box corners plus the vertex in `B_t`
/// suffice.
fn sigma2_deviation(q: u32, r: u32, d: [f64; 3], lo: [f64; 3], hi: [f64; 3]) -> f64 {
    let s = |bt: f64, btt: f64, btx: f64| constants_from_derivatives(q, r, &bt, &btt, &btx).1;
    let center = s(d[0], d[1], d[2]);
    if lo.iter().chain(&hi).any(|x| !x.is_finite()) {
        return f64::INFINITY;
    }
    let (qf, rf) = (q as f64, r as f64);
    let c2 = (-qf.powf(1.0 - 4.0 * rf) + 2.0 * qf.powf(1.0 - 3.0 * rf) - qf.powf(-4.0 * rf)) / (qf - 1.0)
        - 4.0 * rf * qf.powf(-4.0 * rf);
    let mut worst: f64 = 0.0;
    for btt in [lo[1], hi[1]] {
        for btx in [lo[2], hi[2]] {
            let mut candidates = vec![lo[0], hi[0]];
            if c2 != 0.0 {
                let vertex = btx * qf.powf(-4.0 * rf - 1.0) / c2;
                if (lo[0]..=hi[0]).contains(&vertex) {
                    candidates.push(vertex);
                }
            }
            for bt in candidates {
                worst = worst.max((s(bt, btt, btx) - center).abs());
            }
        }
    }
    worst
}

/// Estimate of `Σ_{ℓ>L} w(ℓ) S_ℓ` from the asymptotic shape
/// `S_ℓ ≈ P(ℓ) β^ℓ`, with the polynomial `P` of the given degree fitted
/// through the last `degree + 1` lengths. Zero when too few lengths exist.
fn extrapolated_tail(sums: &[f64], beta: f64, degree: usize, w: impl Fn(usize) -> f64) -> f64 {
    let max_len = sums.len() - 1;
    if max_len < 2 * (degree + 1) {
        return 0.0;
    }
    let xs: Vec<usize> = (max_len - degree..=max_len).collect();
    let ys: Vec<f64> = xs.iter().map(|&l| sums[l] / beta.powi(l as i32)).collect();
    let p = |l: usize| -> f64 {
        let mut total = 0.0;
        for (j, &xj) in xs.iter().enumerate() {
            let mut basis = ys[j];
            for &xk in xs.iter().filter(|&&xk| xk != xj) {
                basis *= (l as f64 - xk as f64) / (xj as f64 - xk as f64);
            }
            total += basis;
        }
        total
    };
    let mut tail = 0.0;
    for l in max_len + 1..max_len + 20_000 {
        let term = w(l) * p(l) * beta.powi(l as i32);
        tail += term;
        if term.abs() <= 1e-18 * tail.abs().max(1e-300) {
            break;
        }
    }
    tail
}

/// Constants from the block sums truncated at length `max_len`.
///
/// The neglected lengths are estimated by extrapolating the per-length sums
/// along their asymptotic shape `P(ℓ) β^ℓ` and added to the partial sums.
/// The stated errors are rigorous: the bound on the neglected terms from the
/// declared growth `|g(n)| ≤ p·ℓ(n) + o` and the exact member counts beyond
/// the cutoff, plus the size of the estimate itself. The constants from the
/// partial sums alone are reported in `partial_sums`. Results whose bounds
/// exceed `tolerance` are flagged.
pub fn truncated_constants(
    f: &ArithmeticFunction,
    r: Option<u32>,
    max_len: usize,
    tolerance: Option<f64>,
) -> Result<ConstantsResult, StatsError> {
    let r = effective_parameter(r.unwrap_or(f.parameter()));
    let q = f.base();
    let sums = BlockSums::compute(f, r, max_len)?;
    let d = sums.derivatives();
    let bset = BSet::new(q, r)?;
    let growth = f.growth_bound();
    let qf = q as f64;
    let g = |len: usize| growth.at(len).abs();
    let e = [
        tail_sum(&bset, max_len, |l, n| n * qf.powi(-(l as i32)) * g(l)),
        tail_sum(&bset, max_len, |l, n| n * qf.powi(-(l as i32)) * g(l) * g(l)),
        tail_sum(&bset, max_len, |l, n| l as f64 * n * qf.powi(1 - l as i32) * g(l)),
    ];
    let beta = bset.beta();
    let est = [
        extrapolated_tail(&sums.first, beta, 1, |l| qf.powi(-(l as i32))),
        extrapolated_tail(&sums.second, beta, 2, |l| qf.powi(-(l as i32))),
        extrapolated_tail(&sums.first, beta, 1, |l| l as f64 * qf.powi(1 - l as i32)),
    ];
    let partial = constants_from_derivatives(q, r, &d[0], &d[1], &d[2]);
    let d = [d[0] + est[0], d[1] + est[1], d[2] + est[2]];
    let lo: [f64; 3] = std::array::from_fn(|i| d[i] - est[i].abs() - if i == 1 { 0.0 } else { e[i] });
    let hi: [f64; 3] = std::array::from_fn(|i| d[i] + est[i].abs() + e[i]);
    let (mu, sigma2) = constants_from_derivatives(q, r, &d[0], &d[1], &d[2]);
    let mu_error = (e[0] + est[0].abs()) / qf.powi(2 * r as i32);
    let sigma2_error = sigma2_deviation(q, r, d, lo, hi);
    let flagged = tolerance.is_some_and(|tol| mu_error > tol || sigma2_error > tol);
    Ok(ConstantsResult {
        function: f.name().to_string(),
        method: Method::TruncatedSeries,
        q,
        r,
        mu: Value::Approx(mu),
        sigma2: Value::Approx(sigma2),
        error_kind: ErrorKind::TailBound,
        mu_error,
        sigma2_error,
        partial_sums: Some([Value::Approx(partial.0), Value::Approx(partial.1)]),
        derivatives: Some(d.map(Value::Approx)),
        truncation: Some(max_len as u32),
        samples: None,
        digits: None,
        seed: None,
        flagged,
    })
}

/// Mean and variance constants of `ln t(N_k)` for the run length transform
/// `t` of `s`, from the closed forms in terms of `ln s_i`, truncated at
/// `i, j ≤ cutoff`. Requires `s_i ≥ 1`; the tails use the declared bound
/// `s_i ≤ A c^i`.
pub fn runlength_constants(s: &BaseSequence, cutoff: u32) -> Result<ConstantsResult, StatsError> {
    if cutoff == 0 {
        return Err(StatsError::InvalidParameter("cutoff must be positive".into()));
    }
    let logs: Vec<f64> = (1..=cutoff)
        .map(|i| {
            let v = s.term(i);
            match v.ln() {
                Some(l) if l >= 0.0 => Ok(l),
                _ => Err(StatsError::InvalidParameter(format!("s_{i} = {v} is below 1"))),
            }
        })
        .collect::<Result<_, _>>()?;
    let l = |i: u32| logs[i as usize - 1];
    let p2 = |e: i32| 2f64.powi(e);
    let (mut mu, mut sigma2) = (0.0, 0.0);
    for i in 1..=cutoff {
        let ii = i as i32;
        mu += l(i) * p2(-ii - 2);
        sigma2 += l(i) * l(i) * (p2(-ii - 2) - (2.0 * i as f64 - 1.0) * p2(-2 * ii - 4));
        for j in i + 1..=cutoff {
            sigma2 -= l(i) * l(j) * (i + j - 1) as f64 * p2(-ii - j as i32 - 3);
        }
    }
    // tails: every neglected term involves an index above the cutoff
    let bound = |i: u32| {
        if i <= cutoff {
            l(i)
        } else {
            s.bound_a.max(1.0).ln() + i as f64 * s.bound_c.max(1.0).ln()
        }
    };
    let far = cutoff + 2000;
    let mut mu_error = 0.0;
    let mut sigma2_error = 0.0;
    for i in cutoff + 1..=far {
        let ii = i as i32;
        mu_error += bound(i) * p2(-ii - 2);
        sigma2_error += bound(i) * bound(i) * p2(-ii - 2);
    }
    for j in cutoff + 1..=far {
        for i in 1..j.min(cutoff + 200) {
            sigma2_error += bound(i) * bound(j) * (i + j - 1) as f64 * p2(-(i as i32) - j as i32 - 3);
        }
    }
    Ok(ConstantsResult {
        function: format!("runlength_{}", s.name()),
        method: Method::ClosedFormRunlength,
        q: 2,
        r: 1,
        mu: Value::Approx(mu),
        sigma2: Value::Approx(sigma2),
        error_kind: ErrorKind::TailBound,
        mu_error,
        sigma2_error,
        derivatives: None,
        partial_sums: None,
        truncation: Some(cutoff),
        samples: None,
        digits: None,
        seed: None,
        flagged: false,
    })
}
