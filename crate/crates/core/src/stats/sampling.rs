//! Monte Carlo estimates and normality experiments.
//!
//! Sample `i` draws from its own ChaCha8 stream (`seed`, stream `i`), and
//! results are merged in index order, so every output is bit-identical for a
//! fixed seed regardless of the number of worker threads.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use statrs::distribution::{ContinuousCDF, Normal};

use super::{observable, ConstantsResult, ErrorKind, Method, StatsError};
use crate::catalog::{ArithmeticFunction, Kind};
use crate::quasi::random_below;
use crate::Value;

/// 97.5% quantile of the standard normal distribution.
const Z_975: f64 = 1.959963984540054;

/// Where the random integers come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scale {
    /// Uniform on `[0, q^k)`.
    Power(u32),
    /// Uniform on `[0, K)`.
    Bound(BigUint),
}

impl Serialize for Scale {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(1))?;
        match self {
            Scale::Power(k) => map.serialize_entry("power", k)?,
            Scale::Bound(k) => map.serialize_entry("bound", &k.to_string())?,
        }
        map.end()
    }
}

impl Scale {
    /// `k`, or `log_q K` for a bound.
    pub fn effective_digits(&self, q: u32) -> f64 {
        match self {
            Scale::Power(k) => *k as f64,
            Scale::Bound(k) => crate::value::ln_rational(&crate::Rational::from_integer(k.clone().into()))
                / (q as f64).ln(),
        }
    }
}

fn sample_power<R: Rng>(rng: &mut R, q: u32, k: u32) -> BigUint {
    if q.is_power_of_two() {
        random_below(rng, &(BigUint::from(1u32) << (k * q.trailing_zeros())))
    } else {
        (0..k).fold(BigUint::default(), |acc, _| acc * q + rng.random_range(0..q))
    }
}

fn sample<R: Rng>(rng: &mut R, q: u32, scale: &Scale) -> BigUint {
    match scale {
        Scale::Power(k) => sample_power(rng, q, *k),
        Scale::Bound(bound) => {
            let k = crate::digits::expansion_len(&(bound - 1u32), q) as u32;
            loop {
                let n = sample_power(rng, q, k);
                if &n < bound {
                    return n;
                }
            }
        }
    }
}

/// `m` values of `f(N)` (additive) or `ln f(N)` (multiplicative) for random
/// `N` drawn according to `scale`.
pub fn sample_observables(
    f: &ArithmeticFunction,
    scale: &Scale,
    m: usize,
    seed: u64,
) -> Result<Vec<f64>, StatsError> {
    if let Scale::Bound(b) = scale {
        if b.bits() == 0 {
            return Err(StatsError::InvalidParameter("bound must be positive".into()));
        }
    }
    let q = f.base();
    (0..m)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            observable(f, &sample(&mut rng, q, scale))
        })
        .collect()
}

struct Moments {
    mean: f64,
    variance: f64,
    fourth: f64,
}

fn moments(xs: &[f64]) -> Moments {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let (mut s2, mut s4) = (0.0, 0.0);
    for x in xs {
        let d = (x - mean) * (x - mean);
        s2 += d;
        s4 += d * d;
    }
    Moments { mean, variance: if xs.len() > 1 { s2 / (m - 1.0) } else { 0.0 }, fourth: s4 / m }
}

/// `μ ≈ mean/k`, `σ² ≈ variance/k` over `m` random `k`-digit integers, with
/// 95% normal-approximation half-widths (sampling error only; the `O(1/k)`
/// bias of the finite-`k` moments is not included).
pub fn monte_carlo_constants(
    f: &ArithmeticFunction,
    k: u32,
    m: usize,
    seed: u64,
) -> Result<ConstantsResult, StatsError> {
    if k == 0 || m < 2 {
        return Err(StatsError::InvalidParameter("need k ≥ 1 and at least two samples".into()));
    }
    let xs = sample_observables(f, &Scale::Power(k), m, seed)?;
    let mo = moments(&xs);
    let (kf, mf) = (k as f64, m as f64);
    let mu_error = Z_975 * (mo.variance / mf).sqrt() / kf;
    let var_of_var = (mo.fourth - mo.variance * mo.variance).max(0.0) / mf;
    let sigma2_error = Z_975 * var_of_var.sqrt() / kf;
    Ok(ConstantsResult {
        function: f.name().to_string(),
        method: Method::MonteCarlo,
        q: f.base(),
        r: f.parameter(),
        mu: Value::Approx(mo.mean / kf),
        sigma2: Value::Approx(mo.variance / kf),
        error_kind: ErrorKind::Confidence95,
        mu_error,
        sigma2_error,
        derivatives: None,
        partial_sums: None,
        truncation: None,
        samples: Some(m),
        digits: Some(k),
        seed: Some(seed),
        flagged: false,
    })
}

fn phi(x: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

/// `sup_x |F̂(x) - Φ(x)|` for the empirical distribution of `xs`.
pub fn ks_distance(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = phi(x);
            ((i as f64 + 1.0) / m - c).max(c - i as f64 / m)
        })
        .fold(0.0, f64::max)
}

/// KS distance for samples on a lattice `origin + j·h`, against the normal
/// law with continuity correction: at each lattice point `x` the empirical
/// `F̂(x)` is compared with `Φ(x + h/2)`, the normal mass of everything
/// rounding to `x` or below.
pub fn ks_distance_lattice(xs: &[f64], origin: f64, h: f64) -> f64 {
    let idx: Vec<i64> = xs.iter().map(|x| ((x - origin) / h).round() as i64).collect();
    let (lo, hi) = (*idx.iter().min().unwrap(), *idx.iter().max().unwrap());
    let mut counts = vec![0usize; (hi - lo + 1) as usize];
    for j in &idx {
        counts[(j - lo) as usize] += 1;
    }
    let m = xs.len() as f64;
    let point = |j: i64| origin + j as f64 * h;
    // below the smallest sample F̂ = 0
    let mut worst = phi(point(lo - 1) + h / 2.0);
    let mut cum = 0usize;
    for (off, c) in counts.iter().enumerate() {
        cum += c;
        let x = point(lo + off as i64);
        worst = worst.max((cum as f64 / m - phi(x + h / 2.0)).abs());
    }
    worst
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub function: String,
    pub scale: Scale,
    /// `k`, or `log_q K`.
    pub effective_digits: f64,
    pub samples: usize,
    pub seed: u64,
    pub mu_reference: f64,
    pub sigma2_reference: f64,
    /// Mean and variance of the raw observable.
    pub sample_mean: f64,
    pub sample_variance: f64,
    /// Mean and variance of the standardized values.
    pub standardized_mean: f64,
    pub standardized_variance: f64,
    pub ks_distance: f64,
    /// Spacing of the standardized values when the observable is
    /// integer-valued.
    pub lattice_step: Option<f64>,
    /// Continuity-corrected KS distance, for lattice-valued observables.
    pub ks_distance_lattice: Option<f64>,
    /// KS distance after standardizing by the sample mean and variance
    /// instead of the reference constants (continuity-corrected for
    /// lattice-valued observables). Separates the finite-`k` offsets of the
    /// moments from the shape of the distribution.
    pub ks_distance_sample_standardized: Option<f64>,
    pub histogram: Vec<HistogramBin>,
    pub below_range: usize,
    pub above_range: usize,
}

impl ExperimentResult {
    /// `bin_left,bin_right,count` lines with a header.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("bin_left,bin_right,count\n");
        for b in &self.histogram {
            let _ = writeln!(out, "{},{},{}", b.left, b.right, b.count);
        }
        out
    }
}

/// Histogram range and bin count of the standardized values.
pub const HISTOGRAM_RANGE: f64 = 4.0;
pub const HISTOGRAM_BINS: usize = 40;

/// Standardizes `m` samples by the reference constants,
/// `(L - μ·n)/(σ·√n)` with `n = k` or `n = log_q K`, and measures the
/// distance to the standard normal law.
pub fn clt_experiment(
    f: &ArithmeticFunction,
    scale: &Scale,
    m: usize,
    seed: u64,
    mu: f64,
    sigma2: f64,
) -> Result<ExperimentResult, StatsError> {
    if sigma2 <= 0.0 || !sigma2.is_finite() {
        return Err(StatsError::DegenerateVariance);
    }
    if m == 0 {
        return Err(StatsError::InvalidParameter("no samples".into()));
    }
    let xs = sample_observables(f, scale, m, seed)?;
    let n = scale.effective_digits(f.base());
    let (center, spread) = (mu * n, (sigma2 * n).sqrt());
    let zs: Vec<f64> = xs.iter().map(|x| (x - center) / spread).collect();
    let raw = moments(&xs);
    let std = moments(&zs);
    let integer_valued = f.kind() == Kind::Additive && xs.iter().all(|x| x.fract() == 0.0);
    let lattice_step = integer_valued.then(|| 1.0 / spread);
    let ks_lattice = lattice_step.map(|h| ks_distance_lattice(&zs, -center / spread, h));
    let sd = raw.variance.sqrt();
    let ks_sample = (sd > 0.0).then(|| {
        let ws: Vec<f64> = xs.iter().map(|x| (x - raw.mean) / sd).collect();
        if integer_valued {
            ks_distance_lattice(&ws, -raw.mean / sd, 1.0 / sd)
        } else {
            ks_distance(&ws)
        }
    });

    let width = 2.0 * HISTOGRAM_RANGE / HISTOGRAM_BINS as f64;
    let mut histogram: Vec<HistogramBin> = (0..HISTOGRAM_BINS)
        .map(|i| HistogramBin {
            left: -HISTOGRAM_RANGE + i as f64 * width,
            right: -HISTOGRAM_RANGE + (i + 1) as f64 * width,
            count: 0,
        })
        .collect();
    let (mut below, mut above) = (0, 0);
    for z in &zs {
        let pos = (z + HISTOGRAM_RANGE) / width;
        if pos < 0.0 {
            below += 1;
        } else if pos >= HISTOGRAM_BINS as f64 {
            above += 1;
        } else {
            histogram[pos.to_usize().unwrap()].count += 1;
        }
    }
    Ok(ExperimentResult {
        function: f.name().to_string(),
        scale: scale.clone(),
        effective_digits: n,
        samples: m,
        seed,
        mu_reference: mu,
        sigma2_reference: sigma2,
        sample_mean: raw.mean,
        sample_variance: raw.variance,
        standardized_mean: std.mean,
        standardized_variance: std.variance,
        ks_distance: ks_distance(&zs),
        lattice_step,
        ks_distance_lattice: ks_lattice,
        ks_distance_sample_standardized: ks_sample,
        histogram,
        below_range: below,
        above_range: above,
    })
}
