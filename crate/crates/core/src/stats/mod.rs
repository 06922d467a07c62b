//! Generating functions over the zero-run-free building blocks, the mean and
//! variance constants of the central limit law, and sampling experiments.
//!
//! For a quasimultiplicative `f` with parameter `r` let `𝓑` be the positive
//! integers not divisible by `q` whose expansion avoids `0^r`, and
//! `B(x, t) = Σ_{n∈𝓑} x^{ℓ(n)} f(n)^t`. The constants are
//!
//! ```text
//! μ  = B_t / q^{2r}
//! σ² = -B_t² q^{1-4r}/(q-1) + 2 B_t² q^{1-3r}/(q-1) - B_t² q^{-4r}/(q-1)
//!      - 4r B_t² q^{-4r} + B_tt q^{-2r} - 2 B_t B_tx q^{-4r-1}
//! ```
//!
//! with all derivatives taken at `(x, t) = (1/q, 0)`. Additive functions use
//! `e^{t f(n)}` in place of `f(n)^t`, so `B_t = Σ q^{-ℓ(n)} f(n)`,
//! `B_tt = Σ q^{-ℓ(n)} f(n)²` and `B_tx = Σ ℓ(n) q^{1-ℓ(n)} f(n)`.

mod bset;
mod genfun;
mod moments;
mod sampling;
mod truncated;

use num_traits::{FromPrimitive, Num};
use serde::Serialize;
use thiserror::Error;

use crate::catalog::Kind;
use crate::{ArithmeticFunction, Value};

pub use bset::{beta, count_series_check, denominator_identity, BSet, CountSeriesCheck};
pub use genfun::{
    b_truncated, brute_force_f_coeff, f_coefficients, f_from_b, f_from_b_exact, weight, BTruncated,
};
pub use moments::{exact_constants_additive, LengthSums, MomentSystem};
pub use sampling::{
    clt_experiment, ks_distance, ks_distance_lattice, monte_carlo_constants, sample_observables,
    ExperimentResult, HistogramBin, Scale,
};
pub use truncated::{runlength_constants, truncated_constants, BlockSums};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{0} is not additive")]
    NotAdditive(String),
    #[error("{0} has neither a linear representation nor a transducer")]
    NoFiniteStateEvaluator(String),
    #[error("I - A/q is singular; the growth precondition is violated")]
    SpectralObstruction,
    #[error("denominator vanishes at x = {0}")]
    Pole(f64),
    #[error("series may diverge: |x| = {x} is not below the bound {radius}")]
    DivergenceRisk { x: f64, radius: f64 },
    #[error("reference variance is zero; the limit law excludes constant functions")]
    DegenerateVariance,
    #[error("{name} is not positive at n = {n}")]
    NonPositive { name: String, n: String },
    #[error("{0}")]
    LinRep(#[from] crate::linrep::LinRepError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactRational,
    TruncatedSeries,
    ClosedFormRunlength,
    MonteCarlo,
}

/// How `mu_error` and `sigma2_error` are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    /// Zero error.
    Exact,
    /// Deterministic bound from the declared growth of the function.
    TailBound,
    /// Half-width of a normal-approximation 95% confidence interval.
    Confidence95,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsResult {
    pub function: String,
    pub method: Method,
    pub q: u32,
    pub r: u32,
    pub mu: Value,
    pub sigma2: Value,
    pub error_kind: ErrorKind,
    pub mu_error: f64,
    pub sigma2_error: f64,
    /// `B_t`, `B_tt`, `B_tx` at `(1/q, 0)` where they were computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derivatives: Option<[Value; 3]>,
    /// `μ` and `σ²` from the truncated sums alone, before the estimate of
    /// the neglected terms is added.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partial_sums: Option<[Value; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub digits: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Set when a bound exceeds the tolerance it was requested with.
    pub flagged: bool,
}

/// Mean and variance constants from `B_t`, `B_tt`, `B_tx` at `(1/q, 0)`.
pub fn constants_from_derivatives<T>(q: u32, r: u32, bt: &T, btt: &T, btx: &T) -> (T, T)
where
    T: Num + Clone + FromPrimitive,
{
    let c = |n: i64| T::from_i64(n).unwrap();
    let qq = c(q as i64);
    let pow = |e: u32| -> T { (0..e).fold(T::one(), |acc, _| acc * qq.clone()) };
    let q2r = pow(2 * r);
    let q3r = pow(3 * r);
    let q4r = pow(4 * r);
    let qm1 = c(q as i64 - 1);
    let bt2 = bt.clone() * bt.clone();
    let mu = bt.clone() / q2r.clone();
    let sigma2 = T::zero() - bt2.clone() * qq.clone() / (q4r.clone() * qm1.clone())
        + c(2) * bt2.clone() * qq.clone() / (q3r * qm1.clone())
        - bt2.clone() / (q4r.clone() * qm1)
        - c(4 * r as i64) * bt2 / q4r.clone()
        + btt.clone() / q2r
        - c(2) * bt.clone() * btx.clone() / (q4r * qq);
    (mu, sigma2)
}

/// The parameter used for the block decomposition: `r = 0` (strong
/// additivity) is replaced by `r = 1`, which is valid as well.
pub(crate) fn effective_parameter(r: u32) -> u32 {
    r.max(1)
}

/// The studied quantity `f(n)` (additive) or `ln f(n)` (multiplicative), as a
/// checked conversion.
pub(crate) fn observable(f: &ArithmeticFunction, n: &num_bigint::BigUint) -> Result<f64, StatsError> {
    let v = f.eval(n);
    match f.kind() {
        Kind::Additive => Ok(v.to_f64()),
        Kind::Multiplicative => v.ln().ok_or_else(|| StatsError::NonPositive {
            name: f.name().to_string(),
            n: n.to_string(),
        }),
    }
}
