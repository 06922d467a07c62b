//! Named arithmetic functions together with their claimed structure.

pub mod representations;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digits::{self, Block, DigitsError};
use crate::linrep::LinearRepresentation;
use crate::transducer::Transducer;
use crate::Value;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown function {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Digits(#[from] DigitsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Additive,
    Multiplicative,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Additive => "additive",
            Kind::Multiplicative => "multiplicative",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Growth {
    Logarithmic,
    Polynomial,
}

/// Declared bound `|g(n)| ≤ per_digit · ℓ(n) + offset`, where `g = f` for
/// additive and `g = ln f` for multiplicative functions. Only used for tail
/// estimates; it is not verified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthBound {
    pub per_digit: f64,
    pub offset: f64,
}

impl GrowthBound {
    pub fn at(&self, len: usize) -> f64 {
        self.per_digit * len as f64 + self.offset
    }
}

type Evaluator = Arc<dyn Fn(&BigUint) -> Value + Send + Sync>;

/// An evaluator with its base, kind and claimed parameter `r`, optionally
/// carrying a linear representation and a transducer for the same function.
#[derive(Clone)]
pub struct ArithmeticFunction {
    name: String,
    base: u32,
    kind: Kind,
    parameter: u32,
    growth: GrowthBound,
    eval: Evaluator,
    linear_representation: Option<LinearRepresentation>,
    transducer: Option<Transducer>,
}

impl fmt::Debug for ArithmeticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ArithmeticFunction")
            .field("name", &self.name)
            .field("base", &self.base)
            .field("kind", &self.kind)
            .field("parameter", &self.parameter)
            .finish_non_exhaustive()
    }
}

impl ArithmeticFunction {
    pub fn new(
        name: impl Into<String>,
        base: u32,
        kind: Kind,
        parameter: u32,
        growth: GrowthBound,
        eval: impl Fn(&BigUint) -> Value + Send + Sync + 'static,
    ) -> Self {
        ArithmeticFunction {
            name: name.into(),
            base,
            kind,
            parameter,
            growth,
            eval: Arc::new(eval),
            linear_representation: None,
            transducer: None,
        }
    }

    pub fn with_linear_representation(mut self, rep: LinearRepresentation) -> Self {
        assert_eq!(rep.base(), self.base);
        self.linear_representation = Some(rep);
        self
    }

    pub fn with_transducer(mut self, t: Transducer) -> Self {
        assert_eq!(t.base(), self.base);
        self.transducer = Some(t);
        self
    }

    pub fn with_parameter(mut self, r: u32) -> Self {
        self.parameter = r;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn parameter(&self) -> u32 {
        self.parameter
    }

    pub fn growth(&self) -> Growth {
        match self.kind {
            Kind::Additive => Growth::Logarithmic,
            Kind::Multiplicative => Growth::Polynomial,
        }
    }

    pub fn growth_bound(&self) -> GrowthBound {
        self.growth
    }

    pub fn linear_representation(&self) -> Option<&LinearRepresentation> {
        self.linear_representation.as_ref()
    }

    pub fn transducer(&self) -> Option<&Transducer> {
        self.transducer.as_ref()
    }

    pub fn eval(&self, n: &BigUint) -> Value {
        (self.eval)(n)
    }

    pub fn eval_u64(&self, n: u64) -> Value {
        self.eval(&BigUint::from(n))
    }

    /// The quantity whose distribution is studied: `f(n)` for additive and
    /// `ln f(n)` for multiplicative functions.
    ///
    /// # Panics
    /// Panics if a multiplicative function takes a nonpositive value.
    pub fn observable(&self, n: &BigUint) -> f64 {
        let value = self.eval(n);
        match self.kind {
            Kind::Additive => value.to_f64(),
            Kind::Multiplicative => value
                .ln()
                .unwrap_or_else(|| panic!("{} is not positive at {n}", self.name)),
        }
    }

    /// Neutral value of the combining operation: 0 or 1.
    pub fn identity_value(&self) -> Value {
        match self.kind {
            Kind::Additive => Value::zero(),
            Kind::Multiplicative => Value::one(),
        }
    }

    pub fn combine(&self, a: &Value, b: &Value) -> Value {
        match self.kind {
            Kind::Additive => a + b,
            Kind::Multiplicative => a * b,
        }
    }
}

/// A sequence `s₁, s₂, …` with declared bound `s_i ≤ A·c^i`.
#[derive(Clone)]
pub struct BaseSequence {
    name: String,
    term: Arc<dyn Fn(u32) -> Value + Send + Sync>,
    pub bound_a: f64,
    pub bound_c: f64,
}

impl fmt::Debug for BaseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BaseSequence")
            .field("name", &self.name)
            .field("bound_a", &self.bound_a)
            .field("bound_c", &self.bound_c)
            .finish_non_exhaustive()
    }
}

impl BaseSequence {
    pub fn new(
        name: impl Into<String>,
        bound_a: f64,
        bound_c: f64,
        term: impl Fn(u32) -> Value + Send + Sync + 'static,
    ) -> Self {
        BaseSequence {
            name: name.into(),
            term: Arc::new(term),
            bound_a,
            bound_c,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `s_i` for `i ≥ 1`.
    pub fn term(&self, i: u32) -> Value {
        assert!(i >= 1, "base sequences are indexed from 1");
        (self.term)(i)
    }

    /// Jacobsthal numbers `(2^{i+2} - (-1)^i) / 3`, bounded by `2·2^i`.
    pub fn jacobsthal() -> Self {
        BaseSequence::new("jacobsthal", 2.0, 2.0, |i| Value::from_biguint(jacobsthal(i)))
    }

    pub fn constant_one() -> Self {
        BaseSequence::new("one", 1.0, 1.0, |_| Value::one())
    }
}

/// `(2^{i+2} - (-1)^i) / 3`.
pub fn jacobsthal(i: u32) -> BigUint {
    assert!(i >= 1);
    let p = BigUint::one() << (i + 2);
    if i.is_multiple_of(2) {
        (p - 1u32) / 3u32
    } else {
        (p + 1u32) / 3u32
    }
}

/// `∏_{i ∈ 𝓛(n)} s_i` over the run-length multiset of `n`.
pub fn run_length_transform(s: &BaseSequence, n: &BigUint) -> Value {
    digits::run_lengths(n)
        .lengths()
        .iter()
        .fold(Value::one(), |acc, &i| &acc * &s.term(i))
}

type OptimalCounts = [BigUint; 5];

fn optimal_counts_step(cur: &OptimalCounts, next: &OptimalCounts, bit: bool) -> (OptimalCounts, OptimalCounts) {
    let even = |u: &OptimalCounts| -> OptimalCounts {
        [u[0].clone(), u[0].clone(), u[1].clone(), u[0].clone(), u[3].clone()]
    };
    let odd = [
        &cur[1] + &next[3],
        cur[2].clone(),
        BigUint::zero(),
        next[4].clone(),
        BigUint::zero(),
    ];
    if bit {
        (odd, even(next))
    } else {
        (even(cur), odd)
    }
}

/// The vectors `(u₁, …, u₅)(n)` and `(u₁, …, u₅)(n + 1)` of the five-sequence
/// recursion for optimal representations, computed jointly from the most
/// significant bit down.
pub fn optimal_count_vectors(n: &BigUint) -> (OptimalCounts, OptimalCounts) {
    let one = BigUint::one;
    let zero = BigUint::zero;
    let mut cur: OptimalCounts = [one(), one(), one(), one(), one()];
    let mut next: OptimalCounts = [one(), one(), zero(), zero(), zero()];
    for i in (0..n.bits()).rev() {
        (cur, next) = optimal_counts_step(&cur, &next, n.bit(i));
    }
    (cur, next)
}

/// Number of {0, 1, -1}-representations of `n` with minimum Hamming weight.
pub fn r_opt(n: &BigUint) -> BigUint {
    let (mut cur, _) = optimal_count_vectors(n);
    std::mem::take(&mut cur[0])
}

pub fn sum_of_digits(q: u32) -> ArithmeticFunction {
    let t = Transducer::digit_sum(q);
    let rep = t.to_linear_representation().minimize().expect("zero-insensitive");
    let name = if q == 2 { "sum_of_digits".to_string() } else { format!("sum_of_digits_{q}") };
    ArithmeticFunction::new(
        name,
        q,
        Kind::Additive,
        0,
        GrowthBound { per_digit: (q - 1) as f64, offset: 0.0 },
        move |n| Value::from_int(digits::raw_digits(n, q).iter().map(|&d| d as u64).sum::<u64>()),
    )
    .with_transducer(t)
    .with_linear_representation(rep)
}

/// `2^{s₂(n)}`.
pub fn exp_sum_of_digits() -> ArithmeticFunction {
    ArithmeticFunction::new(
        "exp_sum_of_digits",
        2,
        Kind::Multiplicative,
        0,
        GrowthBound { per_digit: std::f64::consts::LN_2, offset: 0.0 },
        |n| Value::from_biguint(BigUint::one() << n.count_ones()),
    )
    .with_linear_representation(representations::two_pow_digit_sum())
}

/// Block count `c_B`. The declared parameter is the least `r` accepted by
/// the exact additive test on the block-counting transducer's
/// representation; it never exceeds `ℓ(B)`.
pub fn block_count_function(block: Block) -> ArithmeticFunction {
    let t = Transducer::block_counter(std::slice::from_ref(&block)).expect("single block");
    let rep = t.to_linear_representation().minimize().expect("zero-insensitive");
    let len = block.len() as u32;
    let r = rep
        .min_parameter(Kind::Additive, len)
        .expect("zero-insensitive")
        .unwrap_or(len);
    let name = format!("c_{block}");
    ArithmeticFunction::new(
        name,
        block.base(),
        Kind::Additive,
        r,
        GrowthBound { per_digit: 1.0, offset: block.len() as f64 },
        move |n| Value::from_int(digits::block_count(n, &block) as u64),
    )
    .with_transducer(t)
    .with_linear_representation(rep)
}

/// Runs in the binary expansion, plus one for odd `n`; equals `c_01 + c_10`.
pub fn adjusted_gray() -> ArithmeticFunction {
    let blocks = [Block::parse("01", 2).unwrap(), Block::parse("10", 2).unwrap()];
    let t = Transducer::block_counter(&blocks).unwrap();
    let rep = t.to_linear_representation().minimize().expect("zero-insensitive");
    ArithmeticFunction::new(
        "adjusted_gray",
        2,
        Kind::Additive,
        1,
        GrowthBound { per_digit: 1.0, offset: 1.0 },
        |n| Value::from_int(digits::adjusted_gray(n)),
    )
    .with_transducer(t)
    .with_linear_representation(rep)
}

pub fn h_naf() -> ArithmeticFunction {
    ArithmeticFunction::new(
        "h_naf",
        2,
        Kind::Additive,
        2,
        GrowthBound { per_digit: 0.5, offset: 1.0 },
        |n| Value::from_int(digits::h_naf(n)),
    )
    .with_transducer(Transducer::naf_weight())
    .with_linear_representation(representations::naf_weight())
}

pub fn r_opt_function() -> ArithmeticFunction {
    ArithmeticFunction::new(
        "r_opt",
        2,
        Kind::Multiplicative,
        3,
        // at most 2^{ℓ+1} signed representations of length ℓ + 1
        GrowthBound { per_digit: std::f64::consts::LN_2, offset: std::f64::consts::LN_2 },
        |n| Value::from_biguint(r_opt(n)),
    )
    .with_linear_representation(representations::optimal_representation_count())
}

pub fn run_length_function(s: BaseSequence) -> ArithmeticFunction {
    let per_digit = s.bound_c.max(1.0).ln() + s.bound_a.max(1.0).ln();
    ArithmeticFunction::new(
        format!("runlength_{}", s.name()),
        2,
        Kind::Multiplicative,
        1,
        GrowthBound { per_digit, offset: 0.0 },
        move |n| run_length_transform(&s, n),
    )
}

/// The default catalog: digit sum, `2^{s₂}`, `c_0101`, adjusted Gray weight,
/// NAF weight, optimal representation count, Jacobsthal run length transform.
pub fn catalog_entries() -> Vec<ArithmeticFunction> {
    vec![
        sum_of_digits(2),
        exp_sum_of_digits(),
        block_count_function(Block::parse("0101", 2).unwrap()),
        adjusted_gray(),
        h_naf(),
        r_opt_function(),
        run_length_function(BaseSequence::jacobsthal()),
    ]
}

/// Looks up a catalog entry by name. Besides the default names, `c_<block>`
/// builds a binary block count (for example `c_0110`) and
/// `sum_of_digits_<q>` a base-q digit sum.
pub fn lookup(name: &str) -> Result<ArithmeticFunction, CatalogError> {
    if let Some(block) = name.strip_prefix("c_") {
        return Ok(block_count_function(Block::parse(block, 2)?));
    }
    if let Some(q) = name.strip_prefix("sum_of_digits_") {
        if let Ok(q) = q.parse::<u32>() {
            if q >= 2 {
                return Ok(sum_of_digits(q));
            }
        }
    }
    catalog_entries()
        .into_iter()
        .find(|f| f.name() == name)
        .ok_or_else(|| CatalogError::Unknown(name.to_string()))
}
