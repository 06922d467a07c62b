//! Digit functions that split along runs of zeros.
//!
//! A function `f` on the nonnegative integers is *q-quasiadditive* with
//! parameter `r` if `f(q^(k+r)·a + b) = f(a) + f(b)` whenever `b < q^k`, and
//! *q-quasimultiplicative* if the same holds with a product on the right.
//! This crate provides
//!
//! - [`digits`]: base-q expansions, block counts, the nonadjacent form, runs;
//! - [`catalog`]: ready-made functions (block counts, NAF weight, number of
//!   optimal signed representations, run length transforms, ...);
//! - [`quasi`]: definition-level checks and the zero-run split evaluation;
//! - [`linrep`]: exact linear representations of q-regular functions,
//!   minimization and the exact quasiadditivity / quasimultiplicativity tests;
//! - [`transducer`]: output sums of complete deterministic transducers and the
//!   reset-sequence sufficient condition;
//! - [`stats`]: the generating functions over zero-run-free blocks, the mean
//!   and variance constants of the central limit law (exact, truncated or
//!   sampled), and empirical normality experiments.

pub mod catalog;
pub mod digits;
pub mod linrep;
pub mod quasi;
pub mod stats;
pub mod transducer;
mod value;

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;

pub use catalog::{ArithmeticFunction, BaseSequence, GrowthBound, Kind};
pub use digits::{Block, DigitString, RunLengthMultiset, SignedDigitString};
pub use linrep::{LinearRepresentation, Matrix, SubspaceBasis};
pub use transducer::{ResetReport, Transducer};
pub use value::{round_sig, Value};

/// Exact rational scalar used by every exact computation in the crate.
pub type Rational = BigRational;
