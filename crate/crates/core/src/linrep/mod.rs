//! Exact linear representations of q-regular functions.
//!
//! A representation `(u, (M_0, …, M_{q-1}), v)` defines
//! `f(n) = uᵗ · M_{n_0} · M_{n_1} ⋯ M_{n_L} · v` where `n_L ⋯ n_0` is the
//! base-q expansion of `n`, so the least significant digit sits next to `u`
//! and leading zeros act on `v`. Equivalently the column vectors
//! `f(n) = M_{n_0} ⋯ M_{n_L} v` satisfy `f(qn + i) = M_i f(n)`.
//!
//! Everything here is exact rational arithmetic: the classifiers are
//! equality and rank conditions.

mod matrix;
mod rational;
mod subspace;

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::Kind;
use crate::digits::raw_digits;
use crate::Rational;

pub use matrix::{dot, is_zero_vec, rat, sub_vec, Matrix};
pub use rational::{parse_rational, JsonRational};
pub use subspace::SubspaceBasis;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinRepError {
    #[error("base must be at least 2, got {0}")]
    InvalidBase(u32),
    #[error("expected {expected} matrices, got {got}")]
    MatrixCount { expected: usize, got: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("representation is not zero-insensitive (M_0 v != v)")]
    NotZeroInsensitive,
    #[error("representation has dimension {dimension} but the function needs only {minimal}; minimize it first")]
    NotMinimal { dimension: usize, minimal: usize },
    #[error("no fixpoint of v -> M_0 v within {0} iterations")]
    NoFixpoint(usize),
    #[error("minimized representation is not zero-insensitive")]
    MinimizationLostZeroInsensitivity,
    #[error("invalid representation file: {0}")]
    Format(String),
}

/// `(u, (M_i), v)` over the rationals, all matrices `d × d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRepresentation {
    base: u32,
    u: Vec<Rational>,
    matrices: Vec<Matrix>,
    v: Vec<Rational>,
}

/// Result of the four-condition quasiadditivity test, with the affine
/// closures it was evaluated on.
#[derive(Debug, Clone)]
pub struct AdditiveCertificate {
    pub r: u32,
    /// `uᵗ v = 0`
    pub value_at_zero_vanishes: bool,
    /// `U` orthogonal to `(M_0^r - I) v`
    pub u_orthogonal: bool,
    /// `V` orthogonal to `uᵗ (M_0^r - I)`
    pub v_orthogonal: bool,
    /// `Uᵗ M_0^r V = 0`
    pub cross_vanishes: bool,
    pub u_space: SubspaceBasis,
    pub v_space: SubspaceBasis,
}

impl AdditiveCertificate {
    pub fn holds(&self) -> bool {
        self.value_at_zero_vanishes && self.u_orthogonal && self.v_orthogonal && self.cross_vanishes
    }
}

impl LinearRepresentation {
    pub fn new(
        base: u32,
        u: Vec<Rational>,
        matrices: Vec<Matrix>,
        v: Vec<Rational>,
    ) -> Result<Self, LinRepError> {
        if base < 2 {
            return Err(LinRepError::InvalidBase(base));
        }
        if matrices.len() != base as usize {
            return Err(LinRepError::MatrixCount {
                expected: base as usize,
                got: matrices.len(),
            });
        }
        let d = u.len();
        if v.len() != d {
            return Err(LinRepError::Dimension(format!(
                "u has length {d} but v has length {}",
                v.len()
            )));
        }
        for (i, m) in matrices.iter().enumerate() {
            if m.rows() != d || m.cols() != d {
                return Err(LinRepError::Dimension(format!(
                    "M_{i} is {}x{}, expected {d}x{d}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(LinearRepresentation {
            base,
            u,
            matrices,
            v,
        })
    }

    /// Convenience constructor from integer entries.
    pub fn from_i64(base: u32, u: &[i64], matrices: &[&[&[i64]]], v: &[i64]) -> Result<Self, LinRepError> {
        LinearRepresentation::new(
            base,
            u.iter().map(|&x| rat(x)).collect(),
            matrices.iter().map(|m| Matrix::from_i64(m)).collect(),
            v.iter().map(|&x| rat(x)).collect(),
        )
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn u(&self) -> &[Rational] {
        &self.u
    }

    pub fn v(&self) -> &[Rational] {
        &self.v
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn matrix(&self, digit: u32) -> &Matrix {
        &self.matrices[digit as usize]
    }

    /// `uᵗ M_{d_0} ⋯ M_{d_k} v` for digits given least significant first.
    pub fn evaluate_digits(&self, digits_lsb_first: &[u32]) -> Rational {
        let row = digits_lsb_first
            .iter()
            .fold(self.u.clone(), |x, &d| self.matrix(d).left_mul(&x));
        dot(&row, &self.v)
    }

    pub fn evaluate(&self, n: &BigUint) -> Rational {
        self.evaluate_digits(&raw_digits(n, self.base))
    }

    /// The column vector `f(n) = M_{n_0} ⋯ M_{n_L} v`.
    pub fn state_vector(&self, n: &BigUint) -> Vec<Rational> {
        raw_digits(n, self.base)
            .iter()
            .rev()
            .fold(self.v.clone(), |y, &d| self.matrix(d).right_mul(&y))
    }

    pub fn is_zero_insensitive(&self) -> bool {
        self.matrices[0].right_mul(&self.v) == self.v
    }

    /// Replaces `v` by a fixpoint of `v ↦ M_0 v` reached within `d + 1`
    /// iterations. The result agrees with the input on every expansion read
    /// with enough leading zeros.
    pub fn stabilize(&self) -> Result<LinearRepresentation, LinRepError> {
        let limit = self.dim() + 1;
        let mut v = self.v.clone();
        for _ in 0..=limit {
            let next = self.matrices[0].right_mul(&v);
            if next == v {
                return Ok(LinearRepresentation {
                    v,
                    ..self.clone()
                });
            }
            v = next;
        }
        Err(LinRepError::NoFixpoint(limit))
    }

    fn require_zero_insensitive(&self) -> Result<(), LinRepError> {
        if self.is_zero_insensitive() {
            Ok(())
        } else {
            Err(LinRepError::NotZeroInsensitive)
        }
    }

    /// `span{ uᵗ W : W a product of digit matrices }`, breadth-first over
    /// words with digits in increasing order.
    pub fn forward_space(&self) -> SubspaceBasis {
        let mut basis = SubspaceBasis::new(self.dim());
        let mut queue = VecDeque::new();
        if basis.insert(&self.u) {
            queue.push_back(self.u.clone());
        }
        while let Some(x) = queue.pop_front() {
            for m in &self.matrices {
                let y = m.left_mul(&x);
                if basis.insert(&y) {
                    queue.push_back(y);
                }
            }
        }
        basis
    }

    /// `span{ W v }`, the column counterpart of [`forward_space`](Self::forward_space).
    pub fn backward_space(&self) -> SubspaceBasis {
        let mut basis = SubspaceBasis::new(self.dim());
        let mut queue = VecDeque::new();
        if basis.insert(&self.v) {
            queue.push_back(self.v.clone());
        }
        while let Some(y) = queue.pop_front() {
            for m in &self.matrices {
                let z = m.right_mul(&y);
                if basis.insert(&z) {
                    queue.push_back(z);
                }
            }
        }
        basis
    }

    /// The smallest space `U` with every `uᵗ W` in `uᵗ + Uᵗ`. The basis
    /// vectors are differences `uᵗ W - uᵗ` for the first words found.
    pub fn affine_closure_u(&self) -> SubspaceBasis {
        affine_closure(&self.u, |x, m| m.left_mul(x), &self.matrices)
    }

    /// The smallest space `V` with every `W v` in `v + V`.
    pub fn affine_closure_v(&self) -> SubspaceBasis {
        affine_closure(&self.v, |y, m| m.right_mul(y), &self.matrices)
    }

    /// Both reachability spaces are the whole space.
    pub fn is_minimal(&self) -> bool {
        self.forward_space().is_full() && self.backward_space().is_full()
    }

    /// Projects onto the forward space, then onto the backward space of the
    /// result. The output represents the same function with the least
    /// possible dimension and is again zero-insensitive.
    pub fn minimize(&self) -> Result<LinearRepresentation, LinRepError> {
        self.require_zero_insensitive()?;
        let reduced = self.restrict_forward().restrict_backward();
        if !reduced.is_zero_insensitive() {
            return Err(LinRepError::MinimizationLostZeroInsensitivity);
        }
        Ok(reduced)
    }

    fn restrict_forward(&self) -> LinearRepresentation {
        let space = self.forward_space();
        let basis = space.vectors();
        let k = basis.len();
        let matrices = self
            .matrices
            .iter()
            .map(|m| {
                Matrix::from_rows(
                    basis
                        .iter()
                        .map(|b| {
                            space
                                .coordinates(&m.left_mul(b))
                                .expect("forward space is invariant")
                        })
                        .collect(),
                )
                .reshaped(k)
            })
            .collect();
        let u = space.coordinates(&self.u).expect("u spans the forward space");
        let v = basis.iter().map(|b| dot(b, &self.v)).collect();
        LinearRepresentation {
            base: self.base,
            u,
            matrices,
            v,
        }
    }

    fn restrict_backward(&self) -> LinearRepresentation {
        let space = self.backward_space();
        let basis = space.vectors();
        let k = basis.len();
        let matrices = self
            .matrices
            .iter()
            .map(|m| {
                let columns: Vec<Vec<Rational>> = basis
                    .iter()
                    .map(|c| {
                        space
                            .coordinates(&m.right_mul(c))
                            .expect("backward space is invariant")
                    })
                    .collect();
                Matrix::from_rows(columns).reshaped(k).transpose()
            })
            .collect();
        let v = space.coordinates(&self.v).expect("v spans the backward space");
        let u = basis.iter().map(|c| dot(&self.u, c)).collect();
        LinearRepresentation {
            base: self.base,
            u,
            matrices,
            v,
        }
    }

    /// `M_0^r = v uᵗ`, without any precondition on the representation.
    pub fn raw_multiplicative_test(&self, r: u32) -> bool {
        self.matrices[0].pow(r) == Matrix::outer(&self.v, &self.u)
    }

    /// Quasimultiplicativity with parameter `r` for a zero-insensitive minimal
    /// representation. Non-minimal input is rejected since the matrix test is
    /// only an equivalence for minimal representations.
    pub fn is_quasimultiplicative(&self, r: u32) -> Result<bool, LinRepError> {
        self.require_zero_insensitive()?;
        if !self.is_minimal() {
            return Err(LinRepError::NotMinimal {
                dimension: self.dim(),
                minimal: self.minimize()?.dim(),
            });
        }
        Ok(self.raw_multiplicative_test(r))
    }

    pub fn additive_certificate(&self, r: u32) -> Result<AdditiveCertificate, LinRepError> {
        self.require_zero_insensitive()?;
        let u_space = self.affine_closure_u();
        let v_space = self.affine_closure_v();
        Ok(self.additive_certificate_with(r, &self.matrices[0].pow(r), u_space, v_space))
    }

    fn additive_certificate_with(
        &self,
        r: u32,
        m0r: &Matrix,
        u_space: SubspaceBasis,
        v_space: SubspaceBasis,
    ) -> AdditiveCertificate {
        let diff = m0r.sub(&Matrix::identity(self.dim()));
        let col = diff.right_mul(&self.v);
        let row = diff.left_mul(&self.u);
        let u_orthogonal = u_space.vectors().iter().all(|x| dot(x, &col).is_zero());
        let v_orthogonal = v_space.vectors().iter().all(|y| dot(&row, y).is_zero());
        let cross_vanishes = u_space.vectors().iter().all(|x| {
            let xm = m0r.left_mul(x);
            v_space.vectors().iter().all(|y| dot(&xm, y).is_zero())
        });
        AdditiveCertificate {
            r,
            value_at_zero_vanishes: dot(&self.u, &self.v).is_zero(),
            u_orthogonal,
            v_orthogonal,
            cross_vanishes,
            u_space,
            v_space,
        }
    }

    /// Quasiadditivity with parameter `r` for a zero-insensitive
    /// representation (minimality not needed).
    pub fn is_quasiadditive(&self, r: u32) -> Result<bool, LinRepError> {
        Ok(self.additive_certificate(r)?.holds())
    }

    /// Least `r ≤ r_max` for which the corresponding test passes.
    pub fn min_parameter(&self, kind: Kind, r_max: u32) -> Result<Option<u32>, LinRepError> {
        Ok(self.parameter_profile(kind, r_max)?.iter().position(|&ok| ok).map(|r| r as u32))
    }

    /// Outcome of the test for every `r` in `0..=r_max`.
    pub fn parameter_profile(&self, kind: Kind, r_max: u32) -> Result<Vec<bool>, LinRepError> {
        match kind {
            Kind::Multiplicative => {
                // validates the preconditions once
                self.is_quasimultiplicative(0)?;
                let target = Matrix::outer(&self.v, &self.u);
                let mut power = Matrix::identity(self.dim());
                let mut out = Vec::new();
                for _ in 0..=r_max {
                    out.push(power == target);
                    power = &power * &self.matrices[0];
                }
                Ok(out)
            }
            Kind::Additive => {
                self.require_zero_insensitive()?;
                let u_space = self.affine_closure_u();
                let v_space = self.affine_closure_v();
                let mut power = Matrix::identity(self.dim());
                let mut out = Vec::new();
                for r in 0..=r_max {
                    out.push(
                        self.additive_certificate_with(r, &power, u_space.clone(), v_space.clone())
                            .holds(),
                    );
                    power = &power * &self.matrices[0];
                }
                Ok(out)
            }
        }
    }

    pub fn to_file(&self) -> LinRepFile {
        let conv = |xs: &[Rational]| xs.iter().cloned().map(JsonRational).collect();
        LinRepFile {
            q: self.base,
            d: self.dim(),
            u: conv(&self.u),
            v: conv(&self.v),
            matrices: self
                .matrices
                .iter()
                .map(|m| m.to_rows().iter().map(|row| conv(row)).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, LinRepError> {
        let file: LinRepFile =
            serde_json::from_str(s).map_err(|e| LinRepError::Format(e.to_string()))?;
        LinearRepresentation::try_from(file)
    }
}

fn affine_closure(
    start: &[Rational],
    apply: impl Fn(&[Rational], &Matrix) -> Vec<Rational>,
    matrices: &[Matrix],
) -> SubspaceBasis {
    let mut basis = SubspaceBasis::new(start.len());
    let mut queue = VecDeque::from([start.to_vec()]);
    while let Some(point) = queue.pop_front() {
        for m in matrices {
            let image = apply(&point, m);
            if basis.insert(&sub_vec(&image, start)) {
                queue.push_back(image);
            }
        }
    }
    basis
}

impl Matrix {
    /// Empty matrices lose their column count in `from_rows`; restore it.
    fn reshaped(self, k: usize) -> Matrix {
        if k == 0 {
            Matrix::zeros(0, 0)
        } else {
            self
        }
    }
}

/// On-disk form: `q`, `d`, `u`, `v` and `matrices` (q row-major `d × d`
/// arrays); entries are integers or strings `"p/q"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinRepFile {
    pub q: u32,
    pub d: usize,
    pub u: Vec<JsonRational>,
    pub v: Vec<JsonRational>,
    pub matrices: Vec<Vec<Vec<JsonRational>>>,
}

impl TryFrom<LinRepFile> for LinearRepresentation {
    type Error = LinRepError;

    fn try_from(file: LinRepFile) -> Result<Self, LinRepError> {
        let unwrap = |xs: Vec<JsonRational>| xs.into_iter().map(|x| x.0).collect::<Vec<_>>();
        if file.u.len() != file.d {
            return Err(LinRepError::Dimension(format!(
                "d = {} but u has length {}",
                file.d,
                file.u.len()
            )));
        }
        let mut matrices = Vec::with_capacity(file.matrices.len());
        for (i, m) in file.matrices.into_iter().enumerate() {
            if m.len() != file.d || m.iter().any(|row| row.len() != file.d) {
                return Err(LinRepError::Dimension(format!("M_{i} is not {0}x{0}", file.d)));
            }
            let rows = m.into_iter().map(unwrap).collect();
            matrices.push(if file.d == 0 {
                Matrix::zeros(0, 0)
            } else {
                Matrix::from_rows(rows)
            });
        }
        LinearRepresentation::new(file.q, unwrap(file.u), matrices, unwrap(file.v))
    }
}

/// `1` at index `i` of a length `d` vector.
pub fn unit_vector(d: usize, i: usize) -> Vec<Rational> {
    let mut e = vec![Rational::zero(); d];
    e[i] = Rational::one();
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::representations as reps;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn evaluation_of_worked_representations() {
        assert_eq!(reps::optimal_representation_count().evaluate(&b(3)), rat(2));
        assert_eq!(reps::naf_weight().evaluate(&b(27)), rat(3));
        let r = reps::naf_weight();
        assert_eq!(r.evaluate(&b(0)), dot(r.u(), r.v()));
    }

    #[test]
    fn zero_insensitivity() {
        assert!(reps::optimal_representation_count().is_zero_insensitive());
        assert!(reps::naf_weight().is_zero_insensitive());
        let id = LinearRepresentation::from_i64(2, &[1, 2], &[&[&[1, 0], &[0, 1]], &[&[0, 1], &[1, 0]]], &[3, 4]).unwrap();
        assert!(id.is_zero_insensitive());
        let not = LinearRepresentation::from_i64(2, &[1], &[&[&[2]], &[&[1]]], &[1]).unwrap();
        assert!(!not.is_zero_insensitive());
        assert_eq!(not.minimize(), Err(LinRepError::NotZeroInsensitive));
    }

    #[test]
    fn stabilize_reaches_fixpoint_or_fails() {
        // M_0 projects onto the first coordinate
        let rep = LinearRepresentation::from_i64(
            2,
            &[1, 0],
            &[&[&[1, 0], &[0, 0]], &[&[1, 1], &[0, 1]]],
            &[1, 1],
        )
        .unwrap();
        assert!(!rep.is_zero_insensitive());
        let stable = rep.stabilize().unwrap();
        assert!(stable.is_zero_insensitive());
        assert_eq!(stable.v(), &[rat(1), rat(0)]);
        let doubling = LinearRepresentation::from_i64(2, &[1], &[&[&[2]], &[&[1]]], &[1]).unwrap();
        assert_eq!(doubling.stabilize(), Err(LinRepError::NoFixpoint(2)));
    }

    #[test]
    fn minimize_redundant_digit_sum_exponential() {
        let rep = reps::two_pow_digit_sum_redundant();
        assert!(!rep.is_minimal());
        let min = rep.minimize().unwrap();
        assert_eq!(min.dim(), 1);
        assert_eq!(min.matrix(0)[(0, 0)], rat(1));
        assert_eq!(min.matrix(1)[(0, 0)], rat(2));
        assert_eq!(&min.u()[0] * &min.v()[0], rat(1));
        for n in 0..256u64 {
            assert_eq!(min.evaluate(&b(n)), rep.evaluate(&b(n)));
        }
    }

    #[test]
    fn minimize_keeps_minimal_examples() {
        assert_eq!(reps::optimal_representation_count().minimize().unwrap().dim(), 6);
        assert_eq!(reps::naf_weight().minimize().unwrap().dim(), 4);
        assert!(reps::optimal_representation_count().is_minimal());
    }

    #[test]
    fn minimize_drops_unreachable_coordinate() {
        let base = reps::naf_weight();
        let pad = |m: &Matrix| {
            let mut rows = m.to_rows();
            for row in &mut rows {
                row.push(rat(0));
            }
            let mut last = vec![rat(0); 5];
            last[4] = rat(7);
            rows.push(last);
            Matrix::from_rows(rows)
        };
        let mut u = base.u().to_vec();
        u.push(rat(0));
        let mut v = base.v().to_vec();
        v.push(rat(0));
        let padded = LinearRepresentation::new(2, u, base.matrices().iter().map(pad).collect(), v).unwrap();
        assert_eq!(padded.dim(), 5);
        assert!(padded.is_zero_insensitive());
        assert_eq!(padded.minimize().unwrap().dim(), 4);
    }

    #[test]
    fn zero_function_minimizes_to_dimension_zero() {
        let rep = LinearRepresentation::from_i64(2, &[0, 0], &[&[&[1, 0], &[0, 1]], &[&[1, 1], &[0, 1]]], &[1, 0]).unwrap();
        let min = rep.minimize().unwrap();
        assert_eq!(min.dim(), 0);
        assert_eq!(min.evaluate(&b(12345)), rat(0));
        assert!(rep.affine_closure_u().is_empty());
        assert_eq!(rep.is_quasiadditive(0), Ok(true));
    }

    #[test]
    fn multiplicative_test_on_examples() {
        let rep = reps::optimal_representation_count();
        assert_eq!(rep.is_quasimultiplicative(3), Ok(true));
        assert_eq!(rep.is_quasimultiplicative(2), Ok(false));
        assert_eq!(rep.min_parameter(Kind::Multiplicative, 8), Ok(Some(3)));

        let redundant = reps::two_pow_digit_sum_redundant();
        for r in 0..=8 {
            assert!(!redundant.raw_multiplicative_test(r));
            assert_eq!(redundant.matrix(0).pow(r).rank(), 2);
        }
        assert_eq!(
            redundant.is_quasimultiplicative(0),
            Err(LinRepError::NotMinimal { dimension: 2, minimal: 1 })
        );
        let min = redundant.minimize().unwrap();
        assert_eq!(min.is_quasimultiplicative(0), Ok(true));
        assert_eq!(reps::two_pow_digit_sum().min_parameter(Kind::Multiplicative, 8), Ok(Some(0)));
    }

    #[test]
    fn additive_test_on_naf_weight() {
        let rep = reps::naf_weight();
        let cert = rep.additive_certificate(2).unwrap();
        assert!(cert.holds());
        assert_eq!(cert.u_space.len(), 3);
        assert_eq!(cert.v_space.len(), 3);
        assert!(!rep.is_quasiadditive(1).unwrap());
        assert!(!rep.is_quasiadditive(0).unwrap());
        assert_eq!(rep.min_parameter(Kind::Additive, 8), Ok(Some(2)));
    }

    #[test]
    fn closure_contains_named_vectors() {
        let rep = reps::naf_weight();
        let m0 = rep.matrix(0);
        let m1 = rep.matrix(1);
        let u_space = rep.affine_closure_u();
        let v_space = rep.affine_closure_v();
        let u = rep.u();
        let v = rep.v();
        let w1 = sub_vec(&m1.left_mul(u), u);
        let w2 = sub_vec(&m1.left_mul(&m1.left_mul(u)), u);
        let w3 = sub_vec(&m1.left_mul(&m0.left_mul(&m1.left_mul(u))), u);
        let mut w = SubspaceBasis::new(4);
        for x in [&w1, &w2, &w3] {
            assert!(u_space.contains(x));
            assert!(w.insert(x));
        }
        let y1 = sub_vec(&m1.right_mul(v), v);
        let y2 = sub_vec(&m1.right_mul(&m1.right_mul(v)), v);
        let y3 = sub_vec(&m1.right_mul(&m0.right_mul(&m1.right_mul(v))), v);
        let mut y = SubspaceBasis::new(4);
        for x in [&y1, &y2, &y3] {
            assert!(v_space.contains(x));
            assert!(y.insert(x));
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let rep = LinearRepresentation::new(
            3,
            vec![Rational::new(1.into(), 3.into()), rat(-2)],
            vec![
                Matrix::from_i64(&[&[1, 0], &[0, 1]]),
                Matrix::from_rows(vec![
                    vec![Rational::new(5.into(), 7.into()), rat(0)],
                    vec![rat(1), Rational::new((-1).into(), 2.into())],
                ]),
                Matrix::from_i64(&[&[0, 1], &[1, 0]]),
            ],
            vec![rat(0), rat(4)],
        )
        .unwrap();
        let json = rep.to_json();
        assert_eq!(LinearRepresentation::from_json(&json).unwrap(), rep);
        let handwritten = r#"{"q":2,"d":1,"u":[1],"v":["1"],"matrices":[[[1]],[["2/1"]]]}"#;
        assert_eq!(
            LinearRepresentation::from_json(handwritten).unwrap(),
            reps::two_pow_digit_sum()
        );
        let bad = r#"{"q":2,"d":2,"u":[1],"v":[1],"matrices":[[[1]],[[2]]]}"#;
        assert!(matches!(LinearRepresentation::from_json(bad), Err(LinRepError::Dimension(_))));
        let missing = r#"{"q":2,"d":1,"u":[1],"v":[1],"matrices":[[[1]]]}"#;
        assert!(matches!(
            LinearRepresentation::from_json(missing),
            Err(LinRepError::MatrixCount { expected: 2, got: 1 })
        ));
    }
}
