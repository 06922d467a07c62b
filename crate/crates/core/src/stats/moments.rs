//! Exact `B_t`, `B_tt`, `B_tx` for additive functions with a finite-state
//! evaluator.

use num_traits::{One, Zero};
use serde::Serialize;

use super::bset::BSet;
use super::{constants_from_derivatives, effective_parameter, ConstantsResult, ErrorKind, Method, StatsError};
use crate::catalog::{ArithmeticFunction, Kind};
use crate::linrep::{dot, Matrix};
use crate::value::serialize_display;
use crate::{LinearRepresentation, Rational, Transducer, Value};

/// Count, `Σ f` and `Σ f²` over the members of `𝓑` of one length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LengthSums {
    pub len: usize,
    #[serde(serialize_with = "serialize_display")]
    pub count: Rational,
    #[serde(serialize_with = "serialize_display")]
    pub sum: Rational,
    #[serde(serialize_with = "serialize_display")]
    pub sum_sq: Rational,
}

/// A linear system `z_{ℓ+1} = z_ℓ A` whose state, after reading `ℓ` digits,
/// carries the count, `Σ f` and `Σ f²` of every digit word of length `ℓ`,
/// grouped by the state of the `𝓑` automaton and of `f`'s evaluator. The
/// projections `p0`, `p1`, `p2` pick out the sums over accepted words, so
/// `Σ_ℓ x^ℓ z_0 A^ℓ p = z_0 (I - xA)^{-1} p`.
#[derive(Debug, Clone)]
pub struct MomentSystem {
    q: u32,
    r: u32,
    transfer: Matrix,
    start: Vec<Rational>,
    projections: [Vec<Rational>; 3],
}

impl MomentSystem {
    /// Accumulators `(count, S₁, S₂)` per (automaton state, transducer
    /// state); a transition with output `δ` maps them to
    /// `(count, S₁ + δ·count, S₂ + 2δS₁ + δ²·count)`. The final output `F`
    /// enters at acceptance: `Σf = S₁ + F·count`, `Σf² = S₂ + 2F·S₁ + F²·count`.
    pub fn from_transducer(t: &Transducer, r: u32) -> Result<Self, StatsError> {
        let bset = BSet::new(t.base(), r)?;
        let m = t.states();
        let idx = |c: usize, s: usize, k: usize| (c * m + s) * 3 + k;
        let dim = bset.states() * m * 3;
        let mut a = Matrix::zeros(dim, dim);
        for c in 0..bset.states() {
            for d in 0..t.base() {
                let Some(c2) = bset.step(c, d) else { continue };
                for s in 0..m {
                    let tr = t.transition(s, d);
                    let (s2, delta) = (tr.next, &tr.output);
                    let delta2 = delta * delta;
                    a[(idx(c, s, 0), idx(c2, s2, 0))] += Rational::one();
                    a[(idx(c, s, 0), idx(c2, s2, 1))] += delta;
                    a[(idx(c, s, 0), idx(c2, s2, 2))] += &delta2;
                    a[(idx(c, s, 1), idx(c2, s2, 1))] += Rational::one();
                    a[(idx(c, s, 1), idx(c2, s2, 2))] += delta * Rational::from_integer(2.into());
                    a[(idx(c, s, 2), idx(c2, s2, 2))] += Rational::one();
                }
            }
        }
        let mut start = vec![Rational::zero(); dim];
        start[idx(bset.start(), t.initial(), 0)] = Rational::one();
        let mut p = [vec![Rational::zero(); dim], vec![Rational::zero(); dim], vec![Rational::zero(); dim]];
        for s in 0..m {
            let fin = &t.final_outputs()[s];
            p[0][idx(0, s, 0)] = Rational::one();
            p[1][idx(0, s, 1)] = Rational::one();
            p[1][idx(0, s, 0)] = fin.clone();
            p[2][idx(0, s, 2)] = Rational::one();
            p[2][idx(0, s, 1)] = fin * Rational::from_integer(2.into());
            p[2][idx(0, s, 0)] = fin * fin;
        }
        Ok(MomentSystem { q: t.base(), r, transfer: a, start, projections: p })
    }

    /// Blocks `(count, W, Y)` per automaton state with `W` a row vector of
    /// dimension `d` and `Y` one of dimension `d²`; digit `ε` maps them to
    /// `(count, W M_ε, Y (M_ε ⊗ M_ε))`. At acceptance `Σf = W·v` and
    /// `Σf² = Y·(v ⊗ v)`. The representation is minimized first.
    pub fn from_linear_representation(rep: &LinearRepresentation, r: u32) -> Result<Self, StatsError> {
        let rep = rep.minimize()?;
        let bset = BSet::new(rep.base(), r)?;
        let d = rep.dim();
        let block = 1 + d + d * d;
        let dim = bset.states() * block;
        let w0 = |c: usize| c * block + 1;
        let y0 = |c: usize| c * block + 1 + d;
        let mut a = Matrix::zeros(dim, dim);
        for c in 0..bset.states() {
            for eps in 0..rep.base() {
                let Some(c2) = bset.step(c, eps) else { continue };
                let mat = rep.matrix(eps);
                let kron = mat.kron(mat);
                a[(c * block, c2 * block)] += Rational::one();
                for i in 0..d {
                    for j in 0..d {
                        a[(w0(c) + i, w0(c2) + j)] += &mat[(i, j)];
                    }
                }
                for i in 0..d * d {
                    for j in 0..d * d {
                        if !kron[(i, j)].is_zero() {
                            a[(y0(c) + i, y0(c2) + j)] += &kron[(i, j)];
                        }
                    }
                }
            }
        }
        let mut start = vec![Rational::zero(); dim];
        let s = bset.start();
        start[s * block] = Rational::one();
        for (i, ui) in rep.u().iter().enumerate() {
            start[w0(s) + i] = ui.clone();
            for (k, uk) in rep.u().iter().enumerate() {
                start[y0(s) + i * d + k] = ui * uk;
            }
        }
        let mut p = [vec![Rational::zero(); dim], vec![Rational::zero(); dim], vec![Rational::zero(); dim]];
        p[0][0] = Rational::one();
        for (i, vi) in rep.v().iter().enumerate() {
            p[1][w0(0) + i] = vi.clone();
            for (k, vk) in rep.v().iter().enumerate() {
                p[2][y0(0) + i * d + k] = vi * vk;
            }
        }
        Ok(MomentSystem { q: rep.base(), r, transfer: a, start, projections: p })
    }

    /// From the transducer if `f` has one, else from its linear
    /// representation.
    pub fn for_function(f: &ArithmeticFunction, r: u32) -> Result<Self, StatsError> {
        if let Some(t) = f.transducer() {
            Self::from_transducer(t, r)
        } else if let Some(rep) = f.linear_representation() {
            Self::from_linear_representation(rep, r)
        } else {
            Err(StatsError::NoFiniteStateEvaluator(f.name().to_string()))
        }
    }

    pub fn dim(&self) -> usize {
        self.start.len()
    }

    pub fn base(&self) -> u32 {
        self.q
    }

    pub fn parameter(&self) -> u32 {
        self.r
    }

    pub fn transfer_matrix(&self) -> &Matrix {
        &self.transfer
    }

    /// Sums over the members of each length `1..=max_len`.
    pub fn length_sums(&self, max_len: usize) -> Vec<LengthSums> {
        let mut z = self.start.clone();
        (1..=max_len)
            .map(|len| {
                z = self.transfer.left_mul(&z);
                LengthSums {
                    len,
                    count: dot(&z, &self.projections[0]),
                    sum: dot(&z, &self.projections[1]),
                    sum_sq: dot(&z, &self.projections[2]),
                }
            })
            .collect()
    }

    /// `(B_t, B_tt, B_tx)` at `(x, 0)`: `z_0·y₁`, `z_0·y₂` and `w·A·y₁` with
    /// `(I - xA) y_i = p_i` and `w (I - xA) = z_0`.
    pub fn derivatives_at(&self, x: &Rational) -> Result<[Rational; 3], StatsError> {
        let n = self.dim();
        let system = Matrix::identity(n).sub(&self.transfer.scaled(x));
        let ys = system
            .solve(&[self.projections[1].clone(), self.projections[2].clone()])
            .ok_or(StatsError::SpectralObstruction)?;
        let w = system
            .transpose()
            .solve(std::slice::from_ref(&self.start))
            .ok_or(StatsError::SpectralObstruction)?
            .pop()
            .unwrap();
        let bt = dot(&self.start, &ys[0]);
        let btt = dot(&self.start, &ys[1]);
        let btx = dot(&w, &self.transfer.right_mul(&ys[0]));
        Ok([bt, btt, btx])
    }
}

/// Exact constants of an additive function from its transducer or linear
/// representation, at parameter `r` (default: the declared one; `r = 0` is
/// replaced by 1).
pub fn exact_constants_additive(f: &ArithmeticFunction, r: Option<u32>) -> Result<ConstantsResult, StatsError> {
    if f.kind() != Kind::Additive {
        return Err(StatsError::NotAdditive(f.name().to_string()));
    }
    let r = effective_parameter(r.unwrap_or(f.parameter()));
    let system = MomentSystem::for_function(f, r)?;
    let x = Rational::new(1.into(), f.base().into());
    let [bt, btt, btx] = system.derivatives_at(&x)?;
    let (mu, sigma2) = constants_from_derivatives(f.base(), r, &bt, &btt, &btx);
    Ok(ConstantsResult {
        function: f.name().to_string(),
        method: Method::ExactRational,
        q: f.base(),
        r,
        mu: Value::Exact(mu),
        sigma2: Value::Exact(sigma2),
        error_kind: ErrorKind::Exact,
        mu_error: 0.0,
        sigma2_error: 0.0,
        derivatives: Some([Value::Exact(bt), Value::Exact(btt), Value::Exact(btx)]),
        partial_sums: None,
        truncation: None,
        samples: None,
        digits: None,
        seed: None,
        flagged: false,
    })
}
