//! Independent oracles and hand-transcribed inputs shared by the integration
//! tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use qquasi::linrep::{dot, Matrix};
use qquasi::{BigRational, LinearRepresentation, Transducer};

/// `(minimum weight, number of representations of that weight)` for every
/// `n < limit` over all `{0, 1, -1}` digit strings with at most `len` digits.
pub fn signed_representation_oracle(limit: i64, len: u32) -> BTreeMap<i64, (u32, u64)> {
    let mut best: BTreeMap<i64, (u32, u64)> = BTreeMap::new();
    let total = 3u64.pow(len);
    for code in 0..total {
        let (mut c, mut value, mut weight, mut place) = (code, 0i64, 0u32, 1i64);
        for _ in 0..len {
            let d = (c % 3) as i64 - 1;
            c /= 3;
            value += d * place;
            weight += (d != 0) as u32;
            place *= 2;
        }
        if !(0..limit).contains(&value) {
            continue;
        }
        let entry = best.entry(value).or_insert((u32::MAX, 0));
        if weight < entry.0 {
            *entry = (weight, 1);
        } else if weight == entry.0 {
            entry.1 += 1;
        }
    }
    best
}

/// The six-dimensional representation of the optimal representation count.
pub fn optimal_count_rep() -> LinearRepresentation {
    LinearRepresentation::from_i64(
        2,
        &[1, 0, 0, 0, 0, 0],
        &[
            &[
                &[1, 0, 0, 0, 0, 0],
                &[1, 0, 0, 0, 0, 0],
                &[0, 1, 0, 0, 0, 0],
                &[0, 1, 0, 0, 1, 0],
                &[0, 0, 0, 0, 0, 1],
                &[0, 0, 0, 0, 0, 0],
            ],
            &[
                &[0, 1, 0, 0, 1, 0],
                &[0, 0, 1, 0, 0, 0],
                &[0, 0, 0, 0, 0, 0],
                &[0, 0, 0, 1, 0, 0],
                &[0, 0, 0, 1, 0, 0],
                &[0, 0, 0, 0, 1, 0],
            ],
        ],
        &[1, 1, 1, 1, 0, 0],
    )
    .unwrap()
}

/// A two-dimensional, zero-insensitive, non-minimal representation of
/// `2^{s₂(n)}`.
pub fn redundant_two_pow_rep() -> LinearRepresentation {
    LinearRepresentation::from_i64(2, &[1, 0], &[&[&[1, 13], &[0, 2]], &[&[2, 27], &[0, 5]]], &[1, 0]).unwrap()
}

/// The four-dimensional representation of the NAF weight.
pub fn naf_rep() -> LinearRepresentation {
    LinearRepresentation::from_i64(
        2,
        &[1, 0, 0, 0],
        &[
            &[&[1, 0, 0, 0], &[0, 0, 1, 0], &[1, 0, 0, 1], &[0, 0, 0, 1]],
            &[&[0, 0, 1, 0], &[0, 1, 0, 0], &[0, 1, 0, 1], &[0, 0, 0, 1]],
        ],
        &[0, 1, 1, 1],
    )
    .unwrap()
}

/// The three-state NAF weight transducer, written out as a transition table.
pub const NAF_TRANSDUCER_JSON: &str = r#"{
  "q": 2,
  "states": 3,
  "initial": 0,
  "transitions": [
    [{"next": 0, "output": 0}, {"next": 1, "output": 1}],
    [{"next": 0, "output": 0}, {"next": 2, "output": 0}],
    [{"next": 1, "output": 1}, {"next": 2, "output": 0}]
  ],
  "final_outputs": [0, 0, 1]
}"#;

pub fn naf_transducer() -> Transducer {
    Transducer::from_json(NAF_TRANSDUCER_JSON).unwrap()
}

fn matrix_sum(ms: &[Matrix]) -> Matrix {
    let d = ms[0].rows();
    let rows = (0..d)
        .map(|i| (0..d).map(|j| ms.iter().map(|m| m.row(i)[j].clone()).sum()).collect())
        .collect();
    Matrix::from_rows(rows)
}

/// Exact `(E f(N_k), Var f(N_k))` for `N_k` uniform on `[0, q^k)`, from
/// `Σ_{n<q^k} f(n) = uᵗ (Σ M_i)^k v` and the same identity for the Kronecker
/// square representation of `f²`. Needs a zero-insensitive representation.
pub fn finite_moments(rep: &LinearRepresentation, k: u32) -> (BigRational, BigRational) {
    let ms = rep.matrices();
    let sum = matrix_sum(ms);
    let squares: Vec<Matrix> = ms.iter().map(|m| m.kron(m)).collect();
    let sum2 = matrix_sum(&squares);
    let kron_vec = |x: &[BigRational]| -> Vec<BigRational> {
        x.iter().flat_map(|a| x.iter().map(move |b| a * b)).collect()
    };
    let s1 = dot(rep.u(), &sum.pow(k).right_mul(rep.v()));
    let s2 = dot(&kron_vec(rep.u()), &sum2.pow(k).right_mul(&kron_vec(rep.v())));
    let count = BigRational::from_integer(qquasi::BigInt::from(rep.base()).pow(k));
    let mean = s1 / &count;
    let var = s2 / count - &mean * &mean;
    (mean, var)
}
