//! Linear representations of the catalog functions.

use crate::linrep::LinearRepresentation;

/// Number of optimal {0, 1, -1}-representations, for the state vector
/// `(u₁(n), u₂(n), u₃(n), u₁(n+1), u₄(n+1), u₅(n+1))`. Minimal and
/// zero-insensitive.
pub fn optimal_representation_count() -> LinearRepresentation {
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

/// Hamming weight of the nonadjacent form, for the state vector
/// `(h(n), h(n+1), h(2n+1), 1)`. Minimal and zero-insensitive.
pub fn naf_weight() -> LinearRepresentation {
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

/// `2^{s₂(n)}` in dimension 1: `M₀ = 1`, `M₁ = 2`, `u = v = 1`.
pub fn two_pow_digit_sum() -> LinearRepresentation {
    LinearRepresentation::from_i64(2, &[1], &[&[&[1]], &[&[2]]], &[1]).unwrap()
}

/// A zero-insensitive but non-minimal two-dimensional representation of
/// `2^{s₂(n)}`; `M₀^r` has rank 2 for every `r`.
pub fn two_pow_digit_sum_redundant() -> LinearRepresentation {
    LinearRepresentation::from_i64(
        2,
        &[1, 0],
        &[&[&[1, 13], &[0, 2]], &[&[2, 27], &[0, 5]]],
        &[1, 0],
    )
    .unwrap()
}
