#![allow(dead_code)]

use aluthge_core::generators::{random_gaussian_matrix, random_rank_deficient, seeded_rng};
use aluthge_core::linalg::op_norm;
use aluthge_core::{ComplexMatrix, C64};
use proptest::prelude::*;

pub fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    op_norm(&(a - b))
}

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Complex Gaussian matrix of dimension in `dims`, drawn from a seed.
pub fn gaussian(dims: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = ComplexMatrix> {
    (dims, any::<u64>())
        .prop_map(|(n, seed)| random_gaussian_matrix(n, &mut seeded_rng(seed)).unwrap())
}

/// `(T, rank)` with `rank < dim` strictly.
pub fn rank_deficient(
    dims: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (ComplexMatrix, usize)> {
    (dims, any::<u64>(), 0.0f64..1.0).prop_map(|(n, seed, frac)| {
        let rank = ((n as f64 * frac) as usize).min(n - 1);
        (
            random_rank_deficient(n, rank, &mut seeded_rng(seed)).unwrap(),
            rank,
        )
    })
}

/// Full-rank and rank-deficient matrices in equal measure.
pub fn mixed(dims: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = ComplexMatrix> {
    prop_oneof![
        gaussian(dims.clone()),
        rank_deficient(dims).prop_map(|(t, _)| t)
    ]
}

pub fn gaussian_at(dim: usize, seed: u64) -> ComplexMatrix {
    random_gaussian_matrix(dim, &mut seeded_rng(seed)).unwrap()
}
