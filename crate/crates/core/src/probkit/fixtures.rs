//! Small reference distributions used throughout tests and the CLI.

use super::JointDistribution;
use crate::scalar::Exact;

fn uniform<P: Exact>(variables: &[&str], rows: &[&[&str]]) -> JointDistribution<P> {
    let p = P::from_ratio(1, rows.len() as u64);
    JointDistribution::new(
        variables.iter().map(|s| s.to_string()).collect(),
        rows.iter()
            .map(|r| (r.iter().map(|s| s.to_string()).collect(), p.clone())),
    )
    .expect("fixture is a valid distribution")
}

/// `X, Y` independent uniform bits and `A = X xor Y`, over `(A, X, Y)`.
pub fn xor_triple<P: Exact>() -> JointDistribution<P> {
    uniform(
        &["A", "X", "Y"],
        &[
            &["0", "0", "0"],
            &["1", "0", "1"],
            &["1", "1", "0"],
            &["0", "1", "1"],
        ],
    )
}

/// `A = X = Y` a uniform bit, over `(A, X, Y)`.
pub fn copy_bit<P: Exact>() -> JointDistribution<P> {
    uniform(&["A", "X", "Y"], &[&["0", "0", "0"], &["1", "1", "1"]])
}

/// `A = B = X = Y` a uniform bit, over `(A, B, X, Y)`.
pub fn copy_bit_with_b<P: Exact>() -> JointDistribution<P> {
    uniform(
        &["A", "B", "X", "Y"],
        &[&["0", "0", "0", "0"], &["1", "1", "1", "1"]],
    )
}

/// `A = X` a uniform bit, `Y` an independent uniform bit, over `(A, X, Y)`.
pub fn copy_x_independent_y<P: Exact>() -> JointDistribution<P> {
    uniform(
        &["A", "X", "Y"],
        &[
            &["0", "0", "0"],
            &["0", "0", "1"],
            &["1", "1", "0"],
            &["1", "1", "1"],
        ],
    )
}

/// `X, Y` independent uniform bits.
pub fn independent_bits<P: Exact>() -> JointDistribution<P> {
    uniform(
        &["X", "Y"],
        &[&["0", "0"], &["0", "1"], &["1", "0"], &["1", "1"]],
    )
}

/// Four independent uniform bits `A, B, X, Y`.
pub fn four_independent_bits<P: Exact>() -> JointDistribution<P> {
    let rows: Vec<Vec<String>> = (0..16u32)
        .map(|i| (0..4).map(|b| ((i >> (3 - b)) & 1).to_string()).collect())
        .collect();
    let p = P::from_ratio(1, 16);
    JointDistribution::new(
        ["A", "B", "X", "Y"].iter().map(|s| s.to_string()).collect(),
        rows.into_iter().map(|r| (r, p.clone())),
    )
    .expect("fixture is a valid distribution")
}
