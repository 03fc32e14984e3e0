#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use srl_core::jsr::MatrixSet;
use srl_core::opshift::ShiftFinRankOperator;
use srl_core::Matrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn mat(rows: &[&[f64]]) -> Matrix {
    Matrix::from_rows(rows).unwrap()
}

pub fn random_matrix(r: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> Matrix {
    let data = (0..d * d).map(|_| r.random_range(lo..hi)).collect();
    Matrix::new(d, d, data).unwrap()
}

pub fn golden() -> MatrixSet {
    MatrixSet::new(vec![mat(&[&[1.0, 1.0], &[0.0, 1.0]]), mat(&[&[1.0, 0.0], &[1.0, 1.0]])], "golden").unwrap()
}

pub fn phi() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// Random class member; `shift` fixes the shift power when given.
pub fn random_operator(r: &mut ChaCha8Rng, shift: Option<usize>) -> ShiftFinRankOperator {
    let entries: Vec<(usize, usize, f64)> = (0..r.random_range(0..5))
        .map(|_| (r.random_range(0..6), r.random_range(0..6), r.random_range(-2.0..2.0)))
        .collect();
    let prefix: Vec<f64> = (0..r.random_range(0..5)).map(|_| r.random_range(-2.0..2.0)).collect();
    let tail = if r.random_bool(0.2) { 0.0 } else { r.random_range(0.0..1.5) };
    let m = shift.unwrap_or_else(|| r.random_range(0..4));
    ShiftFinRankOperator::new(&entries, prefix, tail, m).unwrap()
}

/// `2^-1, ..., 2^-len`.
pub fn halving(len: usize) -> Vec<f64> {
    (1..=len).map(|i| 0.5f64.powi(i as i32)).collect()
}

/// Relative closeness with an absolute floor.
pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= 1e-12 + rel * a.abs().max(b.abs())
}
