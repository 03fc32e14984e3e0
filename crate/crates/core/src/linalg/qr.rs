use alloc::vec::Vec;

use super::Matrix;
use crate::math::sqrt;

/// Householder QR of a square matrix: returns `(q, diag(r))`.
///
/// Rank-deficient input is fine; the corresponding diagonal entries of `r`
/// come out as zero while `q` stays orthogonal.
pub fn qr_square(m: &Matrix) -> (Matrix, Vec<f64>) {
    let n = m.rows();
    debug_assert!(m.is_square());
    let mut r = m.clone();
    let mut q = Matrix::identity(n);
    let mut v = alloc::vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let norm = sqrt((k..n).map(|i| r[(i, k)] * r[(i, k)]).sum());
        if norm == 0.0 {
            continue;
        }
        let alpha = if r[(k, k)] >= 0.0 { -norm } else { norm };
        for i in k..n {
            v[i] = r[(i, k)];
        }
        v[k] -= alpha;
        let vnorm2: f64 = (k..n).map(|i| v[i] * v[i]).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        for j in k..n {
            let s: f64 = (k..n).map(|i| v[i] * r[(i, j)]).sum();
            for i in k..n {
                r[(i, j)] -= beta * s * v[i];
            }
        }
        // q <- q * H
        for i in 0..n {
            let s: f64 = (k..n).map(|t| q[(i, t)] * v[t]).sum();
            for t in k..n {
                q[(i, t)] -= beta * s * v[t];
            }
        }
    }
    let diag = (0..n).map(|i| r[(i, i)]).collect();
    (q, diag)
}
