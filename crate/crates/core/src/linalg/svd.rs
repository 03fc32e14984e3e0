//! One-sided Jacobi (Hestenes) singular value decomposition.
//!
//! Jacobi rotations orthogonalize columns directly and deliver singular
//! values to high relative accuracy, which is what the norm and
//! finite-rank-distance computations need.

use alloc::vec::Vec;

use super::Matrix;
use crate::error::Result;
use crate::math::sqrt;

const MAX_SWEEPS: usize = 80;

/// Singular values sorted nonincreasing; length is `min(rows, cols)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `sigma_{k+1}` (zero-based `values[k]`), or 0 past the end.
    pub fn tail(&self, k: usize) -> f64 {
        self.values.get(k).copied().unwrap_or(0.0)
    }
}

/// Thin SVD `m = u * diag(s) * v^T` with `k = min(rows, cols)` columns.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

pub fn svd(m: &Matrix) -> Result<Svd> {
    m.require_finite()?;
    if m.rows() < m.cols() {
        let t = svd_tall(&m.transpose());
        return Ok(Svd { u: t.v, s: t.s, v: t.u });
    }
    Ok(svd_tall(m))
}

pub fn singular_values(m: &Matrix) -> Result<SingularSpectrum> {
    Ok(SingularSpectrum { values: svd(m)?.s })
}

/// Largest singular value.
pub fn operator_norm(m: &Matrix) -> Result<f64> {
    if m.rows() == 1 || m.cols() == 1 {
        m.require_finite()?;
        return Ok(m.frobenius_norm());
    }
    Ok(singular_values(m)?.largest())
}

/// Distance in operator norm from `m` to the matrices of rank at most `k`.
pub fn distance_to_rank(m: &Matrix, k: usize) -> Result<f64> {
    if k >= m.rows().min(m.cols()) {
        m.require_finite()?;
        return Ok(0.0);
    }
    Ok(singular_values(m)?.tail(k))
}

fn svd_tall(m: &Matrix) -> Svd {
    let rows = m.rows();
    let n = m.cols();
    // work column-major for cheap column access
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = alloc::vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&cols[p], &cols[q]);
                    let mut a = 0.0;
                    let mut b = 0.0;
                    let mut g = 0.0;
                    for i in 0..rows {
                        a += cp[i] * cp[i];
                        b += cq[i] * cq[i];
                        g += cp[i] * cq[i];
                    }
                    (a, b, g)
                };
                if gamma == 0.0 || alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                if gamma.abs() <= f64::EPSILON * sqrt(alpha) * sqrt(beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (zeta.abs() + sqrt(1.0 + zeta * zeta));
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(f64, usize)> =
        cols.iter().enumerate().map(|(j, c)| (sqrt(c.iter().map(|x| x * x).sum()), j)).collect();
    order.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(core::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));

    let mut u = Matrix::zeros(rows, n);
    let mut vm = Matrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &(sigma, j)) in order.iter().enumerate() {
        s.push(sigma);
        for i in 0..rows {
            u[(i, k)] = if sigma > 0.0 { cols[j][i] / sigma } else { 0.0 };
        }
        for i in 0..n {
            vm[(i, k)] = v[j][i];
        }
    }
    Svd { u, s, v: vm }
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *x;
        let b = *y;
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}
