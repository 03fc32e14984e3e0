//! Eigenvalues of dense real matrices.
//!
//! Pipeline: permutation isolation of eigenvalues that already sit on the
//! diagonal of a permuted triangular matrix, diagonal scaling of the rest,
//! orthogonal reduction to upper Hessenberg form, and the Francis
//! double-shift QR iteration. Isolation matters for this crate: truncated
//! shift operators are nilpotent and permuted-triangular, and isolating them
//! returns exact zeros instead of the `eps^(1/n)` noise a plain QR sweep
//! would produce.

use alloc::vec;
use alloc::vec::Vec;

use super::{Complex, Matrix};
use crate::error::{Error, Result};
use crate::math::sqrt;

const MAX_ITERATIONS: usize = 60;

/// All eigenvalues of a square matrix, in no particular order.
pub fn eigenvalues(m: &Matrix) -> Result<Vec<Complex>> {
    m.require_square()?;
    m.require_finite()?;
    let n = m.rows();
    if n == 1 {
        return Ok(vec![Complex::real(m[(0, 0)])]);
    }
    let mut a = m.clone();
    let (lo, hi) = isolate(&mut a);

    let mut out = Vec::with_capacity(n);
    for i in (0..lo).chain(hi + 1..n) {
        out.push(Complex::real(a[(i, i)]));
    }
    if hi >= lo {
        let size = hi - lo + 1;
        let mut block = Matrix::zeros(size, size);
        for i in 0..size {
            for j in 0..size {
                block[(i, j)] = a[(lo + i, lo + j)];
            }
        }
        if size == 1 {
            out.push(Complex::real(block[(0, 0)]));
        } else {
            scale_balance(&mut block);
            hessenberg(&mut block);
            out.extend(hqr(&mut block)?);
        }
    }
    Ok(out)
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(m: &Matrix) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().fold(0.0, |r, z| r.max(z.norm())))
}

fn swap_index(a: &mut Matrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    let n = a.rows();
    for k in 0..n {
        let t = a[(i, k)];
        a[(i, k)] = a[(j, k)];
        a[(j, k)] = t;
    }
    for k in 0..n {
        let t = a[(k, i)];
        a[(k, i)] = a[(k, j)];
        a[(k, j)] = t;
    }
}

/// Permutes `a` so that rows/columns outside `lo..=hi` are triangular and
/// their diagonal entries are eigenvalues. Returns `(lo, hi)`; `hi < lo`
/// means everything was isolated.
fn isolate(a: &mut Matrix) -> (usize, usize) {
    let n = a.rows();
    let mut lo = 0usize;
    let mut hi = n as isize - 1;

    // rows with no off-diagonal entries in the active columns go to the bottom
    'rows: while hi >= 0 {
        let h = hi as usize;
        for j in (0..=h).rev() {
            if (0..=h).all(|i| i == j || a[(j, i)] == 0.0) {
                swap_index(a, j, h);
                hi -= 1;
                continue 'rows;
            }
        }
        break;
    }
    if hi < 0 {
        return (1, 0);
    }
    let h = hi as usize;

    // columns with no off-diagonal entries in the active rows go to the top
    'cols: while lo <= h {
        for j in lo..=h {
            if (lo..=h).all(|i| i == j || a[(i, j)] == 0.0) {
                swap_index(a, j, lo);
                lo += 1;
                continue 'cols;
            }
        }
        break;
    }
    if lo > h {
        return (1, 0);
    }
    (lo, h)
}

/// Diagonal similarity by powers of two so row and column norms match.
fn scale_balance(a: &mut Matrix) {
    const RADIX: f64 = 2.0;
    const SQRDX: f64 = RADIX * RADIX;
    let n = a.rows();
    for _ in 0..100 {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= SQRDX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= SQRDX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let ginv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= ginv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Householder reduction to upper Hessenberg form, in place.
fn hessenberg(a: &mut Matrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let norm = sqrt((k + 1..n).map(|i| a[(i, k)] * a[(i, k)]).sum());
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        for (t, i) in (k + 1..n).enumerate() {
            v[t] = a[(i, k)];
        }
        v[0] -= alpha;
        let vnorm2: f64 = v[..len].iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        for j in 0..n {
            let s: f64 = (0..len).map(|t| v[t] * a[(k + 1 + t, j)]).sum();
            let f = beta * s;
            for t in 0..len {
                a[(k + 1 + t, j)] -= f * v[t];
            }
        }
        for i in 0..n {
            let s: f64 = (0..len).map(|t| a[(i, k + 1 + t)] * v[t]).sum();
            let f = beta * s;
            for t in 0..len {
                a[(i, k + 1 + t)] -= f * v[t];
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (destroyed).
fn hqr(h: &mut Matrix) -> Result<Vec<Complex>> {
    let n = h.rows();
    let mut eig = vec![Complex::default(); n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += h[(i, j)].abs();
        }
    }
    if anorm == 0.0 {
        return Ok(eig);
    }
    let eps = f64::EPSILON;
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let (mut p, mut q, mut r): (f64, f64, f64);
    let mut total_its = 0usize;
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            let mut l = nn;
            while l >= 1 {
                let lu = l as usize;
                let mut s = h[(lu - 1, lu - 1)].abs() + h[(lu, lu)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if h[(lu, lu - 1)].abs() <= eps * s {
                    h[(lu, lu - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let nu = nn as usize;
            let mut x = h[(nu, nu)];
            if l == nn {
                eig[nu] = Complex::real(x + t);
                nn -= 1;
                break;
            }
            let mut y = h[(nu - 1, nu - 1)];
            let mut w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            if l == nn - 1 {
                p = 0.5 * (y - x);
                q = p * p + w;
                let mut z = sqrt(q.abs());
                x += t;
                if q >= 0.0 {
                    z = p + z.copysign(p);
                    let e1 = x + z;
                    let e2 = if z != 0.0 { x - w / z } else { e1 };
                    eig[nu - 1] = Complex::real(e1);
                    eig[nu] = Complex::real(e2);
                } else {
                    eig[nu - 1] = Complex { re: x + p, im: -z };
                    eig[nu] = Complex { re: x + p, im: z };
                }
                nn -= 2;
                break;
            }
            if its == MAX_ITERATIONS {
                return Err(Error::NoConvergence { iterations: total_its });
            }
            if its > 0 && its.is_multiple_of(10) {
                // exceptional shift
                t += x;
                for i in 0..=nu {
                    h[(i, i)] -= x;
                }
                let s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total_its += 1;

            let lu = l as usize;
            let mut m = nu - 2;
            let mut z;
            loop {
                z = h[(m, m)];
                r = x - z;
                let s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == lu {
                    break;
                }
                let u = h[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                h[(i, i - 2)] = 0.0;
                if i != m + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }
            let mut k = m;
            while k < nu {
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if k != nu - 1 { h[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sqrt(p * p + q * q + r * r).copysign(p);
                if s != 0.0 {
                    if k == m {
                        if lu != m {
                            h[(k, k - 1)] = -h[(k, k - 1)];
                        }
                    } else {
                        h[(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        p = h[(k, j)] + q * h[(k + 1, j)];
                        if k != nu - 1 {
                            p += r * h[(k + 2, j)];
                            h[(k + 2, j)] -= p * z;
                        }
                        h[(k + 1, j)] -= p * y;
                        h[(k, j)] -= p * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in lu..=mmin {
                        p = x * h[(i, k)] + y * h[(i, k + 1)];
                        if k != nu - 1 {
                            p += z * h[(i, k + 2)];
                            h[(i, k + 2)] -= p * r;
                        }
                        h[(i, k + 1)] -= p * q;
                        h[(i, k)] -= p;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::sqrt;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn worked_examples() {
        assert_eq!(spectral_radius(&m(&[&[0.0, 1.0], &[0.0, 0.0]])).unwrap(), 0.0);
        assert_eq!(spectral_radius(&Matrix::identity(3)).unwrap(), 1.0);
        let golden_sq = (3.0 + sqrt(5.0)) / 2.0;
        let r = spectral_radius(&m(&[&[2.0, 1.0], &[1.0, 1.0]])).unwrap();
        assert!((r - golden_sq).abs() <= 1e-10 * golden_sq, "{r}");
    }

    #[test]
    fn errors() {
        assert!(matches!(spectral_radius(&Matrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn complex_pair_from_rotation() {
        let rot = m(&[&[0.0, -2.0], &[2.0, 0.0]]);
        let eig = eigenvalues(&rot).unwrap();
        assert_eq!(eig.len(), 2);
        for z in eig {
            assert!(z.re.abs() < 1e-14 && (z.im.abs() - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn companion_matrix_roots() {
        // x^4 - 10x^3 + 35x^2 - 50x + 24 = (x-1)(x-2)(x-3)(x-4)
        let c = m(&[&[10.0, -35.0, 50.0, -24.0], &[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0]]);
        let mut re: Vec<f64> = eigenvalues(&c).unwrap().iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (k, v) in re.iter().enumerate() {
            assert!((v - (k as f64 + 1.0)).abs() < 1e-10, "{re:?}");
        }
    }

    #[test]
    fn nilpotent_shift_truncation_is_exactly_zero() {
        let n = 40;
        let mut s = Matrix::zeros(n, n);
        for i in 0..n - 1 {
            s[(i + 1, i)] = 0.5;
        }
        assert_eq!(spectral_radius(&s).unwrap(), 0.0);
    }

    #[test]
    fn block_triangular_with_isolated_parts() {
        let a = m(&[&[3.0, 0.0, 0.0, 0.0], &[1.0, 1.0, 2.0, 0.0], &[4.0, -2.0, 1.0, 0.0], &[1.0, 1.0, 1.0, 0.5]]);
        let eig = eigenvalues(&a).unwrap();
        let rho = eig.iter().fold(0.0f64, |r, z| r.max(z.norm()));
        assert!((rho - 3.0).abs() < 1e-12);
        // the middle block has eigenvalues 1 +- 2i
        assert!(eig.iter().any(|z| (z.re - 1.0).abs() < 1e-12 && (z.im - 2.0).abs() < 1e-12));
    }
}
