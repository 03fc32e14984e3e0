//! Lyapunov exponents and the spectral-radius track along one orbit.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::error::Result;
use crate::linalg::{qr_square, Matrix};
use crate::math::ln0;

use super::spec::{CocyclePath, ScaledMatrix, RENORM_PERIOD};

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovEstimate {
    pub n_steps: usize,
    /// `(1/n) log ||A(x, n)||` for `n = 1..=n_steps`.
    pub lambda_track: Vec<f64>,
    pub lambda_top_hat: f64,
    /// Frame estimates, nonincreasing; `-inf` where a generator kills a direction.
    pub spectrum: Vec<f64>,
    /// `(1/n) log |det A(x, n)|`.
    pub log_det_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitReport {
    pub lyapunov: LyapunovEstimate,
    /// `(1/n) log rho(A(x, n))`.
    pub rho_track: Vec<f64>,
    /// Max of `rho_track` over the window `[ceil(n/2), n]`, for each `n`.
    pub rho_window_max: Vec<f64>,
    pub rho_limsup_hat: f64,
    /// `lambda_track[n] - rho_window_max[n]`.
    pub gap_track: Vec<f64>,
    pub gap: f64,
}

impl OrbitReport {
    pub fn n_steps(&self) -> usize {
        self.lyapunov.n_steps
    }

    pub fn lambda_top_hat(&self) -> f64 {
        self.lyapunov.lambda_top_hat
    }
}

struct Tracks {
    lyapunov: LyapunovEstimate,
    rho: Vec<f64>,
}

fn run(path: &CocyclePath, n: usize, with_rho: bool) -> Result<Tracks> {
    let d = path.dim();
    let mut prod = ScaledMatrix::identity(d);
    let mut frame = Matrix::identity(d);
    let mut exps = alloc::vec![0.0f64; d];
    let mut lambda = Vec::with_capacity(n);
    let mut rho = Vec::with_capacity(if with_rho { n } else { 0 });
    for k in 0..n {
        let a = path.matrix(k as isize)?;
        prod.left_mul(a);
        if (k + 1) % RENORM_PERIOD == 0 {
            prod.renormalize();
        }
        let (q, r) = qr_square(&a.mul(&frame));
        for (e, rii) in exps.iter_mut().zip(&r) {
            *e += ln0(rii.abs());
        }
        frame = q;
        let steps = (k + 1) as f64;
        lambda.push(prod.log_norm()? / steps);
        if with_rho {
            rho.push(prod.log_spectral_radius()? / steps);
        }
    }
    let nf = n as f64;
    let log_det_rate = exps.iter().sum::<f64>() / nf;
    let mut spectrum: Vec<f64> = exps.iter().map(|e| e / nf).collect();
    spectrum.sort_by(|a, b| b.total_cmp(a));
    let lambda_top_hat = lambda.last().copied().unwrap_or(f64::NAN);
    Ok(Tracks {
        lyapunov: LyapunovEstimate { n_steps: n, lambda_track: lambda, lambda_top_hat, spectrum, log_det_rate },
        rho,
    })
}

/// Running top exponent and the full spectrum by frame reorthonormalization.
pub fn lyapunov_estimates(path: &CocyclePath, n: usize) -> Result<LyapunovEstimate> {
    Ok(run(path, n, false)?.lyapunov)
}

/// Sliding maximum over `[ceil(m/2), m]` (1-based) for every `m`.
pub fn tail_window_max(track: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(track.len());
    let mut dq: VecDeque<usize> = VecDeque::new();
    for (i, &v) in track.iter().enumerate() {
        while dq.back().is_some_and(|&j| track[j] <= v) {
            dq.pop_back();
        }
        dq.push_back(i);
        let m = i + 1;
        let left = m.div_ceil(2) - 1;
        while dq.front().is_some_and(|&j| j < left) {
            dq.pop_front();
        }
        out.push(track[*dq.front().expect("window is nonempty")]);
    }
    out
}

/// Top exponent against the tail-window max of `(1/n) log rho(A(x, n))`.
pub fn cohen_gap(path: &CocyclePath, n: usize) -> Result<OrbitReport> {
    let t = run(path, n, true)?;
    let window = tail_window_max(&t.rho);
    let gap_track: Vec<f64> = t.lyapunov.lambda_track.iter().zip(&window).map(|(l, r)| l - r).collect();
    Ok(OrbitReport {
        rho_limsup_hat: window.last().copied().unwrap_or(f64::NAN),
        gap: gap_track.last().copied().unwrap_or(f64::NAN),
        lyapunov: t.lyapunov,
        rho_track: t.rho,
        rho_window_max: window,
        gap_track,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{CocycleSpec, DrivingSystem};
    use crate::math::ln;
    use alloc::vec;

    fn constant_path(m: Matrix, n: usize) -> CocyclePath {
        let sys = DrivingSystem::full_shift(vec![1.0], 0).unwrap();
        CocyclePath::generate(&sys, &CocycleSpec::constant(m).unwrap(), 0, n).unwrap()
    }

    #[test]
    fn window_max() {
        assert_eq!(tail_window_max(&[1.0, 5.0, 2.0, 0.0, 3.0]), vec![1.0, 5.0, 5.0, 5.0, 3.0]);
    }

    #[test]
    fn constant_diagonal() {
        let path = constant_path(Matrix::diag(&[2.0, 0.5]), 500);
        let r = cohen_gap(&path, 500).unwrap();
        let l2 = ln(2.0);
        assert!((r.lambda_top_hat() - l2).abs() < 1e-12);
        assert!((r.lyapunov.spectrum[0] - l2).abs() < 1e-12 && (r.lyapunov.spectrum[1] + l2).abs() < 1e-12);
        assert!(r.gap.abs() < 1e-12);
        assert!(r.lyapunov.log_det_rate.abs() < 1e-12);
    }

    #[test]
    fn rotation_is_isometric() {
        let path = constant_path(Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap(), 300);
        let l = lyapunov_estimates(&path, 300).unwrap();
        assert!(l.lambda_track.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn singular_generator_gives_minus_infinity() {
        let path = constant_path(Matrix::diag(&[3.0, 0.0]), 40);
        let l = lyapunov_estimates(&path, 40).unwrap();
        assert!((l.spectrum[0] - ln(3.0)).abs() < 1e-12);
        assert_eq!(l.spectrum[1], f64::NEG_INFINITY);
    }

    #[test]
    fn rho_below_norm() {
        let sys = DrivingSystem::full_shift(vec![0.5, 0.5], 5).unwrap();
        let coc = CocycleSpec::symbols(vec![
            Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap(),
            Matrix::from_rows(&[[0.0, 1.0], [-1.0, 0.5]]).unwrap(),
        ])
        .unwrap();
        let path = CocyclePath::generate(&sys, &coc, 0, 400).unwrap();
        let r = cohen_gap(&path, 400).unwrap();
        for (rho, lam) in r.rho_track.iter().zip(&r.lyapunov.lambda_track) {
            assert!(*rho <= lam + 1e-10);
        }
    }
}
