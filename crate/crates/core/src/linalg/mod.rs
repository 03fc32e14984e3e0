//! Dense linear algebra primitives: eigenvalues, singular values, QR.
//!
//! The ambient norm everywhere is the Euclidean operator norm, so the
//! distance to rank-`k` matrices is exactly the `(k+1)`-th singular value.

mod eigen;
mod matrix;
mod qr;
mod svd;

pub use eigen::{eigenvalues, spectral_radius};
pub use matrix::Matrix;
pub use qr::qr_square;
pub use svd::{distance_to_rank, operator_norm, singular_values, svd, SingularSpectrum, Svd};

use crate::math::hypot;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub fn real(re: f64) -> Self {
        Complex { re, im: 0.0 }
    }

    pub fn norm(&self) -> f64 {
        hypot(self.re, self.im)
    }
}

/// Comparison policy used across the crate: absolute `1e-12` plus relative `1e-10`.
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 + 1e-10 * a.abs().max(b.abs())
}
