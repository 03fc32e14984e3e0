//! Spectral radii of operator families and linear cocycles.
//!
//! This crate computes and cross-checks four growth rates attached to a
//! bounded family of operators: the joint spectral radius (norm growth of
//! products), the generalized spectral radius (eigenvalue growth of
//! products), and the two "essential" radii built from the Hausdorff measure
//! of noncompactness and from the distance to finite-rank operators. It also
//! simulates linear cocycles over shifts and rotations to estimate Lyapunov
//! exponents, the asymptotic spectral radius along orbits, and dominated
//! splittings in dimension two.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, CSV output
//! and the command-line front end live in the companion `srl` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cocycle;
pub mod error;
pub mod extend;
pub mod jsr;
pub mod linalg;
pub mod opshift;
pub mod radii;
pub mod words;

mod math;

pub use error::{Error, Result};
pub use linalg::{Complex, Matrix, SingularSpectrum};
