//! Generator maps and the matrices they produce along an orbit.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{operator_norm, spectral_radius, Matrix};
use crate::math::{cos, ln0, sin};

use super::driver::{generate_two_sided, DrivingSystem, Orbit, OrbitPoints};

/// `A(theta) = C_0 + sum_k (C_k cos(2 pi k theta) + S_k sin(2 pi k theta))`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCocycle {
    pub constant: Matrix,
    pub cos: Vec<Matrix>,
    pub sin: Vec<Matrix>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// One matrix per symbol.
    Symbols(Vec<Matrix>),
    Fourier(FourierCocycle),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CocycleSpec {
    dim: usize,
    generator: Generator,
}

fn check_members(dim: usize, ms: &[Matrix]) -> Result<()> {
    for m in ms {
        m.require_square()?;
        if m.rows() != dim {
            return Err(Error::Dimension { expected: dim, found: m.rows() });
        }
        m.require_finite()?;
    }
    Ok(())
}

impl CocycleSpec {
    pub fn symbols(generators: Vec<Matrix>) -> Result<Self> {
        let dim = generators.first().ok_or_else(|| Error::Validation("no generators".into()))?.rows();
        check_members(dim, &generators)?;
        Ok(CocycleSpec { dim, generator: Generator::Symbols(generators) })
    }

    pub fn fourier(f: FourierCocycle) -> Result<Self> {
        let dim = f.constant.rows();
        check_members(dim, core::slice::from_ref(&f.constant))?;
        check_members(dim, &f.cos)?;
        check_members(dim, &f.sin)?;
        Ok(CocycleSpec { dim, generator: Generator::Fourier(f) })
    }

    /// A single matrix for every point.
    pub fn constant(m: Matrix) -> Result<Self> {
        Self::symbols(alloc::vec![m])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    /// Rejects pairings that cannot be evaluated: symbol maps need a shift
    /// with no more symbols than generators (a single generator serves any
    /// driver), Fourier maps need the rotation.
    pub fn check_driver(&self, sys: &DrivingSystem) -> Result<()> {
        match (&self.generator, sys.alphabet_size()) {
            (Generator::Symbols(g), Some(k)) if g.len() >= k || g.len() == 1 => Ok(()),
            (Generator::Symbols(g), Some(k)) => {
                Err(Error::Validation(alloc::format!("driver has {k} symbols but only {} generators", g.len())))
            }
            (Generator::Symbols(g), None) if g.len() == 1 => Ok(()),
            (Generator::Symbols(_), None) => Err(Error::Validation("symbol generators need a shift driver".into())),
            (Generator::Fourier(_), None) => Ok(()),
            (Generator::Fourier(_), Some(_)) => {
                Err(Error::Validation("a Fourier generator needs a rotation driver".into()))
            }
        }
    }

    pub fn at_symbol(&self, s: usize) -> Matrix {
        match &self.generator {
            Generator::Symbols(g) if g.len() == 1 => g[0].clone(),
            Generator::Symbols(g) => g[s].clone(),
            Generator::Fourier(_) => panic!("Fourier cocycles are evaluated at angles"),
        }
    }

    pub fn at_angle(&self, theta: f64) -> Matrix {
        match &self.generator {
            Generator::Fourier(f) => {
                let mut m = f.constant.clone();
                let tau = 2.0 * core::f64::consts::PI;
                for (k, c) in f.cos.iter().enumerate() {
                    m = m.add(&c.scale(cos(tau * (k + 1) as f64 * theta)));
                }
                for (k, s) in f.sin.iter().enumerate() {
                    m = m.add(&s.scale(sin(tau * (k + 1) as f64 * theta)));
                }
                m
            }
            Generator::Symbols(g) => g[0].clone(),
        }
    }
}

/// Steps between rescalings of a running product.
pub const RENORM_PERIOD: usize = 32;

/// `exp(log_scale) * matrix`, kept in range by periodic rescaling.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledMatrix {
    pub matrix: Matrix,
    pub log_scale: f64,
}

impl ScaledMatrix {
    pub fn identity(d: usize) -> Self {
        ScaledMatrix { matrix: Matrix::identity(d), log_scale: 0.0 }
    }

    /// `self <- a * self`.
    pub fn left_mul(&mut self, a: &Matrix) {
        self.matrix = a.mul(&self.matrix);
    }

    /// Moves the largest entry into the ledger; zero stays zero.
    pub fn renormalize(&mut self) {
        let s = self.matrix.max_abs();
        if s > 0.0 && s.is_finite() {
            self.matrix.scale_mut(1.0 / s);
            self.log_scale += ln0(s);
        }
    }

    pub fn log_norm(&self) -> Result<f64> {
        Ok(ln0(operator_norm(&self.matrix)?) + self.log_scale)
    }

    pub fn log_spectral_radius(&self) -> Result<f64> {
        Ok(ln0(spectral_radius(&self.matrix)?) + self.log_scale)
    }
}

/// The matrices `A(T^t x)` for `t` in `[-past, future)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CocyclePath {
    orbit: Orbit,
    matrices: Vec<Matrix>,
    dim: usize,
}

impl CocyclePath {
    pub fn generate(sys: &DrivingSystem, coc: &CocycleSpec, past: usize, future: usize) -> Result<Self> {
        coc.check_driver(sys)?;
        let orbit = generate_two_sided(sys, past, future)?;
        let matrices = match &orbit.points {
            OrbitPoints::Symbols(s) => s.iter().map(|&i| coc.at_symbol(i)).collect(),
            OrbitPoints::Angles(a) => a.iter().map(|&th| coc.at_angle(th)).collect(),
        };
        Ok(CocyclePath { orbit, matrices, dim: coc.dim() })
    }

    pub fn orbit(&self) -> &Orbit {
        &self.orbit
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn past(&self) -> usize {
        self.orbit.origin
    }

    pub fn future(&self) -> usize {
        self.matrices.len() - self.orbit.origin
    }

    /// `A(T^t x)`.
    pub fn matrix(&self, t: isize) -> Result<&Matrix> {
        let i = t + self.orbit.origin as isize;
        if i < 0 || i as usize >= self.matrices.len() {
            return Err(Error::Validation(alloc::format!("time {t} outside the generated orbit")));
        }
        Ok(&self.matrices[i as usize])
    }

    /// `A(T^t x, n) = A(T^{t+n-1} x) ... A(T^t x)`, rescaled every
    /// [`RENORM_PERIOD`] steps.
    pub fn product(&self, t: isize, n: usize) -> Result<ScaledMatrix> {
        let mut p = ScaledMatrix::identity(self.dim);
        for k in 0..n {
            p.left_mul(self.matrix(t + k as isize)?);
            if (k + 1) % RENORM_PERIOD == 0 {
                p.renormalize();
            }
        }
        p.renormalize();
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn rot90() -> Matrix {
        Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap()
    }

    #[test]
    fn driver_pairing() {
        let two = CocycleSpec::symbols(vec![Matrix::identity(2), rot90()]).unwrap();
        assert!(two.check_driver(&DrivingSystem::full_shift(vec![0.2, 0.3, 0.5], 0).unwrap()).is_err());
        assert!(two.check_driver(&DrivingSystem::circle_rotation(0.1, 0).unwrap()).is_err());
        let f = CocycleSpec::fourier(FourierCocycle { constant: Matrix::identity(2), cos: vec![rot90()], sin: vec![] })
            .unwrap();
        assert!(f.check_driver(&DrivingSystem::circle_rotation(0.1, 0).unwrap()).is_ok());
        assert!(CocycleSpec::symbols(vec![Matrix::identity(2), Matrix::identity(3)]).is_err());
    }

    #[test]
    fn fourier_evaluation() {
        let f = CocycleSpec::fourier(FourierCocycle {
            constant: Matrix::identity(2),
            cos: vec![Matrix::identity(2)],
            sin: vec![rot90()],
        })
        .unwrap();
        let m = f.at_angle(0.25);
        assert!((m[(0, 0)] - 1.0).abs() < 1e-15 && (m[(1, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn renormalized_product_tracks_scale() {
        let sys = DrivingSystem::full_shift(vec![1.0], 0).unwrap();
        let coc = CocycleSpec::constant(Matrix::diag(&[3.0, 1.0])).unwrap();
        let path = CocyclePath::generate(&sys, &coc, 0, 1000).unwrap();
        let p = path.product(0, 1000).unwrap();
        assert!((p.log_norm().unwrap() - 1000.0 * ln0(3.0)).abs() < 1e-9);
        assert!(path.matrix(1000).is_err() && path.matrix(-1).is_err());
    }
}
