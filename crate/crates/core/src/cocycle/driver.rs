//! Driving systems and seeded orbit generation.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math::floor;

const PROBABILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum DriverKind {
    /// Two-sided Bernoulli shift.
    FullShift { probs: Vec<f64> },
    /// Stationary Markov shift.
    MarkovShift { transition: Matrix, stationary: Vec<f64> },
    /// `theta -> theta + angle (mod 1)`.
    CircleRotation { angle: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrivingSystem {
    kind: DriverKind,
    seed: u64,
}

fn check_probability_vector(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::Validation(alloc::format!("{what} is empty")));
    }
    if let Some(index) = p.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    if p.iter().any(|&x| x < 0.0) {
        return Err(Error::Validation(alloc::format!("{what} has a negative entry")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::Validation(alloc::format!("{what} sums to {s}, not 1")));
    }
    Ok(())
}

impl DrivingSystem {
    pub fn full_shift(probs: Vec<f64>, seed: u64) -> Result<Self> {
        check_probability_vector(&probs, "probability vector")?;
        Ok(DrivingSystem { kind: DriverKind::FullShift { probs }, seed })
    }

    /// `stationary` must be invariant: `stationary * transition = stationary`.
    pub fn markov_shift(transition: Matrix, stationary: Vec<f64>, seed: u64) -> Result<Self> {
        transition.require_square()?;
        let k = transition.rows();
        if stationary.len() != k {
            return Err(Error::Dimension { expected: k, found: stationary.len() });
        }
        for i in 0..k {
            check_probability_vector(transition.row(i), "transition row")?;
        }
        check_probability_vector(&stationary, "stationary vector")?;
        for j in 0..k {
            let pj: f64 = (0..k).map(|i| stationary[i] * transition[(i, j)]).sum();
            if (pj - stationary[j]).abs() > 1e-10 {
                return Err(Error::Validation("stationary vector is not invariant".into()));
            }
        }
        Ok(DrivingSystem { kind: DriverKind::MarkovShift { transition, stationary }, seed })
    }

    pub fn circle_rotation(angle: f64, seed: u64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::NonFinite { index: 0 });
        }
        Ok(DrivingSystem { kind: DriverKind::CircleRotation { angle: frac(angle) }, seed })
    }

    pub fn kind(&self) -> &DriverKind {
        &self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        DrivingSystem { kind: self.kind.clone(), seed }
    }

    /// Number of symbols, or `None` for the rotation.
    pub fn alphabet_size(&self) -> Option<usize> {
        match &self.kind {
            DriverKind::FullShift { probs } => Some(probs.len()),
            DriverKind::MarkovShift { stationary, .. } => Some(stationary.len()),
            DriverKind::CircleRotation { .. } => None,
        }
    }
}

/// Points of an orbit segment `x_{-past}, ..., x_{future-1}`.
#[derive(Debug, Clone, PartialEq)]
pub enum OrbitPoints {
    Symbols(Vec<usize>),
    Angles(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub points: OrbitPoints,
    /// Position of `x_0` in `points`.
    pub origin: usize,
}

impl Orbit {
    pub fn len(&self) -> usize {
        match &self.points {
            OrbitPoints::Symbols(s) => s.len(),
            OrbitPoints::Angles(a) => a.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `x_0 .. x_{n-1}`.
    pub fn forward_symbols(&self) -> Option<&[usize]> {
        match &self.points {
            OrbitPoints::Symbols(s) => Some(&s[self.origin..]),
            OrbitPoints::Angles(_) => None,
        }
    }
}

fn frac(x: f64) -> f64 {
    let f = x - floor(x);
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

fn sample(rng: &mut ChaCha8Rng, p: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return i;
        }
    }
    // rounding left u above the total mass
    p.iter().rposition(|&pi| pi > 0.0).unwrap_or(0)
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// One-sided orbit `x_0, ..., x_{n-1}`.
pub fn generate_orbit(sys: &DrivingSystem, n: usize) -> Result<Orbit> {
    generate_two_sided(sys, 0, n)
}

/// `x_{-past}, ..., x_{future-1}`. The forward part is drawn from its own
/// random stream, so it does not depend on `past`; the past of a Markov
/// chain follows the time-reversed chain.
pub fn generate_two_sided(sys: &DrivingSystem, past: usize, future: usize) -> Result<Orbit> {
    if future == 0 {
        return Err(Error::Validation("orbit length must be at least 1".into()));
    }
    let mut fwd = rng(sys.seed, 0);
    let mut back = rng(sys.seed, 1);
    let points = match &sys.kind {
        DriverKind::FullShift { probs } => {
            let forward: Vec<usize> = (0..future).map(|_| sample(&mut fwd, probs)).collect();
            let mut all: Vec<usize> = (0..past).map(|_| sample(&mut back, probs)).collect();
            all.reverse();
            all.extend(forward);
            OrbitPoints::Symbols(all)
        }
        DriverKind::MarkovShift { transition, stationary } => {
            let k = stationary.len();
            let mut forward = Vec::with_capacity(future);
            forward.push(sample(&mut fwd, stationary));
            for t in 1..future {
                let prev = forward[t - 1];
                forward.push(sample(&mut fwd, transition.row(prev)));
            }
            let mut all = Vec::with_capacity(past + future);
            let mut cur = forward[0];
            let mut reversed = alloc::vec![0.0; k];
            for _ in 0..past {
                for (j, r) in reversed.iter_mut().enumerate() {
                    *r = stationary[j] * transition[(j, cur)] / stationary[cur];
                }
                cur = sample(&mut back, &reversed);
                all.push(cur);
            }
            all.reverse();
            all.extend(forward);
            OrbitPoints::Symbols(all)
        }
        DriverKind::CircleRotation { angle } => {
            let theta0: f64 = fwd.random();
            let points = (0..past + future)
                .map(|i| {
                    let t = i as f64 - past as f64;
                    frac(theta0 + t * angle)
                })
                .collect();
            OrbitPoints::Angles(points)
        }
    };
    Ok(Orbit { points, origin: past })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn validation() {
        assert!(DrivingSystem::full_shift(vec![0.5, 0.6], 0).is_err());
        assert!(DrivingSystem::full_shift(vec![], 0).is_err());
        assert!(DrivingSystem::full_shift(vec![1.5, -0.5], 0).is_err());
        let p = Matrix::from_rows(&[[0.9, 0.1], [0.5, 0.5]]).unwrap();
        assert!(DrivingSystem::markov_shift(p.clone(), vec![0.5, 0.5], 0).is_err());
        assert!(DrivingSystem::markov_shift(p, vec![5.0 / 6.0, 1.0 / 6.0], 0).is_ok());
        assert_eq!(
            DrivingSystem::circle_rotation(1.25, 0).unwrap().kind(),
            &DriverKind::CircleRotation { angle: 0.25 }
        );
    }

    #[test]
    fn constant_paths() {
        let one = DrivingSystem::full_shift(vec![1.0], 3).unwrap();
        let o = generate_two_sided(&one, 5, 20).unwrap();
        assert_eq!(o.points, OrbitPoints::Symbols(vec![0; 25]));
        let rot = DrivingSystem::circle_rotation(0.0, 3).unwrap();
        if let OrbitPoints::Angles(a) = generate_orbit(&rot, 50).unwrap().points {
            assert!(a.iter().all(|&x| x == a[0]));
        } else {
            panic!("rotation yields angles");
        }
    }

    #[test]
    fn bernoulli_frequency_and_determinism() {
        let s = DrivingSystem::full_shift(vec![0.5, 0.5], 42).unwrap();
        let a = generate_orbit(&s, 10_000).unwrap();
        let b = generate_orbit(&s, 10_000).unwrap();
        assert_eq!(a, b);
        let zeros = a.forward_symbols().unwrap().iter().filter(|&&x| x == 0).count() as f64 / 1e4;
        assert!((0.47..=0.53).contains(&zeros), "{zeros}");
    }

    #[test]
    fn forward_part_ignores_past() {
        let p = Matrix::from_rows(&[[0.9, 0.1], [0.5, 0.5]]).unwrap();
        let s = DrivingSystem::markov_shift(p, vec![5.0 / 6.0, 1.0 / 6.0], 7).unwrap();
        let one = generate_orbit(&s, 100).unwrap();
        let two = generate_two_sided(&s, 40, 100).unwrap();
        assert_eq!(one.forward_symbols(), two.forward_symbols());
    }

    #[test]
    fn periodic_chain_alternates_both_ways() {
        let p = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let s = DrivingSystem::markov_shift(p, vec![0.5, 0.5], 1).unwrap();
        if let OrbitPoints::Symbols(x) = generate_two_sided(&s, 9, 10).unwrap().points {
            assert!(x.windows(2).all(|w| w[0] != w[1]));
        } else {
            panic!("shift yields symbols");
        }
    }
}
