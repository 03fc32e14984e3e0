//! Finite-horizon splitting `R^2 = V(x) + W(x)` for a dominated planar
//! cocycle, with the recurrence and cone diagnostics built on it.
//!
//! `V(x)` is the most expanded output direction of `A(T^{-H} x, H)` and
//! `W(x)` the most contracted input direction of `A(x, H)`. `P(x)` projects
//! onto `V(x)` along `W(x)`. In coordinates `u = a V + b W` the cone
//! `K(x, delta)` is `|b| <= delta |a|`; it is a double cone bounded by the
//! rays `V + W` and `V - W` when `delta = 1`, so whether a linear map sends
//! `K(x, 1)` into `K(x, delta)` is decided by the images of those two rays.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{operator_norm, svd, Matrix};
use crate::math::{hypot, ln0};

use super::spec::CocyclePath;

/// Smallest accepted `(1/H) log(sigma_1 / sigma_2)` of the forward block.
pub const MIN_SPLITTING_GAP: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct SplittingEstimate {
    /// Orbit time of the base point.
    pub time: isize,
    pub horizon: usize,
    /// Fast direction, unit length.
    pub v: [f64; 2],
    /// Slow direction, unit length.
    pub w: [f64; 2],
    /// Projection onto `v` along `w`.
    pub p: Matrix,
    /// `(1/H) log(sigma_1 / sigma_2)` of `A(x, H)`.
    pub gap: f64,
}

impl SplittingEstimate {
    pub fn q(&self) -> Matrix {
        Matrix::identity(2).sub(&self.p)
    }

    /// `(a, b)` with `y = a v + b w`.
    pub fn coordinates(&self, y: [f64; 2]) -> (f64, f64) {
        let py = self.p.mul_vec(&y);
        let qy = [y[0] - py[0], y[1] - py[1]];
        (dot(self.v, [py[0], py[1]]), dot(self.w, qy))
    }
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Unit vector with its largest component positive.
fn canonical(x: [f64; 2]) -> [f64; 2] {
    let n = hypot(x[0], x[1]);
    let s = if x[0].abs() >= x[1].abs() { x[0].signum() } else { x[1].signum() };
    [s * x[0] / n, s * x[1] / n]
}

fn det2(m: &Matrix) -> f64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

fn require_planar(path: &CocyclePath) -> Result<()> {
    if path.dim() != 2 {
        return Err(Error::Dimension { expected: 2, found: path.dim() });
    }
    Ok(())
}

/// Splitting at orbit time `t` from the blocks `A(T^{t-H} x, H)` and `A(T^t x, H)`.
pub fn oseledets_splitting_2d(path: &CocyclePath, t: isize, horizon: usize) -> Result<SplittingEstimate> {
    require_planar(path)?;
    if horizon == 0 {
        return Err(Error::Validation("horizon must be positive".into()));
    }
    let fwd = path.product(t, horizon)?;
    let past = path.product(t - horizon as isize, horizon)?;

    let mut log_det = 0.0;
    for k in 0..horizon {
        log_det += ln0(det2(path.matrix(t + k as isize)?).abs());
    }
    let log_s1 = fwd.log_norm()?;
    let log_s2 = log_det - log_s1;
    let gap = (log_s1 - log_s2) / horizon as f64;
    if !(gap >= MIN_SPLITTING_GAP) {
        return Err(Error::IllConditionedSplitting { gap, threshold: MIN_SPLITTING_GAP });
    }

    let up = svd(&past.matrix)?.u;
    let v = canonical([up[(0, 0)], up[(1, 0)]]);
    let vf = svd(&fwd.matrix)?.v;
    let top_in = [vf[(0, 0)], vf[(1, 0)]];
    let w = canonical([-top_in[1], top_in[0]]);

    // P = v top_in^T / (top_in . v); top_in is orthogonal to w
    let denom = dot(top_in, v);
    if denom.abs() < 1e-12 {
        return Err(Error::IllConditionedSplitting { gap, threshold: MIN_SPLITTING_GAP });
    }
    let mut p = Matrix::zeros(2, 2);
    for r in 0..2 {
        for c in 0..2 {
            p[(r, c)] = v[r] * top_in[c] / denom;
        }
    }
    Ok(SplittingEstimate { time: t, horizon, v, w, p, gap })
}

/// `||P(T^n x) A(x, n) - A(x, n) P(x)|| / ||A(x, n)||` at orbit time `t`.
pub fn equivariance_residual(path: &CocyclePath, t: isize, n: usize, horizon: usize) -> Result<f64> {
    let here = oseledets_splitting_2d(path, t, horizon)?;
    let there = oseledets_splitting_2d(path, t + n as isize, horizon)?;
    let a = path.product(t, n)?.matrix;
    let lhs = there.p.mul(&a);
    let rhs = a.mul(&here.p);
    Ok(operator_norm(&lhs.sub(&rhs))? / operator_norm(&a)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceReport {
    /// `min_{1 <= n <= n_max} ||P(x) - P(T^n x)||`.
    pub value: f64,
    pub argmin: Option<usize>,
    /// Running minimum for each `n`; infinite until the first success.
    pub min_so_far: Vec<f64>,
    /// Times whose splitting was refused.
    pub failures: Vec<usize>,
}

/// Closest return of the projection `P` along the forward orbit.
pub fn recurrence_liminf(path: &CocyclePath, horizon: usize, n_max: usize) -> Result<RecurrenceReport> {
    let base = oseledets_splitting_2d(path, 0, horizon)?;
    let mut best = f64::INFINITY;
    let mut argmin = None;
    let mut min_so_far = Vec::with_capacity(n_max);
    let mut failures = Vec::new();
    for n in 1..=n_max {
        match oseledets_splitting_2d(path, n as isize, horizon) {
            Ok(s) => {
                let d = operator_norm(&base.p.sub(&s.p))?;
                if d < best {
                    best = d;
                    argmin = Some(n);
                }
            }
            Err(Error::IllConditionedSplitting { .. }) => failures.push(n),
            Err(e) => return Err(e),
        }
        min_so_far.push(best);
    }
    Ok(RecurrenceReport { value: best, argmin, min_so_far, failures })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeReport {
    pub returns: usize,
    pub return_times: Vec<usize>,
    /// Whether `A(x, n) K(x, 1)` lies in `K(x, delta)`, for `n = 1..=n_max`.
    pub contained: Vec<bool>,
    /// `log min ||A(x, n) u|| / ||u||` over the boundary rays and the axis.
    pub log_growth: Vec<f64>,
    /// `log_growth / n` at the last return time.
    pub growth_exponent: Option<f64>,
}

/// A vector carried along the orbit with its log length kept separately.
struct Carried {
    dir: [f64; 2],
    log_len: f64,
}

impl Carried {
    fn new(x: [f64; 2]) -> Self {
        let n = hypot(x[0], x[1]);
        Carried { dir: [x[0] / n, x[1] / n], log_len: 0.0 }
    }

    fn push(&mut self, a: &Matrix) {
        if self.log_len == f64::NEG_INFINITY {
            return;
        }
        let y = a.mul_vec(&self.dir);
        let n = hypot(y[0], y[1]);
        if n == 0.0 {
            self.dir = [0.0, 0.0];
            self.log_len = f64::NEG_INFINITY;
        } else {
            self.dir = [y[0] / n, y[1] / n];
            self.log_len += ln0(n);
        }
    }

    fn is_zero(&self) -> bool {
        self.log_len == f64::NEG_INFINITY
    }
}

/// Counts the `n <= n_max` with `A(x, n) K(x, 1)` inside `K(x, delta)` and
/// records the growth of the cone's boundary rays and axis.
pub fn cone_check(path: &CocyclePath, delta: f64, n_max: usize, horizon: usize) -> Result<ConeReport> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Validation("delta must lie in (0, 1]".into()));
    }
    let s = oseledets_splitting_2d(path, 0, horizon)?;
    let plus = [s.v[0] + s.w[0], s.v[1] + s.w[1]];
    let minus = [s.v[0] - s.w[0], s.v[1] - s.w[1]];
    let mut rays = [Carried::new(plus), Carried::new(minus), Carried::new(s.v)];

    let in_cone = |c: &Carried| -> (bool, f64) {
        if c.is_zero() {
            return (true, 0.0);
        }
        let (a, b) = s.coordinates(c.dir);
        (b.abs() <= delta * a.abs() * (1.0 + 1e-12), a)
    };

    let mut contained = Vec::with_capacity(n_max);
    let mut log_growth = Vec::with_capacity(n_max);
    let mut return_times = Vec::new();
    for n in 1..=n_max {
        let a = path.matrix(n as isize - 1)?;
        for r in rays.iter_mut() {
            r.push(a);
        }
        let (in_p, ap) = in_cone(&rays[0]);
        let (in_m, am) = in_cone(&rays[1]);
        let same_side = rays[0].is_zero() || rays[1].is_zero() || ap * am > 0.0;
        let ok = in_p && in_m && same_side;
        contained.push(ok);
        if ok {
            return_times.push(n);
        }
        log_growth.push(rays.iter().map(|r| r.log_len).fold(f64::INFINITY, f64::min));
    }
    let growth_exponent = return_times.last().map(|&n| log_growth[n - 1] / n as f64);
    Ok(ConeReport { returns: return_times.len(), return_times, contained, log_growth, growth_exponent })
}
