//! Injectivizing extension of an operator family.
//!
//! Given weights `alpha_1 > alpha_2 > ... ` in `(0, 1]`, an operator `L` on
//! `X` extends to `E(L)` on sequences `(v_1, v_2, ...)` with the sup norm:
//!
//! ```text
//! E(L)(v_1, v_2, v_3, ...) = (L v_1, alpha_1 v_1, alpha_2 v_2, ...)
//! ```
//!
//! `E(L)` is injective even when `L` is not, and the product of a word has
//! norm
//!
//! ```text
//! ||E(L_n) ... E(L_1)|| = max_{0 <= k <= n} ||L_{n-k} ... L_1|| * alpha_1 ... alpha_k
//! ```
//!
//! where the `k = n` term uses the empty product, of norm 1. The same
//! formula holds for the seminorms. Everything here goes through that
//! formula; the explicit block matrix of a truncated extension is built only
//! as an independent check.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::jsr::{bw_report, MatrixSet};
use crate::linalg::{operator_norm, spectral_radius, Matrix};
use crate::math::{exp, ln0};
use crate::opshift::{op_norm, op_spectral_radius, seminorm_f, OperatorFamily, ShiftFinRankOperator};
use crate::radii::RadiiReport;
use crate::words::{for_each_word, levels_within_budget, LevelMax, Word, WordAlphabet, WordVisitor};

/// `alpha_i = exp(-beta (i + 1))` for `i >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaSequence {
    beta: f64,
}

impl Default for AlphaSequence {
    fn default() -> Self {
        AlphaSequence { beta: 1.0 }
    }
}

impl AlphaSequence {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Validation("beta must be positive and finite".into()));
        }
        Ok(AlphaSequence { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha(&self, i: usize) -> f64 {
        exp(self.log_alpha(i))
    }

    pub fn log_alpha(&self, i: usize) -> f64 {
        assert!(i >= 1, "alpha is indexed from 1");
        -self.beta * (i + 1) as f64
    }

    /// `s_k = log(alpha_1 ... alpha_k) = -beta k (k + 3) / 2`.
    pub fn partial_log_sum(&self, k: usize) -> f64 {
        let k = k as f64;
        -self.beta * k * (k + 3.0) / 2.0
    }
}

/// Built-in subadditive sequences for [`verify_alpha_property`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubadditiveGenerator {
    /// `slope * n + intercept`; subadditive iff `intercept >= 0`.
    Linear { slope: f64, intercept: f64 },
    /// `-n^2`.
    NegQuadratic,
    /// `min(s1 n + c1, s2 n + c2)`.
    MinLinear { s1: f64, c1: f64, s2: f64, c2: f64 },
}

impl SubadditiveGenerator {
    /// `a_n` for `n >= 1`; `a_0` is taken to be 0.
    pub fn value(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let x = n as f64;
        match *self {
            SubadditiveGenerator::Linear { slope, intercept } => slope * x + intercept,
            SubadditiveGenerator::NegQuadratic => -x * x,
            SubadditiveGenerator::MinLinear { s1, c1, s2, c2 } => (s1 * x + c1).min(s2 * x + c2),
        }
    }

    /// Samples `pairs` random `(n, m)` with `n + m <= n_max` and checks
    /// `a_{n+m} <= a_n + a_m`.
    pub fn check_subadditive(&self, n_max: usize, pairs: usize, seed: u64) -> Result<()> {
        if n_max < 2 {
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..pairs {
            let n = rng.random_range(1..n_max);
            let m = rng.random_range(1..=n_max - n);
            let lhs = self.value(n + m);
            let rhs = self.value(n) + self.value(m);
            if lhs > rhs + 1e-12 * (1.0 + rhs.abs()) {
                return Err(Error::NotSubadditive { n, m });
            }
        }
        Ok(())
    }
}

/// Random pairs sampled by [`verify_alpha_property`].
pub const SUBADDITIVITY_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaReport {
    pub n: usize,
    /// `a_n / n`.
    pub direct: f64,
    /// `(1/n) max_{0<=k<=n} (a_{n-k} + s_k)`.
    pub weighted: f64,
    pub difference: f64,
    /// Both estimates below `-1e6 / n`.
    pub diverges: bool,
    pub passed: bool,
}

/// Largest tolerated `|direct - weighted|`.
pub const ALPHA_TOLERANCE: f64 = 0.01;

/// Compares the growth rate of a subadditive sequence with that of its
/// alpha-weighted maximum at `n = n_max`.
pub fn verify_alpha_property(
    gen: &SubadditiveGenerator,
    n_max: usize,
    alpha: &AlphaSequence,
    seed: u64,
) -> Result<AlphaReport> {
    if n_max == 0 {
        return Err(Error::Validation("n_max must be at least 1".into()));
    }
    gen.check_subadditive(n_max, SUBADDITIVITY_SAMPLES, seed)?;
    let n = n_max;
    let nf = n as f64;
    let direct = gen.value(n) / nf;
    let best = (0..=n).map(|k| gen.value(n - k) + alpha.partial_log_sum(k)).fold(f64::NEG_INFINITY, f64::max);
    let weighted = best / nf;
    let difference = direct - weighted;
    let threshold = -1e6 / nf;
    let diverges = direct <= threshold && weighted <= threshold;
    Ok(AlphaReport {
        n,
        direct,
        weighted,
        difference,
        diverges,
        passed: diverges || difference.abs() <= ALPHA_TOLERANCE,
    })
}

/// A family whose word products the extension formula can evaluate.
pub trait ExtensionBase: WordAlphabet {
    fn norm(&self, elem: &Self::Elem) -> Result<f64>;

    fn seminorm_f(&self, elem: &Self::Elem) -> f64;

    fn spectral_radius(&self, elem: &Self::Elem) -> Result<f64>;

    /// `log ||P_j||` for every prefix `P_j` of `word`, `j = 1..=n`.
    fn log_prefix_norms(&self, word: &Word) -> Result<Vec<f64>> {
        self.prefix_products(word)?.iter().map(|p| Ok(ln0(self.norm(p)?))).collect()
    }
}

impl ExtensionBase for MatrixSet {
    fn norm(&self, elem: &Matrix) -> Result<f64> {
        operator_norm(elem)
    }

    /// Matrices are finite rank.
    fn seminorm_f(&self, _elem: &Matrix) -> f64 {
        0.0
    }

    fn spectral_radius(&self, elem: &Matrix) -> Result<f64> {
        spectral_radius(elem)
    }

    /// Rescales the running product so long words neither overflow nor
    /// underflow.
    fn log_prefix_norms(&self, word: &Word) -> Result<Vec<f64>> {
        let len = self.len();
        if let Some(&index) = word.indices().iter().find(|&&i| i >= len) {
            return Err(Error::IndexOutOfRange { index, len });
        }
        let mut out = Vec::with_capacity(word.len());
        let mut p = Matrix::identity(self.dim());
        let mut ledger = 0.0;
        for &i in word.indices() {
            p = self.members()[i].mul(&p);
            let norm = operator_norm(&p)?;
            out.push(ln0(norm) + ledger);
            if norm == 0.0 {
                out.resize(word.len(), f64::NEG_INFINITY);
                break;
            }
            if !(1e-100..=1e100).contains(&norm) {
                p.scale_mut(1.0 / norm);
                ledger += ln0(norm);
            }
        }
        Ok(out)
    }
}

/// Tolerance handed to [`op_spectral_radius`] for family members.
pub const OPERATOR_SPECTRUM_TOL: f64 = 1e-9;

impl ExtensionBase for OperatorFamily {
    fn norm(&self, elem: &ShiftFinRankOperator) -> Result<f64> {
        op_norm(elem)
    }

    fn seminorm_f(&self, elem: &ShiftFinRankOperator) -> f64 {
        seminorm_f(elem)
    }

    fn spectral_radius(&self, elem: &ShiftFinRankOperator) -> Result<f64> {
        op_spectral_radius(elem, OPERATOR_SPECTRUM_TOL)
    }
}

/// A word over a base family, read through the extension.
#[derive(Debug, Clone)]
pub struct ExtendedWord<'a, B> {
    pub base: &'a B,
    pub word: Word,
    pub alpha: AlphaSequence,
}

impl<'a, B: ExtensionBase> ExtendedWord<'a, B> {
    pub fn new(base: &'a B, word: Word, alpha: AlphaSequence) -> Result<Self> {
        let len = base.size();
        if let Some(&index) = word.indices().iter().find(|&&i| i >= len) {
            return Err(Error::IndexOutOfRange { index, len });
        }
        Ok(ExtendedWord { base, word, alpha })
    }
}

/// `max_{0<=j<=n} (l_j + s_{n-j})` with `l_0 = 0` and `l_j` the log prefix values.
fn weighted_log_max(log_prefix: &[f64], alpha: &AlphaSequence) -> f64 {
    let n = log_prefix.len();
    let mut best = alpha.partial_log_sum(n);
    for (j, &l) in log_prefix.iter().enumerate() {
        best = best.max(l + alpha.partial_log_sum(n - j - 1));
    }
    best
}

pub fn extended_log_norm<B: ExtensionBase>(ew: &ExtendedWord<'_, B>) -> Result<f64> {
    Ok(weighted_log_max(&ew.base.log_prefix_norms(&ew.word)?, &ew.alpha))
}

/// `||E(L_n) ... E(L_1)||` from the prefix-norm formula.
pub fn extended_norm<B: ExtensionBase>(ew: &ExtendedWord<'_, B>) -> Result<f64> {
    Ok(exp(extended_log_norm(ew)?))
}

/// `||E(L_n) ... E(L_1)||_f`; for matrices only the `k = n` term survives.
pub fn extended_seminorm_f<B: ExtensionBase>(ew: &ExtendedWord<'_, B>) -> Result<f64> {
    let logs = ew.base.prefix_products(&ew.word)?.iter().map(|p| ln0(ew.base.seminorm_f(p))).collect::<Vec<_>>();
    Ok(exp(weighted_log_max(&logs, &ew.alpha)))
}

/// The spectrum of the extended product is that of the base product plus
/// zero, so the spectral radius carries over unchanged.
pub fn extended_spectral_radius<B: ExtensionBase>(ew: &ExtendedWord<'_, B>) -> Result<f64> {
    ew.base.spectral_radius(&ew.base.product(&ew.word)?)
}

/// `E(l)` restricted to the first `levels` blocks, as a dense
/// `(levels d) x (levels d)` matrix.
pub fn truncated_extension_matrix(l: &Matrix, alpha: &AlphaSequence, levels: usize) -> Result<Matrix> {
    l.require_square()?;
    if levels == 0 {
        return Err(Error::Validation("levels must be positive".into()));
    }
    let d = l.rows();
    let mut e = Matrix::zeros(levels * d, levels * d);
    for r in 0..d {
        for c in 0..d {
            e[(r, c)] = l[(r, c)];
        }
    }
    for i in 1..levels {
        let a = alpha.alpha(i);
        for r in 0..d {
            e[(i * d + r, (i - 1) * d + r)] = a;
        }
    }
    Ok(e)
}

/// Operator norm for the block-sup norm when each block row has at most
/// one nonzero block.
fn block_sup_norm(m: &Matrix, d: usize) -> Result<f64> {
    let levels = m.rows() / d;
    let mut best = 0.0f64;
    for bi in 0..levels {
        let mut nonzero = 0;
        for bj in 0..levels {
            let mut block = Matrix::zeros(d, d);
            for r in 0..d {
                for c in 0..d {
                    block[(r, c)] = m[(bi * d + r, bj * d + c)];
                }
            }
            if !block.is_zero() {
                nonzero += 1;
                best = best.max(operator_norm(&block)?);
            }
        }
        if nonzero > 1 {
            return Err(Error::Validation("block row with several nonzero blocks".into()));
        }
    }
    Ok(best)
}

/// Product of the word through explicit truncated extensions.
pub fn truncated_extension_product(ew: &ExtendedWord<'_, MatrixSet>, levels: usize) -> Result<Matrix> {
    if levels < ew.word.len() + 1 {
        return Err(Error::Validation("levels must exceed the word length".into()));
    }
    let blocks = ew
        .base
        .members()
        .iter()
        .map(|m| truncated_extension_matrix(m, &ew.alpha, levels))
        .collect::<Result<Vec<_>>>()?;
    let mut p = Matrix::identity(levels * ew.base.dim());
    for &i in ew.word.indices() {
        p = blocks[i].mul(&p);
    }
    Ok(p)
}

/// Independent check of [`extended_norm`] on `X^levels` with the sup norm.
pub fn truncated_extension_norm(ew: &ExtendedWord<'_, MatrixSet>, levels: usize) -> Result<f64> {
    block_sup_norm(&truncated_extension_product(ew, levels)?, ew.base.dim())
}

/// Base report and the report of the extended family side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedRadii {
    pub base: RadiiReport,
    pub extended: RadiiReport,
    pub alpha: AlphaSequence,
}

impl ExtendedRadii {
    /// The spectral-radius columns agree bit for bit.
    pub fn rho_columns_equal(&self) -> bool {
        self.base.rows.len() == self.extended.rows.len()
            && self.base.rows.iter().zip(&self.extended.rows).all(|(a, b)| a.gelfand_max == b.gelfand_max)
    }
}

struct ExtendedVisitor {
    alpha: AlphaSequence,
    /// Log norms of the prefixes of the current word.
    stack: Vec<f64>,
    norm: LevelMax,
    error: Option<Error>,
}

impl WordVisitor<Matrix> for ExtendedVisitor {
    fn visit(&mut self, word: &[usize], elem: &Matrix) {
        if self.error.is_some() {
            return;
        }
        match operator_norm(elem) {
            Ok(norm) => {
                self.stack.truncate(word.len() - 1);
                self.stack.push(ln0(norm));
                let n = word.len();
                self.norm.offer(word, exp(weighted_log_max(&self.stack, &self.alpha) / n as f64));
            }
            Err(e) => self.error = Some(e),
        }
    }

    fn zero_subtree(&mut self, prefix: &[usize], depth: usize) {
        let mut logs = self.stack[..prefix.len()].to_vec();
        let mut word = prefix.to_vec();
        while word.len() < depth {
            word.push(0);
            logs.push(f64::NEG_INFINITY);
            let n = word.len();
            self.norm.offer(&word, exp(weighted_log_max(&logs, &self.alpha) / n as f64));
        }
    }
}

/// Per-length radii of a matrix set and of its extension.
///
/// The extended norm column is the sup of `extended_norm^(1/n)`; the
/// spectral column is copied from the base (the spectra agree); the
/// seminorm columns are `(alpha_1 ... alpha_n)^(1/n)`.
pub fn extended_radii(base: &MatrixSet, n_max: usize, budget: u64, alpha: AlphaSequence) -> Result<ExtendedRadii> {
    let base_report = bw_report(base, n_max, budget)?;
    let depth = levels_within_budget(base.len(), n_max, budget);
    let mut v = ExtendedVisitor { alpha, stack: Vec::with_capacity(depth), norm: LevelMax::new(depth), error: None };
    for_each_word(base, depth, 0..base.len(), &mut v);
    if let Some(e) = v.error {
        return Err(e);
    }
    let tail: Vec<f64> = (1..=depth).map(|n| exp(alpha.partial_log_sum(n) / n as f64)).collect();
    let gelfand: Vec<f64> = base_report.rows.iter().map(|r| r.gelfand_max).collect();
    let extended = RadiiReport::from_columns(
        alloc::format!("{} (extended)", base.label()),
        &v.norm.values(),
        &gelfand,
        &tail,
        &tail,
        v.norm.words(),
        base_report.gelfand_words.clone(),
        n_max,
    );
    Ok(ExtendedRadii { base: base_report, extended, alpha })
}

/// `(1/n) log ||E(L)^n||` for a single matrix.
pub fn extended_power_rate(l: &Matrix, n: usize, alpha: &AlphaSequence) -> Result<f64> {
    let set = MatrixSet::new(vec![l.clone()], "")?;
    let word = Word::new(vec![0; n], 1)?;
    Ok(extended_log_norm(&ExtendedWord::new(&set, word, *alpha)?)? / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::singular_values;
    use alloc::vec;

    fn mat(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn one(m: Matrix) -> MatrixSet {
        MatrixSet::new(vec![m], "s").unwrap()
    }

    #[test]
    fn alpha_closed_form() {
        let a = AlphaSequence::default();
        let mut s = 0.0;
        for k in 1..50 {
            s += a.log_alpha(k);
            assert!((s - a.partial_log_sum(k)).abs() < 1e-12 * s.abs());
            assert!(a.alpha(k + 1) < a.alpha(k) && a.alpha(k) <= 1.0);
        }
        assert_eq!(a.partial_log_sum(0), 0.0);
        assert!(AlphaSequence::new(0.0).is_err());
    }

    #[test]
    fn zero_operator_extension() {
        let set = one(Matrix::zeros(2, 2));
        let ew = ExtendedWord::new(&set, Word::new(vec![0], 1).unwrap(), AlphaSequence::default()).unwrap();
        assert!((extended_norm(&ew).unwrap() - exp(-2.0)).abs() < 1e-15);
    }

    #[test]
    fn identity_word() {
        let set = one(Matrix::identity(3));
        let ew = ExtendedWord::new(&set, Word::new(vec![0; 4], 1).unwrap(), AlphaSequence::default()).unwrap();
        assert_eq!(extended_norm(&ew).unwrap(), 1.0);
        let ew3 = ExtendedWord::new(&set, Word::new(vec![0; 3], 1).unwrap(), AlphaSequence::default()).unwrap();
        assert!((truncated_extension_norm(&ew3, 8).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nilpotent_pair() {
        let set = one(mat(&[&[0.0, 1.0], &[0.0, 0.0]]));
        let ew = ExtendedWord::new(&set, Word::new(vec![0, 0], 1).unwrap(), AlphaSequence::default()).unwrap();
        assert!((extended_norm(&ew).unwrap() - exp(-2.0)).abs() < 1e-15);
        assert!((truncated_extension_norm(&ew, 3).unwrap() - exp(-2.0)).abs() < 1e-12);
        assert!(truncated_extension_norm(&ew, 2).is_err());
    }

    #[test]
    fn seminorm_examples() {
        let alpha = AlphaSequence::default();
        let s = OperatorFamily::new(vec![ShiftFinRankOperator::shift(1.0, 1).unwrap()], "S").unwrap();
        let ew = ExtendedWord::new(&s, Word::new(vec![0], 1).unwrap(), alpha).unwrap();
        assert_eq!(extended_seminorm_f(&ew).unwrap(), 1.0);
        let f = OperatorFamily::new(vec![ShiftFinRankOperator::finite_rank(&[(0, 0, 5.0)]).unwrap()], "F").unwrap();
        let ew = ExtendedWord::new(&f, Word::new(vec![0], 1).unwrap(), alpha).unwrap();
        assert!((extended_seminorm_f(&ew).unwrap() - alpha.alpha(1)).abs() < 1e-15);
        let m = one(mat(&[&[3.0, 1.0], &[0.5, 2.0]]));
        let ew = ExtendedWord::new(&m, Word::new(vec![0; 4], 1).unwrap(), alpha).unwrap();
        assert!((extended_seminorm_f(&ew).unwrap() - exp(alpha.partial_log_sum(4))).abs() < 1e-20);
    }

    #[test]
    fn injectivity_of_zero_extension() {
        let alpha = AlphaSequence::default();
        let levels = 6;
        let e = truncated_extension_matrix(&Matrix::zeros(2, 2), &alpha, levels).unwrap();
        // drop the last block column, which the truncation cuts off
        let mut sub = Matrix::zeros(e.rows(), e.cols() - 2);
        for r in 0..e.rows() {
            for c in 0..sub.cols() {
                sub[(r, c)] = e[(r, c)];
            }
        }
        let smallest = singular_values(&sub).unwrap().smallest();
        assert!(smallest >= alpha.alpha(levels - 1) * (1.0 - 1e-12));
    }

    #[test]
    fn truncated_spectrum_matches_base() {
        let set =
            MatrixSet::new(vec![mat(&[&[1.0, 1.0], &[0.0, 1.0]]), mat(&[&[1.0, 0.0], &[1.0, 1.0]])], "g").unwrap();
        let ew = ExtendedWord::new(&set, Word::new(vec![0, 1, 1], 2).unwrap(), AlphaSequence::default()).unwrap();
        let t = truncated_extension_product(&ew, 6).unwrap();
        let lhs = spectral_radius(&t).unwrap();
        let rhs = extended_spectral_radius(&ew).unwrap();
        assert!((lhs - rhs).abs() < 1e-10 * rhs);
    }

    #[test]
    fn alpha_property_generators() {
        let a = AlphaSequence::default();
        for slope in [-1.0, 0.0, 0.7] {
            let r =
                verify_alpha_property(&SubadditiveGenerator::Linear { slope, intercept: 0.0 }, 10_000, &a, 1).unwrap();
            assert!(r.passed && r.difference.abs() <= 0.01, "{r:?}");
        }
        let q = verify_alpha_property(&SubadditiveGenerator::NegQuadratic, 10_000, &a, 1).unwrap();
        assert!(q.diverges && q.direct < -1e3 && q.weighted < -1e3);
        let bad = SubadditiveGenerator::Linear { slope: 1.0, intercept: -1.0 };
        assert!(matches!(verify_alpha_property(&bad, 100, &a, 1), Err(Error::NotSubadditive { .. })));
    }

    #[test]
    fn extended_radii_of_zero_and_diagonal() {
        let a = AlphaSequence::default();
        let z = extended_radii(&one(Matrix::zeros(2, 2)), 5, 1000, a).unwrap();
        assert_eq!(z.base.rho_hat(), 0.0);
        for r in &z.extended.rows {
            let n = r.n as f64;
            assert!((r.norm_sup - exp(-(n + 3.0) / 2.0)).abs() < 1e-14);
        }
        let d = extended_radii(&one(Matrix::diag(&[2.0])), 8, 1000, a).unwrap();
        assert!(d.rho_columns_equal());
        for r in &d.extended.rows {
            assert!((r.norm_sup - 2.0).abs() < 1e-12);
        }
    }
}
