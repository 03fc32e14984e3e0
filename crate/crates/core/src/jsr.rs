//! Joint spectral radius bounds for finite sets of matrices.
//!
//! For every length `n` the exhaustive scan computes `sup ||P||^(1/n)` and
//! `max rho(P)^(1/n)` over the products `P` of length `n`. The running
//! infimum of the first column bounds the joint spectral radius from above
//! (submultiplicativity), the running maximum of the second bounds it from
//! below, and the Berger-Wang theorem says the two meet in the limit.
//!
//! `gripenberg_bounds` tightens the same bracket with a breadth-first
//! branch-and-bound over the word tree.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{operator_norm, spectral_radius, Matrix};
use crate::math::nth_root;
use crate::radii::{running_inf, running_max, RadiiReport};
pub use crate::words::Word;
use crate::words::{for_each_word, levels_within_budget, LevelMax, WordAlphabet, WordVisitor};

/// Default cap on the number of products an exhaustive scan may evaluate.
pub const DEFAULT_BUDGET: u64 = 20_000_000;

/// Nonempty finite set of square matrices of a common size.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSet {
    dim: usize,
    members: Vec<Matrix>,
    label: String,
}

impl MatrixSet {
    pub fn new(members: Vec<Matrix>, label: impl Into<String>) -> Result<Self> {
        let first = members.first().ok_or_else(|| Error::Validation("matrix set is empty".into()))?;
        let dim = first.rows();
        for m in &members {
            m.require_square()?;
            if m.rows() != dim {
                return Err(Error::Dimension { expected: dim, found: m.rows() });
            }
            m.require_finite()?;
        }
        Ok(MatrixSet { dim, members, label: label.into() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn members(&self) -> &[Matrix] {
        &self.members
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Every member multiplied by `c`.
    pub fn scaled(&self, c: f64) -> MatrixSet {
        MatrixSet {
            dim: self.dim,
            members: self.members.iter().map(|m| m.scale(c)).collect(),
            label: self.label.clone(),
        }
    }

    /// Rescales by the largest member norm so that `sup ||A|| = 1`.
    /// Returns the set and the factor that was divided out.
    pub fn normalized(&self) -> Result<(MatrixSet, f64)> {
        let mut s = 0.0f64;
        for m in &self.members {
            s = s.max(operator_norm(m)?);
        }
        if s == 0.0 {
            return Ok((self.clone(), 1.0));
        }
        Ok((self.scaled(1.0 / s), s))
    }

    /// All products of length `k`, as a new set (in word order).
    pub fn power_set(&self, k: usize) -> Result<MatrixSet> {
        if k == 0 {
            return Err(Error::Validation("power must be at least 1".into()));
        }
        struct Gather(Vec<Matrix>, usize);
        impl WordVisitor<Matrix> for Gather {
            fn visit(&mut self, word: &[usize], elem: &Matrix) {
                if word.len() == self.1 {
                    self.0.push(elem.clone());
                }
            }
        }
        // no zero pruning here: every word is wanted
        let plain = Unpruned(self);
        let mut g = Gather(Vec::new(), k);
        for_each_word(&plain, k, 0..self.len(), &mut g);
        MatrixSet::new(g.0, self.label.clone())
    }
}

struct Unpruned<'a>(&'a MatrixSet);

impl WordAlphabet for Unpruned<'_> {
    type Elem = Matrix;
    fn size(&self) -> usize {
        self.0.len()
    }
    fn letter(&self, i: usize) -> Matrix {
        self.0.members[i].clone()
    }
    fn append(&self, prefix: &Matrix, letter: usize) -> Matrix {
        self.0.members[letter].mul(prefix)
    }
}

impl WordAlphabet for MatrixSet {
    type Elem = Matrix;

    fn size(&self) -> usize {
        self.members.len()
    }

    fn letter(&self, i: usize) -> Matrix {
        self.members[i].clone()
    }

    fn append(&self, prefix: &Matrix, letter: usize) -> Matrix {
        self.members[letter].mul(prefix)
    }

    fn is_zero(&self, elem: &Matrix) -> bool {
        elem.is_zero()
    }
}

/// The ordered product `A_{i_n} ... A_{i_1}` of a word `(i_1, ..., i_n)`.
pub fn product_of_word(set: &MatrixSet, word: &Word) -> Result<Matrix> {
    set.product(word)
}

/// One certified column: per-length values plus their running bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundColumn {
    pub per_n: Vec<f64>,
    pub running: Vec<f64>,
    pub words: Vec<Word>,
    pub complete: bool,
}

impl BoundColumn {
    /// Final running bound; `None` if not even length 1 fit in the budget.
    pub fn bound(&self) -> Option<f64> {
        self.running.last().copied()
    }
}

/// Raw per-level maxima of the exhaustive scan.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelScan {
    pub norm: LevelMax,
    pub gelfand: LevelMax,
    pub depth: usize,
    pub requested: usize,
}

struct ScanVisitor {
    norm: LevelMax,
    gelfand: LevelMax,
    error: Option<Error>,
}

impl WordVisitor<Matrix> for ScanVisitor {
    fn visit(&mut self, word: &[usize], elem: &Matrix) {
        if self.error.is_some() {
            return;
        }
        let n = word.len();
        let measured = elem.require_finite().and_then(|_| Ok((operator_norm(elem)?, spectral_radius(elem)?)));
        match measured {
            Ok((norm, rho)) => {
                self.norm.offer(word, nth_root(norm, n));
                self.gelfand.offer(word, nth_root(rho, n));
            }
            Err(e) => self.error = Some(e),
        }
    }

    fn zero_subtree(&mut self, prefix: &[usize], depth: usize) {
        self.norm.offer_subtree(prefix, depth, 0.0);
        self.gelfand.offer_subtree(prefix, depth, 0.0);
    }
}

/// Exhaustive scan of the subtree(s) rooted at `first_letters`, limited to
/// `depth` levels. Scans over disjoint letter ranges merge with
/// [`LevelScan::merge`] into the same result as a single scan.
pub fn scan_subtrees(set: &MatrixSet, depth: usize, first_letters: core::ops::Range<usize>) -> Result<LevelScan> {
    let mut v = ScanVisitor { norm: LevelMax::new(depth), gelfand: LevelMax::new(depth), error: None };
    for_each_word(set, depth, first_letters, &mut v);
    if let Some(e) = v.error {
        return Err(e);
    }
    Ok(LevelScan { norm: v.norm, gelfand: v.gelfand, depth, requested: depth })
}

impl LevelScan {
    pub fn merge(&mut self, other: &LevelScan) {
        self.norm.merge(&other.norm);
        self.gelfand.merge(&other.gelfand);
    }

    pub fn into_report(self, label: &str) -> RadiiReport {
        RadiiReport::from_columns(
            label.into(),
            &self.norm.values(),
            &self.gelfand.values(),
            &[],
            &[],
            self.norm.words(),
            self.gelfand.words(),
            self.requested,
        )
    }
}

/// Exhaustive scan up to `n_max`, truncated to the levels that fit in `budget`.
pub fn scan(set: &MatrixSet, n_max: usize, budget: u64) -> Result<LevelScan> {
    if n_max == 0 {
        return Err(Error::Validation("n_max must be at least 1".into()));
    }
    let depth = levels_within_budget(set.len(), n_max, budget);
    let mut s = scan_subtrees(set, depth, 0..set.len())?;
    s.requested = n_max;
    Ok(s)
}

/// Exact `sup ||P||^(1/n)` per length and its running infimum.
pub fn norm_upper_bound(set: &MatrixSet, n_max: usize, budget: u64) -> Result<BoundColumn> {
    let s = scan(set, n_max, budget)?;
    let per_n = s.norm.values();
    Ok(BoundColumn { running: running_inf(&per_n), per_n, words: s.norm.words(), complete: s.depth == n_max })
}

/// Exact `max rho(P)^(1/n)` per length and its running maximum.
pub fn gelfand_lower_bound(set: &MatrixSet, n_max: usize, budget: u64) -> Result<BoundColumn> {
    let s = scan(set, n_max, budget)?;
    let per_n = s.gelfand.values();
    Ok(BoundColumn { running: running_max(&per_n), per_n, words: s.gelfand.words(), complete: s.depth == n_max })
}

/// Combined upper/lower report. `rho_chi` and `rho_f` are identically zero
/// for matrices: every finite-dimensional operator is compact and of finite rank.
pub fn bw_report(set: &MatrixSet, n_max: usize, budget: u64) -> Result<RadiiReport> {
    let report = scan(set, n_max, budget)?.into_report(set.label());
    debug_assert!(report.bounds_ordered());
    Ok(report)
}

/// Certified bracket from the branch-and-bound search.
#[derive(Debug, Clone, PartialEq)]
pub struct GripenbergBounds {
    pub lower: f64,
    pub upper: f64,
    /// Shortlex-least word attaining `lower`.
    pub lower_word: Word,
    /// Products evaluated.
    pub nodes: u64,
    /// Deepest level expanded.
    pub depth: usize,
    /// `upper - lower <= delta` was reached before the budget ran out.
    pub converged: bool,
}

impl GripenbergBounds {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

struct Node {
    word: Vec<usize>,
    product: Matrix,
    /// `min` over prefixes `Q` of `||Q||^(1/|Q|)`.
    bound: f64,
}

/// Branch-and-bound bracket `[lower, upper]` for the joint spectral radius.
///
/// Every infinite word can be cut into blocks, each ending at a leaf of the
/// explored tree (a pruned node or a node of the current frontier). A block
/// through a leaf `w` has norm at most `bound(w)^len`, where `bound(w)` is the
/// least `||Q||^(1/|Q|)` over prefixes `Q` of `w`, so the largest leaf bound
/// caps the joint spectral radius. Nodes with `bound <= lower + delta` cannot
/// improve the bracket and are not expanded. The search is breadth first so
/// the lower bound rises before deeper levels are judged.
pub fn gripenberg_bounds(set: &MatrixSet, delta: f64, budget: u64) -> Result<GripenbergBounds> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Validation("delta must be a positive finite number".into()));
    }
    let m = set.len();
    let mut lower = 0.0f64;
    let mut lower_word: Vec<usize> = alloc::vec![0];
    let mut leaf_max = 0.0f64;
    let mut nodes = 0u64;
    let mut depth = 1usize;

    let mut level: Vec<Node> = Vec::with_capacity(m);
    for i in 0..m {
        let product = set.members[i].clone();
        let norm = operator_norm(&product)?;
        let rho = spectral_radius(&product)?;
        nodes += 1;
        if rho > lower {
            lower = rho;
            lower_word = alloc::vec![i];
        }
        level.push(Node { word: alloc::vec![i], product, bound: norm });
    }

    let mut exhausted = false;
    loop {
        let mut frontier = Vec::with_capacity(level.len());
        for node in level {
            if node.bound <= lower + delta || node.product.is_zero() {
                leaf_max = leaf_max.max(node.bound);
            } else {
                frontier.push(node);
            }
        }
        if frontier.is_empty() {
            break;
        }
        if nodes.saturating_add((frontier.len() as u64).saturating_mul(m as u64)) > budget {
            leaf_max = frontier.iter().fold(leaf_max, |acc, nd| acc.max(nd.bound));
            exhausted = true;
            break;
        }
        depth += 1;
        let mut next = Vec::with_capacity(frontier.len() * m);
        for node in &frontier {
            for i in 0..m {
                let product = set.members[i].mul(&node.product);
                product.require_finite()?;
                let norm_root = nth_root(operator_norm(&product)?, depth);
                let rho_root = nth_root(spectral_radius(&product)?, depth);
                nodes += 1;
                let mut word = node.word.clone();
                word.push(i);
                if rho_root > lower {
                    lower = rho_root;
                    lower_word = word.clone();
                }
                next.push(Node { word, product, bound: node.bound.min(norm_root) });
            }
        }
        level = next;
    }

    // the leaf bound dominates rho(P)^(1/n) analytically; rounding can flip ties
    let upper = leaf_max.max(lower);
    Ok(GripenbergBounds {
        lower,
        upper,
        lower_word: Word::from_indices_unchecked(lower_word),
        nodes,
        depth,
        converged: !exhausted && upper - lower <= delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::sqrt;
    use alloc::vec;

    fn mat(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn golden() -> MatrixSet {
        MatrixSet::new(vec![mat(&[&[1.0, 1.0], &[0.0, 1.0]]), mat(&[&[1.0, 0.0], &[1.0, 1.0]])], "golden").unwrap()
    }

    #[test]
    fn set_validation() {
        assert!(MatrixSet::new(vec![], "e").is_err());
        assert!(MatrixSet::new(vec![Matrix::identity(2), Matrix::identity(3)], "x").is_err());
        assert!(MatrixSet::new(vec![Matrix::zeros(2, 3)], "x").is_err());
    }

    #[test]
    fn product_convention() {
        let s = golden();
        let w = Word::new(vec![0, 1], 2).unwrap();
        // B A, not A B
        assert_eq!(product_of_word(&s, &w).unwrap(), mat(&[&[1.0, 1.0], &[1.0, 2.0]]));
        let a = mat(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let single = MatrixSet::new(vec![a.clone()], "a").unwrap();
        assert_eq!(product_of_word(&single, &Word::new(vec![0, 0, 0], 1).unwrap()).unwrap(), a.pow(3));
        assert!(matches!(
            product_of_word(&s, &Word::from_indices_unchecked(vec![0, 5])),
            Err(Error::IndexOutOfRange { index: 5, len: 2 })
        ));
    }

    #[test]
    fn diagonal_singleton_bounds() {
        let s = MatrixSet::new(vec![Matrix::diag(&[2.0, 0.5])], "d").unwrap();
        let up = norm_upper_bound(&s, 6, DEFAULT_BUDGET).unwrap();
        for v in &up.running {
            assert!((v - 2.0).abs() < 1e-14);
        }
        let g = gripenberg_bounds(&s, 0.01, 1000).unwrap();
        assert!((g.lower - 2.0).abs() < 1e-14 && (g.upper - 2.0).abs() < 1e-14 && g.converged);
    }

    #[test]
    fn nilpotent_singleton() {
        let s = MatrixSet::new(vec![mat(&[&[0.0, 2.0], &[0.0, 0.0]])], "n").unwrap();
        let up = norm_upper_bound(&s, 4, DEFAULT_BUDGET).unwrap();
        assert!((up.per_n[0] - 2.0).abs() < 1e-15);
        assert_eq!(up.per_n[1], 0.0);
        assert_eq!(up.bound(), Some(0.0));
        let lo = gelfand_lower_bound(&s, 4, DEFAULT_BUDGET).unwrap();
        assert!(lo.per_n.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_matrix_gripenberg() {
        let s = MatrixSet::new(vec![Matrix::zeros(2, 2)], "z").unwrap();
        let g = gripenberg_bounds(&s, 0.01, 100).unwrap();
        assert_eq!((g.lower, g.upper), (0.0, 0.0));
    }

    #[test]
    fn golden_pair_second_level() {
        let phi = (1.0 + sqrt(5.0)) / 2.0;
        let lo = gelfand_lower_bound(&golden(), 2, DEFAULT_BUDGET).unwrap();
        assert!((lo.per_n[1] - phi).abs() < 1e-12);
        assert_eq!(lo.words[1].indices(), &[0, 1]);
    }

    #[test]
    fn budget_truncates_levels() {
        let r = bw_report(&golden(), 12, 30).unwrap();
        assert!(!r.complete);
        // 2 + 4 + 8 + 16 = 30 products
        assert_eq!(r.rows.len(), 4);
        assert_eq!(r.requested_n_max, 12);
    }

    #[test]
    fn gripenberg_budget_exhaustion_is_flagged() {
        let s =
            MatrixSet::new(vec![mat(&[&[0.9, 0.7], &[-0.3, 0.4]]), mat(&[&[0.2, -0.8], &[0.6, 0.5]])], "r").unwrap();
        let g = gripenberg_bounds(&s, 1e-9, 50).unwrap();
        assert!(!g.converged);
        assert!(g.lower <= g.upper);
        assert!(gripenberg_bounds(&s, 0.0, 50).is_err());
    }

    #[test]
    fn power_set_has_all_products() {
        let p = golden().power_set(2).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.members()[1], mat(&[&[1.0, 1.0], &[1.0, 2.0]]));
    }
}
