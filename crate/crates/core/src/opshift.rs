//! Operators on `l2(N)` of the form `L = F + D S^m`.
//!
//! `F` is a finitely supported matrix (finite rank), `S` is the forward
//! shift `S e_i = e_{i+1}` and `D S^m` sends `e_i` to `d_i e_{i+m}`, where the
//! weights `d_i` follow a finite prefix and equal the tail weight `w`
//! afterwards. Indices are zero-based.
//!
//! The class is closed under composition and every quantity the radii need
//! has an exact finite description:
//!
//! * Past the structural bound `J = max(support of F, prefix length)` every
//!   column of `L` is a single entry `w` in row `j + m`, and these columns are
//!   orthogonal to each other and to the first `J` columns. Hence
//!   `L*L = C (+) w^2 I` with `C` the Gram matrix of the first `J` columns and
//!   `||L|| = max(sigma_max(corner), w)`.
//! * Modulo compact operators `L` equals `w S^m`, so `||L||_chi = ||L||_f = w`
//!   on Hilbert space, and the essential spectral radius is `w`.
//! * With respect to `span(e_0..e_{K-1}) (+)` its complement (`K >= J`), `L`
//!   is block lower triangular with a tail block of spectral radius `w`, so
//!   the spectrum outside the disc of radius `w` is that of the `K x K`
//!   truncation.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, operator_norm, Matrix};
use crate::math::nth_root;
use crate::radii::RadiiReport;
use crate::words::{for_each_word, levels_within_budget, LevelMax, WordAlphabet, WordVisitor};

/// Largest truncation used when stabilizing the discrete spectrum.
pub const TRUNCATION_CAP: usize = 4096;

/// `F + D S^m` in canonical form: no stored zeros in `F`, no trailing
/// prefix weights equal to the tail weight, and `m = 0` whenever the
/// weighted-shift part vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftFinRankOperator {
    finite_part: BTreeMap<(usize, usize), f64>,
    diag_prefix: Vec<f64>,
    tail_weight: f64,
    shift_power: usize,
}

impl ShiftFinRankOperator {
    /// Duplicate `(row, col)` entries are summed.
    pub fn new(
        entries: &[(usize, usize, f64)],
        diag_prefix: Vec<f64>,
        tail_weight: f64,
        shift_power: usize,
    ) -> Result<Self> {
        if !tail_weight.is_finite() || tail_weight < 0.0 {
            return Err(Error::Validation("tail weight must be finite and nonnegative".into()));
        }
        if let Some(index) = diag_prefix.iter().position(|d| !d.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let mut finite_part = BTreeMap::new();
        for (k, &(r, c, v)) in entries.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index: k });
            }
            *finite_part.entry((r, c)).or_insert(0.0) += v;
        }
        Ok(ShiftFinRankOperator { finite_part, diag_prefix, tail_weight, shift_power }.canonical())
    }

    /// `w S^m`.
    pub fn shift(weight: f64, power: usize) -> Result<Self> {
        Self::new(&[], Vec::new(), weight, power)
    }

    pub fn finite_rank(entries: &[(usize, usize, f64)]) -> Result<Self> {
        Self::new(entries, Vec::new(), 0.0, 0)
    }

    pub fn identity() -> Self {
        ShiftFinRankOperator { finite_part: BTreeMap::new(), diag_prefix: Vec::new(), tail_weight: 1.0, shift_power: 0 }
    }

    fn canonical(mut self) -> Self {
        self.finite_part.retain(|_, v| *v != 0.0);
        while self.diag_prefix.last() == Some(&self.tail_weight) {
            self.diag_prefix.pop();
        }
        if self.tail_weight == 0.0 && self.diag_prefix.is_empty() {
            self.shift_power = 0;
        }
        self
    }

    pub fn finite_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.finite_part.iter().map(|(&(r, c), &v)| (r, c, v))
    }

    pub fn diag_prefix(&self) -> &[f64] {
        &self.diag_prefix
    }

    pub fn tail_weight(&self) -> f64 {
        self.tail_weight
    }

    pub fn shift_power(&self) -> usize {
        self.shift_power
    }

    /// Weight `d_i` of the shift part.
    pub fn weight(&self, i: usize) -> f64 {
        self.diag_prefix.get(i).copied().unwrap_or(self.tail_weight)
    }

    /// One past the largest row or column index used by `F`.
    pub fn support_bound(&self) -> usize {
        self.finite_part.keys().map(|&(r, c)| r.max(c) + 1).max().unwrap_or(0)
    }

    /// Columns at or beyond this index are `w e_{j+m}`.
    pub fn structural_bound(&self) -> usize {
        self.support_bound().max(self.diag_prefix.len())
    }

    /// Truncation size used for the spectrum: finite support plus shift plus prefix.
    pub fn truncation_base(&self) -> usize {
        (self.support_bound() + self.shift_power + self.diag_prefix.len()).max(1)
    }

    pub fn is_zero(&self) -> bool {
        self.finite_part.is_empty() && self.tail_weight == 0.0 && self.diag_prefix.iter().all(|&d| d == 0.0)
    }

    /// `L e_i` as a sparse vector.
    pub fn apply_basis(&self, i: usize) -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for (&(r, c), &v) in &self.finite_part {
            if c == i {
                *out.entry(r).or_insert(0.0) += v;
            }
        }
        let d = self.weight(i);
        if d != 0.0 {
            *out.entry(i + self.shift_power).or_insert(0.0) += d;
        }
        out.retain(|_, v| *v != 0.0);
        out
    }

    /// `L x` for a finitely supported `x`.
    pub fn apply(&self, x: &BTreeMap<usize, f64>) -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for (&i, &xi) in x {
            for (r, v) in self.apply_basis(i) {
                *out.entry(r).or_insert(0.0) += v * xi;
            }
        }
        out
    }

    /// Compression `P_n L P_n` as a dense `n x n` matrix.
    pub fn dense_truncation(&self, n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for (&(r, c), &v) in &self.finite_part {
            if r < n && c < n {
                m[(r, c)] += v;
            }
        }
        for c in 0..n.saturating_sub(self.shift_power) {
            m[(c + self.shift_power, c)] += self.weight(c);
        }
        m
    }

    /// `a * self + b * other`. Shift powers must agree unless one side has
    /// zero tail weight, and the resulting tail weight must be nonnegative.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        let x = self.with_finite_shift_folded();
        let y = other.with_finite_shift_folded();
        let m = match (x.tail_weight == 0.0, y.tail_weight == 0.0) {
            (true, true) => 0,
            (true, false) => y.shift_power,
            (false, true) => x.shift_power,
            (false, false) if x.shift_power == y.shift_power => x.shift_power,
            _ => return Err(Error::Validation("shift powers differ".into())),
        };
        let tail = a * x.tail_weight + b * y.tail_weight;
        if tail < 0.0 {
            return Err(Error::Validation("combination has a negative tail weight".into()));
        }
        let t = x.diag_prefix.len().max(y.diag_prefix.len());
        let prefix = (0..t).map(|i| a * x.weight(i) + b * y.weight(i)).collect();
        let mut entries: Vec<(usize, usize, f64)> = x.finite_entries().map(|(r, c, v)| (r, c, a * v)).collect();
        entries.extend(y.finite_entries().map(|(r, c, v)| (r, c, b * v)));
        Self::new(&entries, prefix, tail, m)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.combine(c, &Self::finite_rank(&[]).expect("zero operator"), 0.0)
    }

    /// With zero tail weight the shift part is finite rank; move it into `F`.
    fn with_finite_shift_folded(&self) -> Self {
        if self.tail_weight != 0.0 || self.diag_prefix.is_empty() {
            return self.clone();
        }
        let mut f = self.finite_part.clone();
        for (i, &d) in self.diag_prefix.iter().enumerate() {
            *f.entry((i + self.shift_power, i)).or_insert(0.0) += d;
        }
        ShiftFinRankOperator { finite_part: f, diag_prefix: Vec::new(), tail_weight: 0.0, shift_power: 0 }.canonical()
    }
}

/// `l1 o l2`, exactly.
pub fn compose(l1: &ShiftFinRankOperator, l2: &ShiftFinRankOperator) -> ShiftFinRankOperator {
    let (m1, m2) = (l1.shift_power, l2.shift_power);
    let mut f: BTreeMap<(usize, usize), f64> = BTreeMap::new();

    // F1 F2
    let mut f2_by_row: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    for (&(r, c), &v) in &l2.finite_part {
        f2_by_row.entry(r).or_default().push((c, v));
    }
    for (&(r, k), &v1) in &l1.finite_part {
        if let Some(row) = f2_by_row.get(&k) {
            for &(c, v2) in row {
                *f.entry((r, c)).or_insert(0.0) += v1 * v2;
            }
        }
    }
    // F1 W2: W2 e_c = w2(c) e_{c+m2}
    for (&(r, k), &v1) in &l1.finite_part {
        if k >= m2 {
            let c = k - m2;
            *f.entry((r, c)).or_insert(0.0) += v1 * l2.weight(c);
        }
    }
    // W1 F2: W1 e_r = w1(r) e_{r+m1}
    for (&(r, c), &v2) in &l2.finite_part {
        *f.entry((r + m1, c)).or_insert(0.0) += l1.weight(r) * v2;
    }
    // W1 W2: e_i -> w2(i) w1(i+m2) e_{i+m1+m2}
    let t = l2.diag_prefix.len().max(l1.diag_prefix.len().saturating_sub(m2));
    let prefix = (0..t).map(|i| l1.weight(i + m2) * l2.weight(i)).collect();

    ShiftFinRankOperator {
        finite_part: f,
        diag_prefix: prefix,
        tail_weight: l1.tail_weight * l2.tail_weight,
        shift_power: m1 + m2,
    }
    .canonical()
}

/// Exact operator norm on `l2`.
pub fn op_norm(l: &ShiftFinRankOperator) -> Result<f64> {
    let j = l.structural_bound();
    if j == 0 {
        return Ok(l.tail_weight);
    }
    let rows = j + l.shift_power;
    let mut corner = Matrix::zeros(rows, j);
    for (&(r, c), &v) in &l.finite_part {
        corner[(r, c)] += v;
    }
    for c in 0..j {
        corner[(c + l.shift_power, c)] += l.weight(c);
    }
    Ok(operator_norm(&corner)?.max(l.tail_weight))
}

/// Distance to the finite-rank operators: the tail weight.
pub fn seminorm_f(l: &ShiftFinRankOperator) -> f64 {
    l.tail_weight
}

/// Hausdorff measure of noncompactness. On Hilbert space it coincides with
/// the essential norm and hence with [`seminorm_f`].
pub fn seminorm_chi(l: &ShiftFinRankOperator) -> f64 {
    seminorm_f(l)
}

/// Largest eigenvalue modulus strictly above `threshold` of the `n x n`
/// truncation, or 0 if there is none.
fn discrete_radius(l: &ShiftFinRankOperator, n: usize, threshold: f64) -> Result<f64> {
    let eig = eigenvalues(&l.dense_truncation(n))?;
    Ok(eig.iter().map(|z| z.norm()).filter(|&r| r > threshold).fold(0.0, f64::max))
}

/// Spectral radius `max(w, rho_disc)`.
///
/// `w` is the essential spectral radius. `rho_disc` is read off truncations
/// of size `N`, `2N` and `4N` (capped at [`TRUNCATION_CAP`]); eigenvalues not
/// exceeding `w (1 + tol)` are discarded because truncated shifts are
/// nilpotent and say nothing about the essential part. If the discrete value
/// moves by more than `tol` (relative to `max(1, value)`) between sizes, the
/// estimate is rejected with both candidates.
pub fn op_spectral_radius(l: &ShiftFinRankOperator, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Validation("tol must be positive".into()));
    }
    let w = l.tail_weight;
    let threshold = w * (1.0 + tol);
    let base = l.truncation_base().min(TRUNCATION_CAP);
    let sizes = [base, (2 * base).min(TRUNCATION_CAP), (4 * base).min(TRUNCATION_CAP)];
    let mut radii = [0.0f64; 3];
    for (r, &n) in radii.iter_mut().zip(&sizes) {
        *r = discrete_radius(l, n, threshold)?;
    }
    for k in 1..3 {
        let scale = radii[k].max(radii[k - 1]).max(1.0);
        if (radii[k] - radii[k - 1]).abs() > tol * scale {
            return Err(Error::UnstableSpectrum { coarse: radii[k - 1], fine: radii[k] });
        }
    }
    Ok(w.max(radii[2]))
}

/// Nonempty finite family of class members.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorFamily {
    members: Vec<ShiftFinRankOperator>,
    label: String,
}

impl OperatorFamily {
    pub fn new(members: Vec<ShiftFinRankOperator>, label: impl Into<String>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Validation("operator family is empty".into()));
        }
        Ok(OperatorFamily { members, label: label.into() })
    }

    pub fn members(&self) -> &[ShiftFinRankOperator] {
        &self.members
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl WordAlphabet for OperatorFamily {
    type Elem = ShiftFinRankOperator;

    fn size(&self) -> usize {
        self.members.len()
    }

    fn letter(&self, i: usize) -> ShiftFinRankOperator {
        self.members[i].clone()
    }

    fn append(&self, prefix: &ShiftFinRankOperator, letter: usize) -> ShiftFinRankOperator {
        compose(&self.members[letter], prefix)
    }

    fn is_zero(&self, elem: &ShiftFinRankOperator) -> bool {
        elem.is_zero()
    }
}

/// Outcome of [`family_radii`]: the per-length report plus the two identities.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRadii {
    pub report: RadiiReport,
    pub rho_hat: f64,
    pub rho_chi: f64,
    pub rho_f: f64,
    pub rho_r: f64,
    /// `|rho_hat - max(rho_chi, rho_r)|`.
    pub gbwf_residual: f64,
    /// `|rho_chi - rho_f|`.
    pub he_residual: f64,
}

struct FamilyVisitor {
    tol: f64,
    norm: LevelMax,
    gelfand: LevelMax,
    f: LevelMax,
    chi: LevelMax,
    error: Option<Error>,
}

impl WordVisitor<ShiftFinRankOperator> for FamilyVisitor {
    fn visit(&mut self, word: &[usize], elem: &ShiftFinRankOperator) {
        if self.error.is_some() {
            return;
        }
        let n = word.len();
        let measured = op_norm(elem).and_then(|norm| Ok((norm, op_spectral_radius(elem, self.tol)?)));
        match measured {
            Ok((norm, rho)) => {
                self.norm.offer(word, nth_root(norm, n));
                self.gelfand.offer(word, nth_root(rho, n));
                self.f.offer(word, nth_root(seminorm_f(elem), n));
                self.chi.offer(word, nth_root(seminorm_chi(elem), n));
            }
            Err(e) => self.error = Some(e),
        }
    }

    fn zero_subtree(&mut self, prefix: &[usize], depth: usize) {
        for col in [&mut self.norm, &mut self.gelfand, &mut self.f, &mut self.chi] {
            col.offer_subtree(prefix, depth, 0.0);
        }
    }
}

/// All four radii of a family from exact per-word values up to `n_max`.
pub fn family_radii(fam: &OperatorFamily, n_max: usize, budget: u64, tol: f64) -> Result<FamilyRadii> {
    if n_max == 0 {
        return Err(Error::Validation("n_max must be at least 1".into()));
    }
    let depth = levels_within_budget(fam.members.len(), n_max, budget);
    let mut v = FamilyVisitor {
        tol,
        norm: LevelMax::new(depth),
        gelfand: LevelMax::new(depth),
        f: LevelMax::new(depth),
        chi: LevelMax::new(depth),
        error: None,
    };
    for_each_word(fam, depth, 0..fam.members.len(), &mut v);
    if let Some(e) = v.error {
        return Err(e);
    }
    let report = RadiiReport::from_columns(
        fam.label.clone(),
        &v.norm.values(),
        &v.gelfand.values(),
        &v.f.values(),
        &v.chi.values(),
        v.norm.words(),
        v.gelfand.words(),
        n_max,
    );
    let rho_hat = report.rho_hat();
    let rho_chi = report.rho_chi();
    let rho_f = report.rho_f();
    let rho_r = report.rho_r();
    Ok(FamilyRadii {
        gbwf_residual: (rho_hat - rho_chi.max(rho_r)).abs(),
        he_residual: (rho_chi - rho_f).abs(),
        report,
        rho_hat,
        rho_chi,
        rho_f,
        rho_r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::powf;
    use alloc::vec;

    fn halving_prefix(len: usize) -> Vec<f64> {
        (1..=len).map(|i| powf(2.0, -(i as f64))).collect()
    }

    #[test]
    fn canonical_form() {
        let l = ShiftFinRankOperator::new(&[(0, 0, 1.0), (0, 0, -1.0)], vec![2.0, 1.0, 1.0], 1.0, 1).unwrap();
        assert_eq!(l.finite_entries().count(), 0);
        assert_eq!(l.diag_prefix(), &[2.0]);
        let z = ShiftFinRankOperator::new(&[], vec![0.0], 0.0, 3).unwrap();
        assert_eq!(z.shift_power(), 0);
        assert!(ShiftFinRankOperator::shift(-1.0, 1).is_err());
        assert!(ShiftFinRankOperator::new(&[(0, 0, f64::NAN)], vec![], 0.0, 0).is_err());
    }

    #[test]
    fn compose_examples() {
        let s = ShiftFinRankOperator::shift(1.0, 1).unwrap();
        assert_eq!(compose(&s, &s), ShiftFinRankOperator::shift(1.0, 2).unwrap());

        let d1 = ShiftFinRankOperator::new(&[], vec![1.0, 2.0, 3.0], 0.5, 1).unwrap();
        let d2 = ShiftFinRankOperator::new(&[], vec![5.0, 7.0], 0.25, 1).unwrap();
        let p = compose(&d1, &d2);
        assert_eq!(p.shift_power(), 2);
        for i in 0..6 {
            assert_eq!(p.weight(i), d1.weight(i + 1) * d2.weight(i));
        }

        // rank one e_0 (x) e_1 composed with the shift lands on (0, 0)
        let f = ShiftFinRankOperator::finite_rank(&[(0, 1, 1.0)]).unwrap();
        let fs = compose(&f, &s);
        assert_eq!(fs.finite_entries().collect::<Vec<_>>(), vec![(0, 0, 1.0)]);
        assert_eq!(fs.tail_weight(), 0.0);
        assert!(fs.diag_prefix().is_empty());
        assert_eq!(fs.shift_power(), 0);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(op_norm(&ShiftFinRankOperator::shift(1.0, 1).unwrap()).unwrap(), 1.0);
        let d = ShiftFinRankOperator::new(&[], halving_prefix(30), 0.0, 0).unwrap();
        assert!((op_norm(&d).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn seminorm_examples() {
        assert_eq!(seminorm_f(&ShiftFinRankOperator::finite_rank(&[(3, 1, 2.0)]).unwrap()), 0.0);
        assert_eq!(seminorm_f(&ShiftFinRankOperator::shift(1.0, 1).unwrap()), 1.0);
        let d = ShiftFinRankOperator::new(&[], halving_prefix(30), 0.0, 0).unwrap();
        assert_eq!(seminorm_chi(&d), 0.0);
    }

    #[test]
    fn spectral_radius_examples() {
        let s = ShiftFinRankOperator::shift(1.0, 1).unwrap();
        assert_eq!(op_spectral_radius(&s, 1e-9).unwrap(), 1.0);
        let q = ShiftFinRankOperator::new(&[], halving_prefix(30), 0.0, 1).unwrap();
        assert_eq!(op_spectral_radius(&q, 1e-9).unwrap(), 0.0);
        let mixed = ShiftFinRankOperator::new(&[(0, 0, 2.0)], vec![], 0.5, 1).unwrap();
        assert!((op_spectral_radius(&mixed, 1e-9).unwrap() - 2.0).abs() < 1e-12);
        assert!(op_spectral_radius(&mixed, 0.0).is_err());
    }

    #[test]
    fn combine_rules() {
        let a = ShiftFinRankOperator::shift(1.0, 1).unwrap();
        let b = ShiftFinRankOperator::shift(1.0, 2).unwrap();
        assert!(a.combine(1.0, &b, 1.0).is_err());
        assert!(a.combine(1.0, &a, -2.0).is_err());
        let f = ShiftFinRankOperator::new(&[(0, 0, 1.0)], vec![3.0], 0.0, 4).unwrap();
        let sum = a.combine(1.0, &f, 1.0).unwrap();
        assert_eq!(sum.shift_power(), 1);
        for i in 0..8 {
            let lhs = sum.apply_basis(i);
            let mut rhs = a.apply_basis(i);
            for (r, v) in f.apply_basis(i) {
                *rhs.entry(r).or_insert(0.0) += v;
            }
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn empty_family_rejected() {
        assert!(OperatorFamily::new(vec![], "x").is_err());
    }
}
