//! Per-length growth columns and the certified bounds derived from them.

use alloc::string::String;
use alloc::vec::Vec;

use crate::linalg::approx_eq;
use crate::words::Word;

/// One row of a radii report, for products of length `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiiRow {
    pub n: usize,
    /// `sup ||P||^(1/n)` over products of length `n`.
    pub norm_sup: f64,
    /// `max rho(P)^(1/n)` over products of length `n`.
    pub gelfand_max: f64,
    /// Running infimum of `norm_sup`: certified upper bound for the joint spectral radius.
    pub upper: f64,
    /// Running maximum of `gelfand_max`: certified lower bound.
    pub lower: f64,
    pub gap: f64,
    /// `sup ||P||_f^(1/n)`.
    pub f_sup: f64,
    /// `sup ||P||_chi^(1/n)`.
    pub chi_sup: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiiReport {
    pub label: String,
    pub rows: Vec<RadiiRow>,
    /// Lexicographically least maximizing word per length, for `norm_sup`.
    pub norm_words: Vec<Word>,
    /// Same for `gelfand_max`.
    pub gelfand_words: Vec<Word>,
    /// Lengths requested; `rows.len()` is smaller when the budget ran out.
    pub requested_n_max: usize,
    pub complete: bool,
}

/// Running infimum of a column.
pub fn running_inf(values: &[f64]) -> Vec<f64> {
    let mut acc = f64::INFINITY;
    values
        .iter()
        .map(|&v| {
            acc = acc.min(v);
            acc
        })
        .collect()
}

/// Running maximum of a column.
pub fn running_max(values: &[f64]) -> Vec<f64> {
    let mut acc = f64::NEG_INFINITY;
    values
        .iter()
        .map(|&v| {
            acc = acc.max(v);
            acc
        })
        .collect()
}

impl RadiiReport {
    /// Assembles rows from per-length columns. `f_sup` and `chi_sup` may be
    /// empty, meaning identically zero (finite dimension).
    pub fn from_columns(
        label: String,
        norm_sup: &[f64],
        gelfand_max: &[f64],
        f_sup: &[f64],
        chi_sup: &[f64],
        norm_words: Vec<Word>,
        gelfand_words: Vec<Word>,
        requested_n_max: usize,
    ) -> Self {
        let upper = running_inf(norm_sup);
        let lower = running_max(gelfand_max);
        let rows = (0..norm_sup.len())
            .map(|i| {
                let raw = upper[i] - lower[i];
                // equality cases (e.g. rho(P) = ||P||) can round one ulp the wrong way
                let gap = if raw < 0.0 && approx_eq(upper[i], lower[i]) { 0.0 } else { raw };
                RadiiRow {
                    n: i + 1,
                    norm_sup: norm_sup[i],
                    gelfand_max: gelfand_max[i],
                    upper: upper[i],
                    lower: lower[i],
                    gap,
                    f_sup: f_sup.get(i).copied().unwrap_or(0.0),
                    chi_sup: chi_sup.get(i).copied().unwrap_or(0.0),
                }
            })
            .collect::<Vec<_>>();
        let complete = rows.len() == requested_n_max;
        RadiiReport { label, rows, norm_words, gelfand_words, requested_n_max, complete }
    }

    fn last(&self) -> Option<&RadiiRow> {
        self.rows.last()
    }

    /// Upper estimate of the joint spectral radius (running infimum).
    pub fn rho_hat(&self) -> f64 {
        self.last().map_or(f64::INFINITY, |r| r.upper)
    }

    /// Lower estimate (running maximum of the Gelfand column).
    pub fn rho_r(&self) -> f64 {
        self.last().map_or(0.0, |r| r.lower)
    }

    pub fn rho_f(&self) -> f64 {
        self.rows.iter().map(|r| r.f_sup).reduce(f64::min).unwrap_or(0.0)
    }

    pub fn rho_chi(&self) -> f64 {
        self.rows.iter().map(|r| r.chi_sup).reduce(f64::min).unwrap_or(0.0)
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.gap).collect()
    }

    /// `lower <= upper` at every length, within the crate tolerance.
    pub fn bounds_ordered(&self) -> bool {
        self.rows.iter().all(|r| r.lower <= r.upper || approx_eq(r.lower, r.upper))
    }

    /// `|rho_hat - max(rho_chi, rho_r)|`.
    pub fn generalized_berger_wang_residual(&self) -> f64 {
        (self.rho_hat() - self.rho_chi().max(self.rho_r())).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn running_bounds() {
        assert_eq!(running_inf(&[3.0, 1.0, 2.0]), vec![3.0, 1.0, 1.0]);
        assert_eq!(running_max(&[0.5, 0.2, 0.7]), vec![0.5, 0.5, 0.7]);
    }

    #[test]
    fn rows_from_columns() {
        let r = RadiiReport::from_columns("t".into(), &[2.0, 1.5], &[1.0, 1.2], &[], &[], vec![], vec![], 3);
        assert!(!r.complete);
        assert_eq!(r.rows[1].upper, 1.5);
        assert_eq!(r.rows[1].lower, 1.2);
        assert!((r.rows[1].gap - 0.3).abs() < 1e-15);
        assert_eq!(r.rho_chi(), 0.0);
        assert!(r.bounds_ordered());
    }
}
