mod common;

use std::collections::BTreeMap;

use common::*;
use proptest::prelude::*;
use srl_core::cocycle::{
    cohen_gap, equivariance_residual, lyapunov_estimates, CocyclePath, CocycleSpec, DrivingSystem,
};
use srl_core::extend::{
    extended_norm, extended_power_rate, truncated_extension_matrix, truncated_extension_norm, AlphaSequence,
    ExtendedWord,
};
use srl_core::jsr::{bw_report, gripenberg_bounds, MatrixSet, Word, DEFAULT_BUDGET};
use srl_core::linalg::{operator_norm, singular_values, spectral_radius};
use srl_core::opshift::{compose, op_norm, op_spectral_radius, seminorm_f, ShiftFinRankOperator};
use srl_core::Matrix;

fn matrix(d: usize, lo: f64, hi: f64) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(lo..hi, d * d).prop_map(move |v| Matrix::new(d, d, v).unwrap())
}

fn pair_of(d: usize) -> impl Strategy<Value = (Matrix, Matrix)> {
    (matrix(d, -2.0, 2.0), matrix(d, -2.0, 2.0))
}

fn set(k: usize, d: usize) -> impl Strategy<Value = MatrixSet> {
    prop::collection::vec(matrix(d, -1.0, 1.0), k).prop_map(|ms| MatrixSet::new(ms, "p").unwrap())
}

fn operator() -> impl Strategy<Value = ShiftFinRankOperator> {
    any::<u64>().prop_map(|s| random_operator(&mut rng(s), None))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn norm_is_submultiplicative_and_lipschitz((a, b) in (1usize..6).prop_flat_map(pair_of)) {
        let (na, nb) = (operator_norm(&a).unwrap(), operator_norm(&b).unwrap());
        prop_assert!(operator_norm(&a.mul(&b)).unwrap() <= na * nb * (1.0 + 1e-10) + 1e-12);
        prop_assert!((na - nb).abs() <= operator_norm(&a.sub(&b)).unwrap() * (1.0 + 1e-10) + 1e-12);
        prop_assert!(spectral_radius(&a).unwrap() <= na * (1.0 + 1e-10) + 1e-12);
    }

    #[test]
    fn singular_spectrum_invariants(m in (1usize..7).prop_flat_map(|d| matrix(d, -3.0, 3.0))) {
        let s = singular_values(&m).unwrap();
        prop_assert_eq!(s.values.len(), m.rows());
        prop_assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.values.iter().all(|&v| v >= 0.0));
        prop_assert!(close(s.largest(), operator_norm(&m).unwrap(), 1e-12));
    }

    #[test]
    fn spectral_radius_of_powers(m in (1usize..6).prop_flat_map(|d| matrix(d, -1.5, 1.5)), n in 1u32..7) {
        let r = spectral_radius(&m).unwrap();
        let rn = spectral_radius(&m.pow(n)).unwrap();
        prop_assert!((rn - r.powi(n as i32)).abs() <= 1e-8 * rn.max(1e-4), "{} vs {}", rn, r.powi(n as i32));
    }

    #[test]
    fn bw_report_scaling_and_order(s in set(2, 2), c in 0.1f64..5.0) {
        let base = bw_report(&s, 6, DEFAULT_BUDGET).unwrap();
        let scaled = bw_report(&s.scaled(c), 6, DEFAULT_BUDGET).unwrap();
        for (a, b) in base.rows.iter().zip(&scaled.rows) {
            prop_assert!(close(b.norm_sup, c * a.norm_sup, 1e-10));
            prop_assert!(close(b.gelfand_max, c * a.gelfand_max, 1e-9));
        }
        prop_assert!(base.bounds_ordered());
        prop_assert!(base.rows.windows(2).all(|w| w[1].upper <= w[0].upper && w[1].lower >= w[0].lower));
    }

    #[test]
    fn bw_report_permutation_invariance(s in set(3, 2)) {
        let mut ms = s.members().to_vec();
        ms.reverse();
        let p = MatrixSet::new(ms, "rev").unwrap();
        let a = bw_report(&s, 5, DEFAULT_BUDGET).unwrap();
        let b = bw_report(&p, 5, DEFAULT_BUDGET).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            prop_assert_eq!(x.norm_sup, y.norm_sup);
            prop_assert_eq!(x.gelfand_max, y.gelfand_max);
        }
    }

    #[test]
    fn gripenberg_brackets_exhaustive(s in set(2, 2)) {
        let g = gripenberg_bounds(&s, 0.05, 200_000).unwrap();
        let rep = bw_report(&s, 8, DEFAULT_BUDGET).unwrap();
        for row in &rep.rows {
            prop_assert!(g.lower <= row.upper + 1e-12);
            prop_assert!(row.lower <= g.upper + 1e-12);
        }
    }

    #[test]
    fn power_set_brackets_overlap(s in set(2, 2), k in 2usize..4) {
        let base = bw_report(&s, 9, DEFAULT_BUDGET).unwrap();
        let pk = bw_report(&s.power_set(k).unwrap(), 9 / k, DEFAULT_BUDGET).unwrap();
        let (lo, hi) = (base.rho_r().powi(k as i32), base.rho_hat().powi(k as i32));
        prop_assert!(pk.rho_r() <= hi * (1.0 + 1e-10) + 1e-12);
        prop_assert!(lo <= pk.rho_hat() * (1.0 + 1e-10) + 1e-12);
    }

    #[test]
    fn compose_is_associative(a in operator(), b in operator(), c in operator()) {
        let left = compose(&compose(&a, &b), &c);
        let right = compose(&a, &compose(&b, &c));
        let bound = a.structural_bound() + b.structural_bound() + c.structural_bound()
            + a.shift_power() + b.shift_power() + c.shift_power() + 2;
        for i in 0..bound {
            let x = left.apply_basis(i);
            let y = right.apply_basis(i);
            let keys: std::collections::BTreeSet<_> = x.keys().chain(y.keys()).collect();
            for k in keys {
                let (u, v) = (x.get(k).copied().unwrap_or(0.0), y.get(k).copied().unwrap_or(0.0));
                prop_assert!((u - v).abs() <= 1e-12 * (1.0 + u.abs().max(v.abs())));
            }
        }
    }

    #[test]
    fn compose_acts_as_composition(a in operator(), b in operator()) {
        let ab = compose(&a, &b);
        for i in 0..(a.structural_bound() + b.structural_bound() + a.shift_power() + b.shift_power() + 2) {
            let direct = a.apply(&b.apply_basis(i));
            let mut lhs = ab.apply_basis(i);
            let mut rhs: BTreeMap<usize, f64> = direct;
            lhs.retain(|_, v| v.abs() > 1e-14);
            rhs.retain(|_, v| v.abs() > 1e-14);
            prop_assert_eq!(lhs.keys().collect::<Vec<_>>(), rhs.keys().collect::<Vec<_>>());
            for (k, v) in &lhs {
                prop_assert!((v - rhs[k]).abs() <= 1e-12 * (1.0 + v.abs()));
            }
        }
    }

    #[test]
    fn operator_products(a in operator(), b in operator()) {
        let ab = compose(&a, &b);
        prop_assert!(op_norm(&ab).unwrap() <= op_norm(&a).unwrap() * op_norm(&b).unwrap() * (1.0 + 1e-10) + 1e-12);
        prop_assert_eq!(seminorm_f(&ab), seminorm_f(&a) * seminorm_f(&b));
    }

    #[test]
    fn operator_norm_is_homogeneous(a in operator(), c in 0.0f64..4.0) {
        let n = op_norm(&a).unwrap();
        prop_assert!((op_norm(&a.scale(c).unwrap()).unwrap() - c * n).abs() <= 1e-10 * c * n + 1e-12);
        prop_assert_eq!(seminorm_f(&a.scale(c).unwrap()), c * seminorm_f(&a));
    }

    #[test]
    fn spectral_radius_dominates_tail(a in operator()) {
        match op_spectral_radius(&a, 1e-9) {
            Ok(r) => prop_assert!(r >= a.tail_weight()),
            Err(srl_core::Error::UnstableSpectrum { .. }) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn extension_formula_matches_truncation(s in set(2, 2), word in prop::collection::vec(0usize..2, 1..9)) {
        let len = word.len();
        let ew = ExtendedWord::new(&s, Word::new(word, 2).unwrap(), AlphaSequence::default()).unwrap();
        let a = extended_norm(&ew).unwrap();
        let b = truncated_extension_norm(&ew, len + 1).unwrap();
        prop_assert!(close(a, b, 1e-12), "{} vs {}", a, b);
        prop_assert!(close(a, truncated_extension_norm(&ew, len + 4).unwrap(), 1e-12));
    }

    #[test]
    fn extension_is_injective(l in matrix(2, -1.0, 1.0), levels in 2usize..7) {
        let alpha = AlphaSequence::default();
        let e = truncated_extension_matrix(&l, &alpha, levels).unwrap();
        // the last block column has no image inside the truncation
        let cols = (levels - 1) * 2;
        let mut sub = Matrix::zeros(e.rows(), cols);
        for r in 0..e.rows() {
            for c in 0..cols {
                sub[(r, c)] = e[(r, c)];
            }
        }
        prop_assert!(singular_values(&sub).unwrap().smallest() >= alpha.alpha(levels - 1) * (1.0 - 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn extension_keeps_spectral_growth(l in matrix(2, -1.0, 1.0)) {
        let r = spectral_radius(&l).unwrap();
        prop_assume!(r > 0.05);
        let rate = extended_power_rate(&l, 1000, &AlphaSequence::default()).unwrap();
        prop_assert!((rate - r.ln()).abs() <= 0.02, "{} vs {}", rate, r.ln());
    }

    #[test]
    fn cocycle_identity(seed in any::<u64>(), n in 1usize..200, m in 1usize..200) {
        let sys = DrivingSystem::full_shift(vec![0.3, 0.7], seed).unwrap();
        let coc = CocycleSpec::symbols(vec![mat(&[&[1.2, 0.4], &[-0.3, 0.9]]), mat(&[&[0.5, 1.1], &[0.7, -0.2]])]).unwrap();
        let path = CocyclePath::generate(&sys, &coc, 0, n + m).unwrap();
        let whole = path.product(0, n + m).unwrap();
        let tail = path.product(m as isize, n).unwrap();
        let head = path.product(0, m).unwrap();
        let split = tail.matrix.mul(&head.matrix);
        let shift = tail.log_scale + head.log_scale - whole.log_scale;
        let diff = split.scale(shift.exp()).sub(&whole.matrix);
        prop_assert!(operator_norm(&diff).unwrap() <= 1e-10 * operator_norm(&whole.matrix).unwrap());
    }

    #[test]
    fn orbit_invariants(seed in any::<u64>()) {
        let sys = DrivingSystem::full_shift(vec![0.5, 0.5], seed).unwrap();
        let coc = CocycleSpec::symbols(vec![mat(&[&[1.0, 2.0], &[0.5, 1.5]]), mat(&[&[0.0, 1.0], &[-1.0, 0.3]])]).unwrap();
        let path = CocyclePath::generate(&sys, &coc, 0, 2000).unwrap();
        let rep = cohen_gap(&path, 2000).unwrap();
        for (rho, lam) in rep.rho_track.iter().zip(&rep.lyapunov.lambda_track) {
            prop_assert!(*rho <= lam + 1e-10);
        }
        let spec = &rep.lyapunov.spectrum;
        prop_assert!(spec.windows(2).all(|w| w[0] >= w[1]));
        let det_rate: f64 = path.orbit().forward_symbols().unwrap().iter().map(|&s| {
            let m = coc.at_symbol(s);
            (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).abs().ln()
        }).sum::<f64>() / 2000.0;
        prop_assert!((spec.iter().sum::<f64>() - det_rate).abs() <= 1e-6);
        let again = cohen_gap(&CocyclePath::generate(&sys, &coc, 0, 2000).unwrap(), 2000).unwrap();
        prop_assert_eq!(rep, again);
    }

    #[test]
    fn one_and_two_sided_forward_orbits_agree(seed in any::<u64>()) {
        let p = Matrix::from_rows(&[[0.6, 0.4], [0.2, 0.8]]).unwrap();
        let sys = DrivingSystem::markov_shift(p, vec![1.0 / 3.0, 2.0 / 3.0], seed).unwrap();
        let coc = CocycleSpec::symbols(vec![mat(&[&[2.0, 1.0], &[1.0, 1.0]]), mat(&[&[0.5, 0.0], &[1.0, 2.0]])]).unwrap();
        let one = CocyclePath::generate(&sys, &coc, 0, 500).unwrap();
        let two = CocyclePath::generate(&sys, &coc, 80, 500).unwrap();
        prop_assert_eq!(cohen_gap(&one, 500).unwrap(), cohen_gap(&two, 500).unwrap());
        prop_assert_eq!(lyapunov_estimates(&one, 500).unwrap(), lyapunov_estimates(&two, 500).unwrap());
    }

    #[test]
    fn equivariance_improves_with_horizon(seed in any::<u64>()) {
        let sys = DrivingSystem::full_shift(vec![0.5, 0.5], seed).unwrap();
        let coc = CocycleSpec::symbols(vec![mat(&[&[3.0, 1.0], &[0.0, 1.0 / 3.0]]), mat(&[&[3.0, 0.0], &[1.0, 1.0 / 3.0]])]).unwrap();
        let path = CocyclePath::generate(&sys, &coc, 200, 300).unwrap();
        let mut prev = f64::INFINITY;
        for h in [5usize, 10, 20, 40, 80] {
            let r = equivariance_residual(&path, 0, 7, h).unwrap();
            prop_assert!(r <= prev + 1e-3, "H = {}: {} after {}", h, r, prev);
            prev = r;
        }
        prop_assert!(prev <= 0.05);
    }
}
