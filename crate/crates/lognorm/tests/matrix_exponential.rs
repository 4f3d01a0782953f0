use interval_core::{Interval, IntervalMatrix};
use lognorm::{lognorm_upper, ml_lower, opnorm_sup_tight, sym_eig_bounds};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng) -> (usize, Vec<f64>) {
    let n = rng.gen_range(2..=4);
    let data = (0..n * n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    (n, data)
}

fn singular_values(m: &DMatrix<f64>) -> (f64, f64) {
    let s = m.clone().svd(false, false).singular_values;
    (s.min(), s.max())
}

#[test]
fn exponential_growth_is_bounded_by_log_norms() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..1000 {
        let (n, data) = random_matrix(&mut rng);
        let a = IntervalMatrix::from_points(n, n, &data);
        let l = lognorm_upper(&a);
        let ml = ml_lower(&a);
        assert!(ml <= l);
        for h in [0.01, 0.1] {
            let e = (DMatrix::from_row_slice(n, n, &data) * h).exp();
            let (smin, smax) = singular_values(&e);
            assert!(smax <= (l * h).exp() + 1e-9, "norm bound");
            assert!(smin >= (ml * h).exp() - 1e-9, "minimum bound");
        }
    }
}

#[test]
fn log_minimum_is_negated_log_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..1000 {
        let (n, data) = random_matrix(&mut rng);
        let a = IntervalMatrix::new(
            n,
            n,
            data.iter().map(|&x| Interval::new(x, x + 1e-3)).collect(),
        );
        assert_eq!(ml_lower(&a).to_bits(), (-lognorm_upper(&a.neg())).to_bits());
    }
}

#[test]
fn eigen_bounds_contain_symmetric_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..500 {
        let (n, data) = random_matrix(&mut rng);
        let m = DMatrix::from_row_slice(n, n, &data);
        let s = (&m + m.transpose()) * 0.5;
        let sym: Vec<f64> = s.iter().copied().collect();
        let b = sym_eig_bounds(&IntervalMatrix::from_points(n, n, &sym));
        let eig = s.symmetric_eigenvalues();
        let tol = 1e-12 * (1.0 + eig.amax());
        assert!(b.lambda_min_lower <= eig.min() + tol);
        assert!(b.lambda_max_upper >= eig.max() - tol);
        // and not grossly pessimistic for point input
        assert!(b.lambda_max_upper - eig.max() < 1e-9);
        let top = opnorm_sup_tight(&IntervalMatrix::from_points(n, n, &data));
        assert!(top >= singular_values(&m).1 - tol);
    }
}

proptest! {
    #[test]
    fn log_norm_is_subadditive(a in proptest::collection::vec(-2.0f64..2.0, 9), b in proptest::collection::vec(-2.0f64..2.0, 9)) {
        let ia = IntervalMatrix::from_points(3, 3, &a);
        let ib = IntervalMatrix::from_points(3, 3, &b);
        let sum = ia.add(&ib);
        prop_assert!(lognorm_upper(&sum) <= lognorm_upper(&ia) + lognorm_upper(&ib) + 1e-9);
    }

    #[test]
    fn refinement_never_loosens(a in proptest::collection::vec(-2.0f64..2.0, 4), w in 0.0f64..0.1, s in 0.0f64..1.0) {
        let wide = IntervalMatrix::new(2, 2, a.iter().map(|&x| Interval::new(x, x + w)).collect());
        let narrow = IntervalMatrix::new(2, 2, a.iter().map(|&x| Interval::new(x + s * w * 0.5, x + w * (0.5 + 0.5 * s))).collect());
        prop_assert!(lognorm_upper(&narrow) <= lognorm_upper(&wide) + 1e-9);
        prop_assert!(ml_lower(&narrow) >= ml_lower(&wide) - 1e-9);
    }
}
