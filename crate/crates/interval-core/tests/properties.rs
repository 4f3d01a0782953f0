use interval_core::{
    interval_newton, mat_m_lower, mat_opnorm_sup, split, Interval, IntervalBox, IntervalMatrix,
    IntervalVector, NewtonError,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FUZZ: usize = 100_000;

fn point(x: f64) -> Interval {
    Interval::point(x)
}

fn sample(rng: &mut ChaCha8Rng) -> f64 {
    let m: f64 = rng.gen_range(-1.0..1.0);
    let e: i32 = rng.gen_range(-20..20);
    m * 2f64.powi(e)
}

#[test]
fn binary_ops_contain_float_results() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..FUZZ {
        let (a, b) = (sample(&mut rng), sample(&mut rng));
        assert!((point(a) + point(b)).contains(a + b));
        assert!((point(a) - point(b)).contains(a - b));
        assert!((point(a) * point(b)).contains(a * b));
        if b != 0.0 {
            assert!(point(a).div(&point(b)).unwrap().contains(a / b));
        }
    }
}

#[test]
fn unary_ops_contain_float_results() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..FUZZ {
        let a = sample(&mut rng);
        assert!((-point(a)).contains(-a));
        assert!(point(a).sqr().contains(a * a));
        assert!(point(a.abs()).sqrt().unwrap().contains(a.abs().sqrt()));
        assert!(point(a).pow_int(3).unwrap().contains(a * a * a) || {
            // a*a*a rounds twice; compare against the enclosure of its hull
            let p = point(a).pow_int(3).unwrap();
            p.inflate(4.0 * f64::EPSILON * p.mag()).contains(a * a * a)
        });
    }
}

#[test]
fn transcendentals_contain_libm_results() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..FUZZ {
        let a: f64 = rng.gen_range(-50.0..50.0);
        assert!(point(a).sin().contains(a.sin()), "sin {a}");
        assert!(point(a).cos().contains(a.cos()), "cos {a}");
        assert!(point(a).exp().contains(a.exp()), "exp {a}");
    }
}

fn iv() -> impl Strategy<Value = Interval> {
    (-10.0f64..10.0, 0.0f64..3.0).prop_map(|(a, w)| Interval::new(a, a + w))
}

fn wider(a: Interval, l: f64, r: f64) -> Interval {
    Interval::new(a.lo() - l, a.hi() + r)
}

proptest! {
    #[test]
    fn enclosure_is_monotone(a in iv(), b in iv(), l in 0.0f64..1.0, r in 0.0f64..1.0) {
        let (a2, b2) = (wider(a, l, r), wider(b, r, l));
        prop_assert!((a + b).subset(&(a2 + b2)));
        prop_assert!((a - b).subset(&(a2 - b2)));
        prop_assert!((a * b).subset(&(a2 * b2)));
        prop_assert!(a.sqr().subset(&a2.sqr()));
        prop_assert!(a.sin().subset(&a2.sin()));
        prop_assert!(a.cos().subset(&a2.cos()));
        prop_assert!(a.exp().subset(&a2.exp()));
        if !b2.contains_zero() {
            prop_assert!(a.div(&b).unwrap().subset(&a2.div(&b2).unwrap()));
        }
        let aa = a.abs();
        prop_assert!(aa.sqrt().unwrap().subset(&wider(aa, 0.0, r).sqrt().unwrap()));
    }

    #[test]
    fn interval_results_contain_sampled_points(a in iv(), b in iv(), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let x = a.lo() + s * (a.hi() - a.lo());
        let y = b.lo() + t * (b.hi() - b.lo());
        prop_assert!((a * b).contains(x * y));
        prop_assert!(a.cos().contains(x.cos()));
        prop_assert!(a.pow_int(4).unwrap().contains(x.powi(4)) || x.powi(4) < 1e-300);
    }

    #[test]
    fn m_lower_times_inverse_norm(entries in proptest::collection::vec(-3.0f64..3.0, 9), w in 0.0f64..1e-3) {
        let a = IntervalMatrix::new(3, 3, entries.iter().map(|&x| Interval::new(x, x + w)).collect());
        if let Ok(inv) = a.inverse() {
            let m = mat_m_lower(&a);
            prop_assert!(m * mat_opnorm_sup(&inv) >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn inverse_contains_point_inverses(entries in proptest::collection::vec(-3.0f64..3.0, 4)) {
        let a = IntervalMatrix::from_points(2, 2, &entries);
        let det = entries[0] * entries[3] - entries[1] * entries[2];
        prop_assume!(det.abs() > 1e-2);
        let inv = a.inverse().unwrap();
        let exact = [entries[3] / det, -entries[1] / det, -entries[2] / det, entries[0] / det];
        for (k, e) in exact.iter().enumerate() {
            let c = inv.get(k / 2, k % 2);
            prop_assert!(c.inflate(1e-12 * (1.0 + e.abs())).contains(*e));
        }
    }
}

#[test]
fn newton_square_roots() {
    // sqrt(2), sqrt(3), sqrt(5) to 30 digits
    let roots = [
        (2.0, "1.41421356237309504880168872420"),
        (3.0, "1.73205080756887729352744634150"),
        (5.0, "2.23606797749978969640917366873"),
    ];
    for (c, digits) in roots {
        let f = move |_: &IntervalVector, y: &IntervalVector| IntervalVector::new(vec![y[0].sqr() - c]);
        let j = |_: &IntervalVector, y: &IntervalVector| IntervalMatrix::new(1, 1, vec![y[0] * 2.0]);
        let yb = IntervalVector::new(vec![Interval::new(1.0, 3.0)]);
        let r = interval_newton(f, j, &IntervalVector::zeros(0), &[2.0], &yb).unwrap();
        // Both float neighbours of the decimal root bracket the real root.
        let x: f64 = digits.parse().unwrap();
        assert!(r[0].lo() <= x.next_up() && r[0].hi() >= x.next_down(), "root of {c}");
        let sharper = interval_newton(f, j, &IntervalVector::zeros(0), &[x], &r).unwrap();
        assert!(sharper[0].width() < 1e-14);
        assert!(sharper[0].lo() <= x.next_up() && sharper[0].hi() >= x.next_down());
    }
}

#[test]
fn newton_reports_missing_root() {
    let f = |_: &IntervalVector, y: &IntervalVector| IntervalVector::new(vec![y[0].sqr() + 1.0]);
    let j = |_: &IntervalVector, y: &IntervalVector| IntervalMatrix::new(1, 1, vec![y[0] * 2.0]);
    let yb = IntervalVector::new(vec![Interval::new(-1.0, 1.0)]);
    assert_eq!(
        interval_newton(f, j, &IntervalVector::zeros(0), &[0.0], &yb),
        Err(NewtonError::NoContraction)
    );
}

#[test]
fn split_into_ninety_cells() {
    let b = IntervalBox::linear(IntervalVector::new(vec![Interval::new(1e-3, 1e-2)]));
    let parts = split(&b, 0, 90);
    assert_eq!(parts.len(), 90);
    assert_eq!(parts[0].get(0).lo(), 1e-3);
    assert_eq!(parts[89].get(0).hi(), 1e-2);
    for p in &parts {
        assert!((p.get(0).width() - 1e-4).abs() < 1e-15);
    }
    for w in parts.windows(2) {
        assert_eq!(w[0].get(0).hi(), w[1].get(0).lo());
    }
}

#[test]
fn opnorm_and_m_lower_examples() {
    let j = IntervalMatrix::from_points(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let n = mat_opnorm_sup(&j);
    assert!((1.0..=1.0001).contains(&n));
    let d = IntervalMatrix::from_points(2, 2, &[2.0, 0.0, 0.0, 3.0]);
    let m = mat_m_lower(&d);
    assert!(m > 1.9 && m <= 2.0);
    assert_eq!(mat_m_lower(&IntervalMatrix::zeros(3, 3)), 0.0);
}

#[test]
fn product_example() {
    let p = Interval::new(1.0, 2.0) * Interval::new(-1.0, 1.0);
    assert_eq!(p, Interval::new(-2.0, 2.0));
    assert_eq!(Interval::new(1.0, 2.0) + Interval::new(3.0, 4.0), Interval::new(4.0, 6.0));
}
