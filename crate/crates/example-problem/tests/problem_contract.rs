use std::path::Path;

use example_problem::{build_example, diagonal_field, example_fixture, load_problem, param_method_seed, symmetry_transport, transport_jet, ProblemSpec};
use integrator::{integrate, StepControl};
use interval_core::{Interval, IntervalVector};
use jets::{compose_jet2, eval_jet2, ExprDag, Jet2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec() -> ProblemSpec {
    build_example(Interval::new(0.0, 1e-3), 2e-4).unwrap()
}

/// A random small box inside the local domain.
fn random_box(rng: &mut ChaCha8Rng) -> IntervalVector {
    let c = [rng.gen_range(-2e-4..2e-4), rng.gen_range(0.0..1e-3), rng.gen_range(0.0..6.28), rng.gen_range(-1e-6..1e-6)];
    let w = [1e-6, 1e-5, 1e-3, 1e-8];
    c.iter().zip(w).map(|(&x, r)| Interval::new(x - r, x + r)).collect()
}

/// Pushes a local vector field forward through `z -> C psi(z)` along
/// `(C psi)' (z) g(z)`; the result must contain the ambient field at `C psi(z)`.
fn pushforward(chart: &ExprDag, local: &ExprDag, b: &IntervalVector) -> (IntervalVector, IntervalVector) {
    let j = eval_jet2(chart, b).unwrap();
    let g = local.eval_interval(b).unwrap();
    (j.jacobian.mul_vec(&g), j.value)
}

#[test]
fn local_fields_are_conjugate_to_ambient() {
    let p = spec();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let b = random_box(&mut rng);
        for branch in [&p.unstable, &p.stable] {
            let (pushed, image) = pushforward(&branch.chart_map(), &branch.local_field, &b);
            let ambient = branch.flow_field.eval_interval(&image).unwrap();
            for k in 0..4 {
                let overlap = pushed[k].intersection(&ambient[k]);
                assert!(overlap.is_some(), "component {k}: {:?} vs {:?}", pushed[k], ambient[k]);
            }
            // at the box center both sides are tight and must agree closely
            let c = IntervalVector::from_points(&b.mid());
            let (pc, ic) = pushforward(&branch.chart_map(), &branch.local_field, &c);
            let ac = branch.flow_field.eval_interval(&ic).unwrap();
            for k in 0..4 {
                assert!(pc[k].inflate(1e-15).intersection(&ac[k]).is_some());
                assert!((pc[k].mid() - ac[k].mid()).abs() <= 1e-15);
            }
        }
    }
}

#[test]
fn stable_field_is_reversed_conjugate() {
    let p = spec();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let b = IntervalVector::from_points(&random_box(&mut rng).mid());
        let image = p.stable.chart_map().eval_interval(&b).unwrap();
        let forward = p.ambient.eval_interval(&image).unwrap();
        let (pushed, _) = pushforward(&p.stable.chart_map(), &p.stable.local_field, &b);
        for k in 0..4 {
            assert!((pushed[k] + forward[k]).inflate(1e-15).contains(0.0), "component {k}");
        }
    }
}

#[test]
fn psi_inverse_composes_to_identity() {
    let p = spec();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for branch in [&p.unstable, &p.stable] {
        for _ in 0..20 {
            let b = random_box(&mut rng);
            let inner = eval_jet2(&branch.psi, &b).unwrap();
            let outer = eval_jet2(&branch.psi_inv, &inner.value).unwrap();
            let id = compose_jet2(&outer, &inner).unwrap();
            assert!(b.subset(&id.value));
            for i in 0..4 {
                for j in 0..4 {
                    assert!(id.jacobian.get(i, j).contains(if i == j { 1.0 } else { 0.0 }));
                }
            }
            assert!(id.hessian.as_slice().iter().all(|h| h.contains(0.0)));
        }
    }
}

#[test]
fn chart_inverse_undoes_chart() {
    let p = spec();
    for branch in [&p.unstable, &p.stable] {
        let inv = branch.chart_inverse(p.ambient.var_names()).unwrap();
        let z = [1e-4, 5e-4, 2.0, 3e-7];
        let x = branch.chart_map().eval_point(&z).unwrap();
        let back = inv.eval_point(&x).unwrap();
        for k in 0..4 {
            assert!((back[k] - z[k]).abs() < 1e-15);
        }
    }
}

#[test]
fn apex_energy_stays_small() {
    let p = spec();
    let b: IntervalVector = [Interval::new(1.5 - 1e-6, 1.5 + 1e-6), Interval::ZERO, Interval::ZERO, Interval::ZERO].into_iter().collect();
    let fj = integrate(&p.ambient, &Jet2::identity(&b), 8.0, &StepControl::default()).unwrap();
    let (x, y) = (fj.state[0], fj.state[3]);
    let (cx, cy) = (Interval::point(x.mid()), Interval::point(y.mid()));
    let third = Interval::ONE.div(&Interval::point(3.0)).unwrap();
    let h = Interval::point(0.5) * (cy.sqr() - cx.sqr()) + cx.sqr() * cx * third + (x.sqr() - x) * (x - cx) + y * (y - cy);
    assert!(h.contains(0.0) && h.mag() <= 1e-4, "H in {h:?}");
}

#[test]
fn apex_is_fixed_by_symmetry() {
    let p = spec();
    let s = p.symmetry.unwrap();
    let apex = IntervalVector::from_points(&[1.5, 0.0, 0.0, 0.0]);
    assert_eq!(symmetry_transport(&s, &apex), apex);
}

/// The unstable manifold `C (xi, K2(xi))` at `eps = 0` is carried by `S` onto
/// the stable one `C_s psi_s (xi, 0, t, 0)`.
#[test]
fn symmetry_maps_unstable_chart_to_stable_chart() {
    let p = spec();
    let s = p.symmetry.clone().unwrap();
    for xi in [-2e-4, -5e-5, 0.0, 1e-4, 2e-4] {
        for t in [0.0, 1.0, 4.0] {
            let b = IntervalVector::from_points(&[xi, 0.0, t, 0.0]);
            let bs = IntervalVector::from_points(&[xi, 0.0, -t, 0.0]);
            let u = eval_jet2(&p.unstable.chart_map(), &b).unwrap();
            let st = eval_jet2(&p.stable.chart_map(), &bs).unwrap();
            let su = transport_jet(&s, &u);
            for k in [0, 3] {
                assert!(su.value[k].intersection(&st.value[k]).is_some(), "xi {xi} t {t} component {k}");
                assert!(su.jacobian.get(k, 0).intersection(&st.jacobian.get(k, 0)).is_some());
            }
        }
    }
}

#[test]
fn stable_parameterization_matches_seed() {
    let p = spec();
    let seed = param_method_seed(&diagonal_field(&p.ambient), 3).unwrap();
    let xi = 1.5e-4;
    let x = p.stable.chart_map().eval_interval(&IntervalVector::from_points(&[xi, 0.0, 0.0, 0.0])).unwrap();
    let k2 = seed.k2_at(Interval::point(xi));
    assert!((x[0] - (Interval::point(xi) - k2)).inflate(1e-18).contains(0.0));
    assert!((x[3] - (Interval::point(-xi) - k2)).inflate(1e-18).contains(0.0));
}

#[test]
fn shipped_fixture_matches_builder() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/example.toml");
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, example_fixture(), "regenerate with the write_fixture example");
    let loaded = load_problem(&path).unwrap();
    assert_eq!(example_problem::write_problem(&loaded), example_problem::write_problem(&spec()));
    assert_eq!(loaded.template, spec().template);
}

#[test]
fn diagonal_field_has_diagonal_linear_part() {
    let f = diagonal_field(&example_problem::example_ambient());
    let j = eval_jet2(&f, &IntervalVector::from_points(&[0.0, 0.0])).unwrap();
    assert_eq!(j.jacobian.get(0, 0), Interval::ONE);
    assert_eq!(j.jacobian.get(1, 1), Interval::point(-1.0));
    assert_eq!(j.jacobian.get(0, 1), Interval::ZERO);
    assert_eq!(j.jacobian.get(1, 0), Interval::ZERO);
}


proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unstable_chart_is_conjugate_pointwise(xb in -2e-4f64..2e-4, e in 0.0f64..1e-3, t in 0.0f64..6.3, yb in -1e-6f64..1e-6) {
        let p = spec();
        let b = IntervalVector::from_points(&[xb, e, t, yb]);
        let (pushed, image) = pushforward(&p.unstable.chart_map(), &p.unstable.local_field, &b);
        let ambient = p.unstable.flow_field.eval_interval(&image).unwrap();
        for k in 0..4 {
            prop_assert!((pushed[k] - ambient[k]).inflate(1e-15).contains(0.0));
        }
    }
}
