use interval_core::Interval;
use jets::{parse_dag, ExprDag};
use nhim_verifier::*;
use proptest::prelude::*;

const R: f64 = 2e-4;

/// Local field near the saddle circle of the forced fish system, in
/// coordinates (xb, eps, t, yb) straightened by the cubic unstable chart.
fn local_field() -> ExprDag {
    let k2 = "(- (neg (/ (sqr xb) 6)) (/ (pow xb 3) 12))";
    let k2p = "(- (neg (/ xb 3)) (/ (sqr xb) 4))";
    let a = format!("(+ xb yb {k2})");
    let b = format!("(- xb yb {k2})");
    let f1 = format!("(- xb (* (/ 1 2) eps (cos t) (sqr {a})) (* (/ 1 2) (sqr {b})))");
    let h = format!("(+ (neg yb) (neg {k2}) (* (/ 1 2) eps (cos t) (sqr {a})) (neg (* (/ 1 2) (sqr {b}))))");
    let yp = format!("(+ (* (neg {k2p}) {f1}) {h})");
    parse_dag(&["xb", "eps", "t", "yb"], &[f1.as_str(), "0", "1", yp.as_str()]).unwrap()
}

fn domain(cells: usize) -> DomainSpec {
    DomainSpec {
        center: vec![CenterCoord::interval(1, Interval::new(0.0, 1e-3)), CenterCoord::angle(2)],
        unstable: vec![0],
        stable: vec![3],
        radius: R,
        stable_radius: R,
        chart_radius: 1.0,
        slope: 0.5,
        block_partition: vec![cells, 1, 1, 1],
    }
}

#[test]
fn unstable_rate_is_near_one() {
    let f = local_field();
    let d = domain(4);
    let blocks = block_partials(&f, &d, &Blocking::new(&d, SlopeMode::Fiber)).unwrap();
    for b in &blocks {
        let e = b.dfx_dx.get(0, 0);
        assert!(e.contains(1.0 - b.cell.get(0).mid()) || (e.mid() - 1.0).abs() < 1e-3);
        assert!(e.width() < 1e-3);
    }
}

#[test]
fn example_certificate() {
    let f = local_field();
    let rep = verify_nhim(&f, &domain(128), NhimOptions::default()).unwrap();
    assert!(rep.passed(), "{rep:?}");
    assert!(check_rate_conditions(&rep.rates, 2).passed());
    assert!(rep.l > 6.278276608e-6 / 5.0 && rep.l < 6.278276608e-6 * 5.0, "L = {:e}", rep.l);
    let m = rep.second.m_bound;
    assert!(m > 1.1271e-3 / 5.0 && m < 1.1271e-3 * 5.0, "M = {m:e}");
    assert_eq!(rep.second.formula_used, MFormula::Improved);
    assert!(rep.second.m_improved < 1e-2 * rep.second.m_general);
}

#[test]
fn published_slope_passes_graph_check() {
    let f = local_field();
    let l = 6.278276608e-6;
    let d = domain(128).with_stable_scale(l);
    assert!(slope_check(&f, &d, l, SlopeMode::Graph).unwrap().passed);
    assert!(check_isolating_block(&f, &d).unwrap().passed());
}

#[test]
fn reversed_field_dual_constants() {
    // -f with unstable and stable roles exchanged, center unchanged
    let f = local_field();
    let d = domain(8);
    let rc = rate_constants(&f, &d).unwrap();
    let mut r = d.clone();
    r.unstable = vec![3];
    r.stable = vec![0];
    let back = rate_constants(&f.negated(), &r).unwrap();
    let tol = 1e-15;
    assert!((rc.mu_s1 + back.xi_u1).abs() < tol);
    assert!((rc.xi_u1 + back.mu_s1).abs() < tol);
}

#[test]
fn flat_manifold_prefers_improved_formula() {
    // y' = (-1 + x) y: the graph y = 0 is invariant and flat.
    let f = parse_dag(&["x", "y"], &["x", "(* (+ -1 x) y)"]).unwrap();
    let d = DomainSpec {
        center: vec![],
        unstable: vec![0],
        stable: vec![1],
        radius: 0.1,
        stable_radius: 1e-3,
        chart_radius: 1.0,
        slope: 0.5,
        block_partition: vec![4, 1],
    };
    let c = second_deriv_bound(&f, &d, 1e-3, SlopeMode::Graph).unwrap();
    assert!(c.c_y1 < 1e-12);
    assert!(c.m_improved < 1e-2 * c.m_general);
}

fn quadratic_field(c: &[f64]) -> ExprDag {
    let fx = format!("(+ x (* {} (sqr x)) (* {} x y))", c[0], c[1]);
    let fy = format!("(+ (neg y) (* {} (sqr x)) (* {} (sqr y)))", c[2], c[3]);
    parse_dag(&["x", "y"], &[fx.as_str(), fy.as_str()]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn refinement_never_loosens(c in proptest::collection::vec(-1.0f64..1.0, 4), n in 1usize..4) {
        let f = quadratic_field(&c);
        let coarse = DomainSpec {
            center: vec![],
            unstable: vec![0],
            stable: vec![1],
            radius: 0.1,
            stable_radius: 0.05,
            chart_radius: 1.0,
            slope: 0.5,
            block_partition: vec![n, n],
        };
        let fine = coarse.with_partition(vec![2 * n, 2 * n]);
        let a = rate_constants(&f, &coarse).unwrap();
        let b = rate_constants(&f, &fine).unwrap();
        let tol = 1e-12;
        for ((_, x), (name, y)) in a.as_pairs().iter().zip(b.as_pairs().iter()) {
            if name.starts_with("mu") {
                prop_assert!(*y <= x + tol, "{name}");
            } else {
                prop_assert!(*y >= x - tol, "{name}");
            }
        }
    }
}
