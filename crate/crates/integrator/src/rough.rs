use interval_core::{Interval, IntervalMatrix, IntervalVector};
use jets::{eval_jet2, ExprDag, Jet2, Scalar, SymTensor3};

use crate::IntegratorError;

const RETRIES: usize = 12;

fn check_field(f: &ExprDag) -> Result<(), IntegratorError> {
    if f.arity() != f.output_count() {
        return Err(IntegratorError::NotAField {
            arity: f.arity(),
            outputs: f.output_count(),
        });
    }
    Ok(())
}

fn widen(x: Interval) -> Interval {
    x.inflate(0.1 * x.width() + 1e-14 * x.mag() + f64::MIN_POSITIVE)
}

/// Box `Y` with `b + [0,h] f(Y) ⊆ Y`, so every solution starting in `b`
/// stays in `Y` on `[0, h]`. The returned box is `b + [0,h] f(Y)`.
pub fn rough_enclosure(f: &ExprDag, b: &IntervalVector, h: f64) -> Result<IntervalVector, IntegratorError> {
    assert!(h > 0.0, "step must be positive");
    check_field(f)?;
    let t = Interval::new(0.0, h);
    let image = |y: &IntervalVector| -> Result<IntervalVector, IntegratorError> {
        let fy = f.eval_interval(y)?;
        Ok(b.iter().zip(fy.iter()).map(|(bi, fi)| *bi + t * *fi).collect())
    };
    let mut y: IntervalVector = image(b)?.iter().map(|x| widen(*x)).collect();
    for _ in 0..RETRIES {
        if !y.iter().all(|x| x.is_finite()) {
            break;
        }
        let next = match image(&y) {
            Ok(n) => n,
            Err(_) => break,
        };
        if next.subset(&y) {
            return Ok(next);
        }
        y = y.hull(&next).iter().map(|x| widen(*x)).collect();
    }
    Err(IntegratorError::TooLarge { h })
}

fn meet(a: Interval, b: Interval) -> Interval {
    a.intersection(&b).unwrap_or(a)
}

/// A-priori enclosure of the state together with the first and second
/// variational solutions on `[0, h]`, with derivatives taken with respect to
/// the initial point in `b`.
///
/// The state part is [`rough_enclosure`]. With `A = Df(Y)` the first
/// variational solution obeys `|V(t)| <= exp(h |A|)` (Gronwall in the max
/// norm), and the second, driven by `B = D^2 f(Y)[V, V]`, obeys
/// `|W(t)| <= h |B| exp(h |A|)`. These bounds are then tightened by the
/// integral inclusions `V in I + [0,h] A V` and `W in [0,h] (A W + B)`.
pub fn rough_jet(f: &ExprDag, b: &IntervalVector, h: f64) -> Result<Jet2, IntegratorError> {
    let y = rough_enclosure(f, b, h)?;
    let n = b.len();
    let t = Interval::new(0.0, h);
    let fy = eval_jet2(f, &y)?;
    let a = &fy.jacobian;
    let growth = Scalar::exp(&(t * Interval::point(a.norm_inf_sup()))).hi();
    if !growth.is_finite() {
        return Err(IntegratorError::TooLarge { h });
    }
    let id = IntervalMatrix::identity(n);
    let mut v = IntervalMatrix::new(n, n, vec![Interval::symmetric(growth); n * n]);
    for _ in 0..4 {
        let next = id.add(&a.mul(&v).scale(t));
        v = IntervalMatrix::new(n, n, next.as_slice().iter().zip(v.as_slice()).map(|(p, q)| meet(*p, *q)).collect());
    }
    let forcing = fy.hessian.congruence(&v);
    let bound = (t * Interval::point(forcing.max_mag()) * Interval::point(growth)).hi();
    if !bound.is_finite() {
        return Err(IntegratorError::TooLarge { h });
    }
    let mut w = SymTensor3::zeros(n, n);
    for k in 0..n {
        for q in 0..n {
            for p in 0..=q {
                w.set(k, p, q, Interval::symmetric(bound));
            }
        }
    }
    for _ in 0..4 {
        let next = w.left_mul(a).add(&forcing).scale(t);
        let mut m = SymTensor3::zeros(n, n);
        for k in 0..n {
            for q in 0..n {
                for p in 0..=q {
                    m.set(k, p, q, meet(next.get(k, p, q), w.get(k, p, q)));
                }
            }
        }
        w = m;
    }
    Ok(Jet2::new(y, v, w))
}
