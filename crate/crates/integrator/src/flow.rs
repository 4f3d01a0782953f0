use interval_core::{Interval, IntervalMatrix, IntervalVector};
use jets::jet::tri;
use jets::{compose_jet2, eval_jet2, ExprDag, Jet2, Jet2Scalar, Scalar, SymTensor3};

use crate::lohner::{intersect, Parallelepiped};
use crate::rough::rough_jet;
use crate::{IntegratorError, StepControl};

/// Parallelepiped forms of the state, of the first derivative and of the
/// second derivative (stored as `n x m(m+1)/2`, one packed pair per column).
/// `state.center` is the reference point of the mean-value form.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    pub state: Parallelepiped,
    pub dphi: Parallelepiped,
    pub d2phi: Parallelepiped,
}

/// Enclosure of the flow and its first two derivatives with respect to the
/// `m` seed parameters: for every seed point and every `t` in `time`,
/// `Phi(t, p)` lies in `state`, `D Phi` in `dphi` and `D^2 Phi` in `d2phi`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowJet {
    pub time: Interval,
    pub state: IntervalVector,
    pub dphi: IntervalMatrix,
    pub d2phi: SymTensor3,
    pub representation: Representation,
    pub steps: usize,
}

pub(crate) fn flatten(t: &SymTensor3) -> IntervalMatrix {
    let p = t.dim() * (t.dim() + 1) / 2;
    IntervalMatrix::new(t.outputs(), p, t.as_slice().to_vec())
}

pub(crate) fn unflatten(m: &IntervalMatrix, dim: usize) -> SymTensor3 {
    let mut t = SymTensor3::zeros(m.rows(), dim);
    for k in 0..m.rows() {
        for j in 0..dim {
            for i in 0..=j {
                t.set(k, i, j, m.get(k, tri(i, j)));
            }
        }
    }
    t
}

impl FlowJet {
    /// Jet at time `t0` whose state and derivatives are those of `seed`
    /// (a map from `m` parameters to the phase space).
    pub fn from_seed(seed: &Jet2, t0: f64) -> Self {
        FlowJet {
            time: Interval::point(t0),
            state: seed.value.clone(),
            dphi: seed.jacobian.clone(),
            d2phi: seed.hessian.clone(),
            representation: Representation {
                state: Parallelepiped::from_hull(&IntervalMatrix::from_columns(&[seed.value.clone()])),
                dphi: Parallelepiped::from_hull(&seed.jacobian),
                d2phi: Parallelepiped::from_hull(&flatten(&seed.hessian)),
            },
            steps: 0,
        }
    }

    /// Jet of `chart o local` at time `t0`. The parallelepipeds are based on
    /// `B = mid D chart`, so the spread of `local` enters as coefficients in
    /// the chart's own directions instead of as a box in phase space.
    pub fn from_chart(chart: &ExprDag, local: &Jet2, t0: f64) -> Result<Self, IntegratorError> {
        let z = &local.value;
        let zc = IntervalVector::from_points(&z.mid());
        let outer = eval_jet2(chart, z)?;
        let at_center = chart.eval_interval(&zc)?;
        let b = outer.jacobian.mid();
        let bi = IntervalMatrix::from_matrix(&b).inverse()?;
        let bd = bi.mul(&outer.jacobian);
        let seed = compose_jet2(&outer, local)?;

        let c0 = IntervalVector::from_points(&at_center.mid());
        let dz: IntervalVector = z.iter().zip(zc.iter()).map(|(&a, &c)| a - c).collect();
        let shift: IntervalVector = at_center.iter().zip(c0.iter()).map(|(&a, &c)| a - c).collect();
        let r0: IntervalVector = bi.mul_vec(&shift).iter().zip(bd.mul_vec(&dz).iter()).map(|(&a, &c)| a + c).collect();
        let state = Parallelepiped {
            center: IntervalMatrix::from_columns(&[c0]).mid(),
            basis: b.clone(),
            coeffs: IntervalMatrix::from_columns(&[r0]),
        };

        let c1 = seed.jacobian.mid();
        let dphi = Parallelepiped {
            coeffs: bd.mul(&local.jacobian).sub(&bi.mul(&IntervalMatrix::from_matrix(&c1))),
            center: c1,
            basis: b.clone(),
        };

        let quad = flatten(&outer.hessian.congruence(&local.jacobian));
        let c2 = flatten(&seed.hessian).mid();
        let d2phi = Parallelepiped {
            coeffs: bi.mul(&quad).add(&bd.mul(&flatten(&local.hessian))).sub(&bi.mul(&IntervalMatrix::from_matrix(&c2))),
            center: c2,
            basis: b,
        };

        let m = local.dim();
        let state_hull = intersect(&state.hull(), &IntervalMatrix::from_columns(&[seed.value.clone()])).column(0);
        let dphi_hull = intersect(&dphi.hull(), &seed.jacobian);
        let d2_hull = unflatten(&intersect(&d2phi.hull(), &flatten(&seed.hessian)), m);
        Ok(FlowJet {
            time: Interval::point(t0),
            state: state_hull,
            dphi: dphi_hull,
            d2phi: d2_hull,
            representation: Representation { state, dphi, d2phi },
            steps: 0,
        })
    }

    /// Identity jet over the box `x` (derivatives with respect to the
    /// initial point).
    pub fn identity(x: &IntervalVector, t0: f64) -> Self {
        FlowJet::from_seed(&Jet2::identity(x), t0)
    }

    pub fn dim(&self) -> usize {
        self.state.len()
    }

    /// Number of seed parameters.
    pub fn params(&self) -> usize {
        self.dphi.cols()
    }

    /// Reference point of the mean-value form.
    pub fn reference(&self) -> Vec<f64> {
        self.representation.state.center.column(0)
    }

    pub fn jet(&self) -> Jet2 {
        Jet2::new(self.state.clone(), self.dphi.clone(), self.d2phi.clone())
    }
}

/// Enclosures of the one-step map `phi_t` for `t` in an interval.
#[derive(Clone, Debug, PartialEq)]
pub struct StepMap {
    /// `phi_t(c)` at the reference point `c`.
    pub center_image: IntervalVector,
    /// `phi_t(X)` by direct evaluation over the whole set.
    pub natural: IntervalVector,
    /// `D phi_t` over `X`.
    pub jac: IntervalMatrix,
    /// `D^2 phi_t` over `X`.
    pub hess: SymTensor3,
}

/// Taylor data of one step from the set `X`: coefficients in jet arithmetic
/// over `X`, interval coefficients at the reference point, and the order
/// `p + 1` coefficient over the rough enclosure for the remainder.
#[derive(Clone, Debug)]
pub struct TaylorStep {
    /// Length of the interval `[0, h]` on which the data are valid.
    pub h: f64,
    pub order: usize,
    /// Rough enclosure of the augmented state on `[0, h]`.
    pub rough: Jet2,
    coef_x: Vec<Vec<Jet2Scalar>>,
    coef_c: Vec<Vec<Interval>>,
    rem: Vec<Jet2Scalar>,
}

struct Coefficients {
    coef_x: Vec<Vec<Jet2Scalar>>,
    coef_c: Vec<Vec<Interval>>,
}

fn coefficients(f: &ExprDag, x: &IntervalVector, c: &[f64], order: usize) -> Result<Coefficients, IntegratorError> {
    let n = x.len();
    let seeds: Vec<Jet2Scalar> = (0..n).map(|i| Jet2Scalar::variable(n, i, x[i])).collect();
    let centre: Vec<Interval> = c.iter().map(|&v| Interval::point(v)).collect();
    Ok(Coefficients {
        coef_x: f.taylor(&seeds, order)?,
        coef_c: f.taylor(&centre, order)?,
    })
}

fn horner<S: Scalar>(coefs: &[S], top: &S, t: Interval) -> S {
    let mut acc = top.clone();
    for c in coefs.iter().rev() {
        acc = acc.scale(t).add(c);
    }
    acc
}

impl TaylorStep {
    fn build(f: &ExprDag, x: &IntervalVector, co: &Coefficients, h: f64, order: usize) -> Result<Self, IntegratorError> {
        let rough = rough_jet(f, x, h)?;
        let full = f.taylor(&rough.to_scalars(), order + 1)?;
        let rem = full.into_iter().map(|mut s| s.pop().expect("order + 1 coefficients")).collect();
        Ok(TaylorStep {
            h,
            order,
            rough,
            coef_x: co.coef_x.clone(),
            coef_c: co.coef_c.clone(),
            rem,
        })
    }

    /// State range of the whole step.
    pub fn range(&self) -> &IntervalVector {
        &self.rough.value
    }

    /// Enclosures of `phi_t` for all `t` in `t`, which must lie in `[0, h]`.
    pub fn map_at(&self, t: Interval) -> StepMap {
        assert!(t.lo() >= 0.0 && t.hi() <= self.h, "time {t:?} outside the step [0, {}]", self.h);
        let n = self.coef_x.len();
        let values: Vec<Interval> = self.rem.iter().map(|r| r.value()).collect();
        let center_image: IntervalVector = (0..n).map(|i| horner(&self.coef_c[i], &values[i], t)).collect();
        let jets: Vec<Jet2Scalar> = (0..n).map(|i| horner(&self.coef_x[i], &self.rem[i], t)).collect();
        let j = Jet2::from_scalars(&jets);
        StepMap {
            center_image,
            natural: j.value,
            jac: j.jacobian,
            hess: j.hessian,
        }
    }
}

/// A planned step: Taylor data plus the exact end time and step interval.
#[derive(Clone, Debug)]
pub struct PreparedStep {
    pub step: TaylorStep,
    /// End time, a float reached exactly.
    pub t_next: f64,
    /// Enclosure of `t_next - t`.
    pub dt: Interval,
}

/// Chooses a step from `fj` (whose time must be a point) not passing
/// `t_limit`, halving on rough-enclosure failure.
pub fn prepare_step(f: &ExprDag, fj: &FlowJet, ctrl: &StepControl, t_limit: f64) -> Result<PreparedStep, IntegratorError> {
    ctrl.validate()?;
    assert!(fj.time.is_point(), "steps start at a point time");
    let t = fj.time.lo();
    assert!(t_limit > t, "no time left to integrate");
    let co = coefficients(f, &fj.state, &fj.reference(), ctrl.order)?;
    let mag = |k: usize| co.coef_x.iter().map(|c| c[k].value().mag()).fold(0.0, f64::max);
    let mut h = ctrl.suggest(mag(ctrl.order), mag(ctrl.order - 1));
    loop {
        let (t_next, dt) = if t + h >= t_limit {
            (t_limit, Interval::point(t_limit) - Interval::point(t))
        } else {
            let tn = t + h;
            (tn, Interval::point(tn) - Interval::point(t))
        };
        if dt.hi() > 0.0 {
            match TaylorStep::build(f, &fj.state, &co, dt.hi(), ctrl.order) {
                Ok(step) => return Ok(PreparedStep { step, t_next, dt }),
                Err(IntegratorError::TooLarge { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        if h <= ctrl.h_min {
            return Err(IntegratorError::StepFloor { t, h_min: ctrl.h_min });
        }
        h = (h * 0.5).max(ctrl.h_min);
    }
}

/// The jet after flowing `fj` for every time in `dt` with the Taylor data of
/// `step` (which must have been prepared from `fj`). The new time is
/// `fj.time + dt`, or `t_next` when given.
pub fn advance(fj: &FlowJet, step: &TaylorStep, dt: Interval, t_next: Option<f64>) -> Result<FlowJet, IntegratorError> {
    let map = step.map_at(dt);
    let rep = &fj.representation;
    let y = IntervalMatrix::from_columns(&[map.center_image.clone()]);
    let (state_pp, state_hull) = rep.state.advance(&y, &map.jac)?;
    let state: IntervalVector = intersect(&state_hull, &IntervalMatrix::from_columns(&[map.natural.clone()])).column(0);

    let c1 = IntervalMatrix::from_matrix(&rep.dphi.center);
    let (dphi_pp, dphi) = rep.dphi.advance(&map.jac.mul(&c1), &map.jac)?;

    let m = fj.params();
    let forcing = flatten(&map.hess.congruence(&fj.dphi));
    let c2 = IntervalMatrix::from_matrix(&rep.d2phi.center);
    let (d2_pp, d2_flat) = rep.d2phi.advance(&map.jac.mul(&c2).add(&forcing), &map.jac)?;

    Ok(FlowJet {
        time: t_next.map(Interval::point).unwrap_or(fj.time + dt),
        state,
        dphi,
        d2phi: unflatten(&d2_flat, m),
        representation: Representation {
            state: state_pp,
            dphi: dphi_pp,
            d2phi: d2_pp,
        },
        steps: fj.steps + 1,
    })
}

/// One adaptive step, ending no later than `t_limit`.
fn step_until(f: &ExprDag, fj: &FlowJet, ctrl: &StepControl, t_limit: f64) -> Result<FlowJet, IntegratorError> {
    let p = prepare_step(f, fj, ctrl, t_limit)?;
    advance(fj, &p.step, p.dt, Some(p.t_next))
}

/// One adaptive Taylor step.
pub fn flow_step(f: &ExprDag, fj: &FlowJet, ctrl: &StepControl) -> Result<FlowJet, IntegratorError> {
    step_until(f, fj, ctrl, f64::INFINITY)
}

/// Flows `fj` until the absolute time `t_end`, reached exactly.
pub fn integrate_from(f: &ExprDag, fj: FlowJet, t_end: f64, ctrl: &StepControl) -> Result<FlowJet, IntegratorError> {
    ctrl.validate()?;
    let mut fj = fj;
    while fj.time.lo() < t_end {
        fj = step_until(f, &fj, ctrl, t_end)?;
    }
    Ok(fj)
}

/// Flow of the seed jet for time `t_final >= 0`. Backward flows are obtained
/// by integrating the negated field.
pub fn integrate(f: &ExprDag, initial: &Jet2, t_final: f64, ctrl: &StepControl) -> Result<FlowJet, IntegratorError> {
    assert!(t_final >= 0.0, "integrate the negated field for backward time");
    integrate_from(f, FlowJet::from_seed(initial, 0.0), t_final, ctrl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use jets::parse_dag;

    #[test]
    fn exponential_to_order_ten() {
        let f = parse_dag(&["x"], &["x"]).unwrap();
        let ctrl = StepControl { order: 10, ..Default::default() };
        let fj = integrate(&f, &Jet2::identity(&IntervalVector::from_points(&[1.0])), 1.0, &ctrl).unwrap();
        assert_eq!(fj.time, Interval::point(1.0));
        assert!(fj.state[0].contains(std::f64::consts::E));
        assert!(fj.state[0].width() <= 1e-8);
        assert!(fj.dphi.get(0, 0).contains(std::f64::consts::E));
    }

    #[test]
    fn zero_time_is_identity() {
        let f = parse_dag(&["x", "y"], &["y", "(neg x)"]).unwrap();
        let x = IntervalVector::from_points(&[1.0, 2.0]);
        let fj = integrate(&f, &Jet2::identity(&x), 0.0, &StepControl::default()).unwrap();
        assert_eq!(fj.state, x);
        assert_eq!(fj.dphi, IntervalMatrix::identity(2));
        assert_eq!(fj.steps, 0);
    }

    #[test]
    fn harmonic_oscillator_period() {
        let f = parse_dag(&["x", "y"], &["y", "(neg x)"]).unwrap();
        let x = IntervalVector::from_points(&[1.0, 0.0]);
        let tp = 2.0 * std::f64::consts::PI;
        let fj = integrate(&f, &Jet2::identity(&x), tp, &StepControl::default()).unwrap();
        // the float 2pi differs from the period by ~2.4e-16
        assert!(fj.state[0].inflate(1e-15).contains(1.0) && fj.state[1].inflate(1e-15).contains(0.0));
        assert!(fj.state.max_width() < 1e-9);
        for i in 0..2 {
            for j in 0..2 {
                let id = if i == j { 1.0 } else { 0.0 };
                assert!(fj.dphi.get(i, j).inflate(1e-15).contains(id));
            }
        }
    }

    #[test]
    fn linear_field_has_flat_second_derivative() {
        let f = parse_dag(&["x", "y"], &["(+ x y)", "(* (/ 1 2) y)"]).unwrap();
        let x = IntervalVector::new(vec![Interval::new(0.9, 1.1), Interval::new(-0.1, 0.1)]);
        let ctrl = StepControl::default();
        let fj = integrate(&f, &Jet2::identity(&x), 1.0, &ctrl).unwrap();
        assert!(fj.d2phi.max_mag() <= ctrl.tolerance);
    }

    #[test]
    fn quadratic_field_second_derivative() {
        // x' = x^2 from x0: phi = x0 / (1 - t x0), d2phi/dx0^2 = 2t / (1 - t x0)^3
        let f = parse_dag(&["x"], &["(sqr x)"]).unwrap();
        let fj = integrate(&f, &Jet2::identity(&IntervalVector::from_points(&[0.5])), 1.0, &StepControl::default()).unwrap();
        assert!(fj.state[0].contains(1.0));
        assert!(fj.dphi.get(0, 0).contains(4.0));
        assert!(fj.d2phi.get(0, 0, 0).contains(16.0));
        assert!(fj.d2phi.get(0, 0, 0).width() < 1e-6);
    }

    fn sheared_local() -> (ExprDag, Jet2) {
        let chart = parse_dag(&["a", "b", "c"], &["(- a c)", "b", "(+ a c (* (/ 1 10) (sqr a)))"]).unwrap();
        let value = IntervalVector::new(vec![Interval::new(0.1, 0.1001), Interval::new(1.0, 2.0), Interval::symmetric(1e-3)]);
        let mut jac = IntervalMatrix::zeros(3, 1);
        jac.set(1, 0, Interval::ONE);
        jac.set(2, 0, Interval::symmetric(1e-5));
        let mut hess = SymTensor3::zeros(3, 1);
        hess.set(2, 0, 0, Interval::symmetric(1e-4));
        (chart, Jet2::new(value, jac, hess))
    }

    #[test]
    fn chart_start_encloses_composition() {
        let (chart, local) = sheared_local();
        let fj = FlowJet::from_chart(&chart, &local, 0.0).unwrap();
        let seed = compose_jet2(&eval_jet2(&chart, &local.value).unwrap(), &local).unwrap();
        assert!(fj.state.subset(&seed.value));
        assert!(fj.dphi.subset(&seed.jacobian));
        assert!(flatten(&fj.d2phi).subset(&flatten(&seed.hessian)));
        let rep = fj.representation.state.hull().column(0);
        for a in [0.1, 0.10005, 0.1001] {
            for c in [-1e-3, 0.0, 1e-3] {
                let x = chart.eval_point(&[a, 1.5, c]).unwrap();
                assert!(rep.iter().zip(&x).all(|(r, v)| r.contains(*v)), "{a} {c}");
            }
        }
    }

    #[test]
    fn chart_start_is_tighter_after_flow() {
        let (chart, local) = sheared_local();
        let f = parse_dag(&["x", "y", "z"], &["z", "0", "(neg x)"]).unwrap();
        let ctrl = StepControl::default();
        let seed = compose_jet2(&eval_jet2(&chart, &local.value).unwrap(), &local).unwrap();
        // a quarter turn aligns the chart's diagonal directions with the axes
        let t = std::f64::consts::FRAC_PI_4;
        let by_chart = integrate_from(&f, FlowJet::from_chart(&chart, &local, 0.0).unwrap(), t, &ctrl).unwrap();
        let by_box = integrate(&f, &seed, t, &ctrl).unwrap();
        let narrow = |s: &IntervalVector| s[0].width().min(s[2].width());
        assert!(narrow(&by_chart.state) < 0.2 * narrow(&by_box.state));
        for i in 0..3 {
            assert!(by_chart.state[i].intersection(&by_box.state[i]).is_some());
        }
    }

    #[test]
    fn flatten_round_trip() {
        let mut t = SymTensor3::zeros(2, 3);
        t.set(1, 0, 2, Interval::point(4.0));
        t.set(0, 1, 1, Interval::new(-1.0, 1.0));
        assert_eq!(unflatten(&flatten(&t), 3), t);
    }
}
