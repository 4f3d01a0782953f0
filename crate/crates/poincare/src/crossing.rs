use integrator::{advance, point_step, prepare_step, FlowJet, IntegratorError, PreparedStep, StepControl};
use interval_core::{Interval, IntervalMatrix, IntervalVector};
use jets::{eval_jet2, ExprDag, Jet2, SymTensor3};

use crate::{PoincareError, Section};

/// Bisection depth for the ends of the crossing-time interval.
const TIME_BISECTIONS: usize = 40;

/// The crossing map `P(p) = Phi(t(p), p)` of a seed jet over `m`
/// parameters, with `t(p)` the first crossing time.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossingJet {
    /// Crossing times of all seed points.
    pub time: Interval,
    /// Crossing points; the section coordinate is pinned to the level.
    pub point: IntervalVector,
    pub dp: IntervalMatrix,
    pub d2p: SymTensor3,
    /// First and second derivatives of the crossing time.
    pub dtime: IntervalVector,
    pub d2time: SymTensor3,
    /// Normal velocity sign-definite over the crossing tube.
    pub transversal: bool,
}

impl CrossingJet {
    pub fn jet(&self) -> Jet2 {
        Jet2::new(self.point.clone(), self.dp.clone(), self.d2p.clone())
    }

    /// Jet of one coordinate of the crossing point.
    pub fn component(&self, k: usize) -> Jet2 {
        self.jet().select_outputs(&[k])
    }
}

fn tube(fj: &FlowJet, p: &PreparedStep, lo: f64, hi: f64) -> Result<FlowJet, IntegratorError> {
    advance(fj, &p.step, Interval::new(lo, hi), None)
}

fn hull_flow(a: &FlowJet, b: &FlowJet) -> FlowJet {
    let mut out = a.clone();
    out.time = a.time.hull(&b.time);
    out.state = a.state.hull(&b.state);
    out.dphi = a.dphi.hull(&b.dphi);
    out.d2phi = a.d2phi.hull(&b.d2phi);
    out
}

/// Largest offset `a` in `[0, h]` (to bisection depth) such that the tube
/// over `[0, a]` lies strictly before the section.
fn last_before(fj: &FlowJet, p: &PreparedStep, sec: &Section, h: f64) -> Result<f64, PoincareError> {
    if !sec.strictly_before(&tube(fj, p, 0.0, 0.0)?.state) {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, h);
    for _ in 0..TIME_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        // [0, lo] is already certified; only the new piece is checked
        if sec.strictly_before(&tube(fj, p, lo, mid)?.state) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Smallest offset `b` in `[a, h]` with the state at `b` strictly after the
/// section; the state at `h` must be.
fn first_after(fj: &FlowJet, p: &PreparedStep, sec: &Section, a: f64, h: f64) -> Result<f64, PoincareError> {
    let (mut lo, mut hi) = (a, h);
    for _ in 0..TIME_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if sec.strictly_after(&tube(fj, p, mid, mid)?.state) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Moves `fj` forward by the offset `a` of the prepared step.
fn advance_by(fj: &FlowJet, p: &PreparedStep, a: f64) -> Result<Option<FlowJet>, PoincareError> {
    let t = fj.time.lo();
    let t_next = t + a;
    let dt = Interval::point(t_next) - Interval::point(t);
    if t_next <= t || dt.hi() > p.dt.hi() {
        return Ok(None);
    }
    Ok(Some(advance(fj, &p.step, dt, Some(t_next))?))
}

fn transversal_on(f: &ExprDag, sec: &Section, x: &IntervalVector, t: f64) -> Result<(), PoincareError> {
    if sec.normal_velocity(f, x)?.lo() > 0.0 {
        Ok(())
    } else {
        Err(PoincareError::NotTransversal { t })
    }
}

/// First crossing of the flow of `f` from the seed jet with `sec`, before
/// time `t_max`.
///
/// The flow is advanced while its tube stays strictly before the section or
/// moves away from it. In the step where the tube reaches the section with
/// sign-definite normal velocity, the crossing times are bracketed by
/// bisection, the fixed-time jet `G` is enclosed over that time interval,
/// and the implicitly defined crossing time `t(p)` (with
/// `sigma(G(t(p), p)) = level`) gives
///
/// * `t_a = -G^sigma_a / F^sigma`, `P_a = G_a + F t_a`,
/// * `t_ab = -(G^sigma_ab + (Df G_a)^sigma t_b + (Df G_b)^sigma t_a + (Df F)^sigma t_a t_b) / F^sigma`,
/// * `P_ab = G_ab + Df G_a t_b + Df G_b t_a + Df F t_a t_b + F t_ab`,
///
/// with `F = f(G)` and `Df` enclosed over the crossing tube.
pub fn first_crossing(f: &ExprDag, seed: &Jet2, sec: &Section, ctrl: &StepControl, t_max: f64) -> Result<CrossingJet, PoincareError> {
    first_crossing_from(f, FlowJet::from_seed(seed, 0.0), sec, ctrl, t_max)
}

/// [`first_crossing`] from an initial flow jet (at time 0) in any
/// representation.
pub fn first_crossing_from(f: &ExprDag, initial: FlowJet, sec: &Section, ctrl: &StepControl, t_max: f64) -> Result<CrossingJet, PoincareError> {
    let mut fj = initial;
    loop {
        let t = fj.time.lo();
        if t >= t_max {
            return Err(PoincareError::NoCrossing { t_max });
        }
        let p = prepare_step(f, &fj, ctrl, t_max)?;
        let h = p.dt.hi();
        let whole = tube(&fj, &p, 0.0, h)?;
        if sec.strictly_before(&whole.state) {
            fj = advance(&fj, &p.step, p.dt, Some(p.t_next))?;
            continue;
        }
        let v = sec.normal_velocity(f, &whole.state)?;
        if v.hi() < 0.0 {
            // moving away from the section: no crossing in this direction
            fj = advance(&fj, &p.step, p.dt, Some(p.t_next))?;
            continue;
        }
        let a = last_before(&fj, &p, sec, h)?;
        if v.lo() <= 0.0 {
            match advance_by(&fj, &p, a)? {
                Some(next) if a >= ctrl.h_min => {
                    fj = next;
                    continue;
                }
                _ => return Err(PoincareError::NotTransversal { t }),
            }
        }
        return localize(f, fj, p, a, sec, ctrl, t_max);
    }
}

fn localize(f: &ExprDag, mut fj: FlowJet, mut p: PreparedStep, mut a: f64, sec: &Section, ctrl: &StepControl, t_max: f64) -> Result<CrossingJet, PoincareError> {
    let mut g: Option<FlowJet> = None;
    loop {
        let h = p.dt.hi();
        let end = tube(&fj, &p, h, h)?;
        let (piece, done) = if sec.strictly_after(&end.state) {
            let b = first_after(&fj, &p, sec, a, h)?;
            (tube(&fj, &p, a, b)?, true)
        } else {
            (tube(&fj, &p, a, h)?, false)
        };
        transversal_on(f, sec, &piece.state, fj.time.lo())?;
        g = Some(match g {
            None => piece,
            Some(prev) => hull_flow(&prev, &piece),
        });
        if done {
            break;
        }
        fj = advance(&fj, &p.step, p.dt, Some(p.t_next))?;
        if fj.time.lo() >= t_max {
            return Err(PoincareError::NoCrossing { t_max });
        }
        p = prepare_step(f, &fj, ctrl, t_max)?;
        a = 0.0;
    }
    crossing_jet(f, sec, &g.expect("at least one piece"))
}

fn crossing_jet(f: &ExprDag, sec: &Section, g: &FlowJet) -> Result<CrossingJet, PoincareError> {
    let n = g.dim();
    let m = g.params();
    let c = sec.coord;
    let fg = eval_jet2(f, &g.state)?;
    let big_f = fg.value.clone();
    let df = &fg.jacobian;
    let f_sigma = big_f[c];
    if f_sigma.contains_zero() {
        return Err(PoincareError::NotTransversal { t: g.time.lo() });
    }
    let neg_inv = -f_sigma.recip()?;
    let ga = &g.dphi;
    let dtime: IntervalVector = (0..m).map(|a| ga.get(c, a) * neg_inv).collect();
    let mut dp = ga.clone();
    for k in 0..n {
        for a in 0..m {
            dp.set(k, a, ga.get(k, a) + big_f[k] * dtime[a]);
        }
    }
    for a in 0..m {
        dp.set(c, a, Interval::ZERO);
    }
    let df_ga = df.mul(ga);
    let df_f = df.mul_vec(&big_f);
    let mut d2time = SymTensor3::zeros(1, m);
    let mut d2p = SymTensor3::zeros(n, m);
    for b in 0..m {
        for a in 0..=b {
            let cross = |k: usize| df_ga.get(k, a) * dtime[b] + df_ga.get(k, b) * dtime[a] + df_f[k] * dtime[a] * dtime[b];
            let tab = (g.d2phi.get(c, a, b) + cross(c)) * neg_inv;
            d2time.set(0, a, b, tab);
            for k in 0..n {
                d2p.set(k, a, b, g.d2phi.get(k, a, b) + cross(k) + big_f[k] * tab);
            }
            d2p.set(c, a, b, Interval::ZERO);
        }
    }
    let mut point = g.state.clone();
    point[c] = Interval::point(sec.level);
    Ok(CrossingJet {
        time: g.time,
        point,
        dp,
        d2p,
        dtime,
        d2time,
        transversal: true,
    })
}

/// Non-rigorous first crossing of the flow from the point `x`: returns the
/// crossing time and point. For initial guesses only.
pub fn point_crossing(f: &ExprDag, x: &[f64], sec: &Section, t_max: f64) -> Result<(f64, Vec<f64>), PoincareError> {
    let side = |y: &[f64]| (y[sec.coord] - sec.level) * f64::from(sec.direction);
    let velocity = |y: &[f64]| -> Result<f64, PoincareError> { Ok(f.eval_point(y)?[sec.coord] * f64::from(sec.direction)) };
    let h = 1e-2;
    let mut t = 0.0;
    let mut y = x.to_vec();
    while t < t_max {
        let next = point_step(f, &y, h)?;
        if side(&y) <= 0.0 && side(&next) > 0.0 {
            // Newton on the crossing offset within the step
            let mut s = h * (-side(&y)) / (side(&next) - side(&y));
            for _ in 0..30 {
                let z = point_step(f, &y, s)?;
                let v = velocity(&z)?;
                if v == 0.0 {
                    break;
                }
                let ds = side(&z) / v;
                s -= ds;
                if ds.abs() < 1e-16 {
                    break;
                }
            }
            return Ok((t + s, point_step(f, &y, s)?));
        }
        y = next;
        t += h;
    }
    Err(PoincareError::NoCrossing { t_max })
}
