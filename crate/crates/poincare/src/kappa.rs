use interval_core::Interval;
use jets::Jet2;

use crate::PoincareError;

/// Default width to which `kappa` is bisected.
pub const KAPPA_TOLERANCE: f64 = 1e-6;

/// The function `s -> pi_s h(eps, s)` over a fixed range `E` of `eps`.
pub trait AlignmentMap {
    /// Jet in `(eps, s)` (one output, two variables) over `E x s`.
    fn jet(&self, s: Interval) -> Result<Jet2, PoincareError>;

    /// Enclosure of the values over `E x s`.
    fn value(&self, s: Interval) -> Result<Interval, PoincareError> {
        Ok(self.jet(s)?.value[0])
    }
}

/// An `s`-interval `A` on which `pi_s h` is to be strictly increasing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KappaBracket {
    pub a: Interval,
    /// `d(pi_s h)/ds > 0` verified over `A x E`.
    pub monotone: bool,
}

impl KappaBracket {
    pub fn verify<M: AlignmentMap + ?Sized>(map: &M, a: Interval) -> Result<Self, PoincareError> {
        let d = map.jet(a)?.jacobian.get(0, 1);
        Ok(KappaBracket { a, monotone: d.lo() > 0.0 })
    }
}

/// Sub-interval of `A` containing `kappa(eps, t)` for every `eps` in `E`
/// and `t` in `tau`, where `pi_s h(eps, kappa) = t`.
///
/// Requires `pi_s h(E, a1) < tau < pi_s h(E, a2)` and a monotone bracket;
/// refined by bisection on the sign of `pi_s h - tau` to width `tol` (or
/// until the spread of `pi_s h` over `E` stops the refinement).
pub fn solve_kappa<M: AlignmentMap + ?Sized>(map: &M, tau: Interval, bracket: &KappaBracket, tol: f64) -> Result<Interval, PoincareError> {
    if !bracket.monotone {
        return Err(PoincareError::BracketFails("monotonicity on A not verified".into()));
    }
    let below = |s: f64| -> Result<bool, PoincareError> { Ok(map.value(Interval::point(s))?.hi() < tau.lo()) };
    let above = |s: f64| -> Result<bool, PoincareError> { Ok(map.value(Interval::point(s))?.lo() > tau.hi()) };
    let (mut l, mut u) = (bracket.a.lo(), bracket.a.hi());
    if !below(l)? {
        return Err(PoincareError::BracketFails(format!("pi_s h(E, {l:e}) < tau not verified")));
    }
    if !above(u)? {
        return Err(PoincareError::BracketFails(format!("pi_s h(E, {u:e}) > tau not verified")));
    }
    let mut split = None;
    while u - l > tol {
        let m = 0.5 * (l + u);
        if m <= l || m >= u {
            break;
        }
        let v = map.value(Interval::point(m))?;
        if v.hi() < tau.lo() {
            l = m;
        } else if v.lo() > tau.hi() {
            u = m;
        } else {
            split = Some(m);
            break;
        }
    }
    if let Some(m) = split {
        let mut hi = m;
        while hi - l > tol {
            let c = 0.5 * (l + hi);
            if c <= l || c >= hi {
                break;
            }
            if below(c)? {
                l = c;
            } else {
                hi = c;
            }
        }
        let mut lo = m;
        while u - lo > tol {
            let c = 0.5 * (lo + u);
            if c <= lo || c >= u {
                break;
            }
            if above(c)? {
                u = c;
            } else {
                lo = c;
            }
        }
    }
    Ok(Interval::new(l, u))
}

/// Enclosure of `kappa` over `E x tau` when the aligned coordinate is an
/// angle carried at a constant rate, `pi_s h(eps, s) = s + theta(eps, s)`.
///
/// Given `theta(E x A)` in `offset` and `d(pi_s h)/ds > 0` over `E x A` (in
/// `slope`), every root lies in `tau - offset`; if that image lies in the
/// interior of `A`, then `pi_s h - tau` changes sign on `A` for every `eps`
/// and `tau`, so `kappa` exists, is unique in `A`, and lies in the image.
pub fn kappa_fixed_point(tau: Interval, a: Interval, offset: Interval, slope: Interval) -> Result<Interval, PoincareError> {
    if slope.lo() <= 0.0 {
        return Err(PoincareError::BracketFails(format!("d(pi_s h)/ds over A not positive: {slope:?}")));
    }
    let image = tau - offset;
    if image.lo() > a.lo() && image.hi() < a.hi() {
        Ok(image)
    } else {
        Err(PoincareError::BracketFails(format!("tau - offset = {image:?} not inside A = {a:?}")))
    }
}

/// Partial derivatives of `kappa` from `g = pi_s h - tau`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KappaDerivatives {
    pub d_eps: Interval,
    pub d_tau: Interval,
    pub d_eps_tau: Interval,
}

/// Implicit differentiation of `g(eps, kappa(eps, tau)) = 0` with
/// `dg/dtau = -1`, from the jet of `pi_s h` in `(eps, s)`:
///
/// * `dkappa/deps = -g_eps / g_s`,
/// * `dkappa/dtau = 1 / g_s`,
/// * `d2kappa/deps dtau = -(g_eps,s kappa_tau + g_ss kappa_tau kappa_eps) / g_s`.
pub fn kappa_derivatives(g: &Jet2) -> Result<KappaDerivatives, PoincareError> {
    let gs = g.jacobian.get(0, 1);
    if gs.contains_zero() {
        return Err(PoincareError::DegenerateDenominator { lo: gs.lo(), hi: gs.hi() });
    }
    let d_tau = gs.recip()?;
    let d_eps = -(g.jacobian.get(0, 0) * d_tau);
    let d_eps_tau = -((g.hessian.get(0, 0, 1) * d_tau + g.hessian.get(0, 1, 1) * d_tau * d_eps) * d_tau);
    Ok(KappaDerivatives { d_eps, d_tau, d_eps_tau })
}

/// The derivatives of `g(eps, tau, kappa(eps, tau))` that must vanish:
/// `d/deps`, `d/dtau` and `d2/deps dtau`, evaluated with the enclosures.
pub fn kappa_residuals(g: &Jet2, k: &KappaDerivatives) -> [Interval; 3] {
    let (ge, gs) = (g.jacobian.get(0, 0), g.jacobian.get(0, 1));
    [
        ge + gs * k.d_eps,
        gs * k.d_tau - Interval::ONE,
        g.hessian.get(0, 0, 1) * k.d_tau + g.hessian.get(0, 1, 1) * k.d_tau * k.d_eps + gs * k.d_eps_tau,
    ]
}
