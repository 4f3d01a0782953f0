use integrator::StepControl;
use interval_core::Interval;
use poincare::{kappa_derivatives, kappa_fixed_point, kappa_residuals, KappaDerivatives, PoincareError};

use crate::chart::{Branch, ManifoldChart};
use crate::MelnikovError;

/// Attempts at widening the alignment bracket before giving up.
const BRACKET_ATTEMPTS: usize = 6;

/// The two branch charts and the coordinate whose gap on the section is the
/// distance `delta = orientation (pi h^u - pi h^s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPair {
    pub unstable: ManifoldChart,
    pub stable: ManifoldChart,
    pub gap_coord: usize,
    /// `1` or `-1`; `-1` measures the gap along the negated axis.
    pub orientation: f64,
}

impl ChartPair {
    pub fn new(unstable: ManifoldChart, stable: ManifoldChart, gap_coord: usize) -> Self {
        ChartPair {
            unstable,
            stable,
            gap_coord,
            orientation: 1.0,
        }
    }

    /// The same pair measuring the gap along the negated axis.
    pub fn mirrored(&self) -> Self {
        ChartPair {
            orientation: -self.orientation,
            ..self.clone()
        }
    }

    pub fn restricted(&self, eps: Interval) -> Result<Self, MelnikovError> {
        Ok(ChartPair {
            unstable: self.unstable.restricted(eps)?,
            stable: self.stable.restricted(eps)?,
            ..self.clone()
        })
    }

    pub fn chart(&self, b: Branch) -> &ManifoldChart {
        match b {
            Branch::Unstable => &self.unstable,
            Branch::Stable => &self.stable,
        }
    }
}

/// Enclosures for one branch over `E x tau`.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchTerms {
    pub branch: Branch,
    /// Verified bracket `A` on which the alignment map is monotone.
    pub bracket: Interval,
    /// `kappa(E, tau)`.
    pub kappa: Interval,
    pub kappa_derivatives: KappaDerivatives,
    /// The implicit relations evaluated with the `kappa` derivatives; each
    /// must contain zero.
    pub residuals: [Interval; 3],
    /// Sum of widths of the alignment-map partials entering `kappa`.
    pub residual_input_width: f64,
    /// `pi h(E, kappa)` and its derivatives along `kappa`.
    pub value: Interval,
    pub d_eps: Interval,
    pub d2_tau_eps: Interval,
    pub d_tau: Interval,
}

/// `d/deps`, `d2/dtau deps` and `d/dtau` of `delta` and optionally `delta`,
/// over `eps x tau`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaBounds {
    pub tau: Interval,
    pub eps: Interval,
    pub d_eps: Interval,
    pub d2_tau_eps: Interval,
    pub delta: Option<Interval>,
    pub d_tau: Option<Interval>,
    pub unstable: BranchTerms,
    pub stable: BranchTerms,
}

impl DeltaBounds {
    pub fn branch(&self, b: Branch) -> &BranchTerms {
        match b {
            Branch::Unstable => &self.unstable,
            Branch::Stable => &self.stable,
        }
    }
}

/// Non-rigorous guess of `kappa` over the corners of `E x tau` from point
/// crossings, using `pi_s h(eps, s) = s + rate T(eps, s)`.
fn kappa_guess(chart: &ManifoldChart, eps: Interval, tau: Interval) -> Result<Interval, MelnikovError> {
    let rate = chart.time_rate;
    let flight = |e: f64, s: f64| -> Result<f64, MelnikovError> { Ok(chart.approximate_crossing(e, s)?.0) };
    let (em, tm) = (eps.mid(), tau.mid());
    let mut s = tm - rate * flight(em, tm)?;
    s = tm - rate * flight(em, s)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for e in [eps.lo(), eps.hi()] {
        let t = flight(e, s)?;
        for tt in [tau.lo(), tau.hi()] {
            let k = tt - rate * t;
            lo = lo.min(k);
            hi = hi.max(k);
        }
    }
    let pad = 0.25 * (hi - lo) + 1e-7;
    Ok(Interval::new(lo - pad, hi + pad))
}

/// Enclosures for one branch: verifies a bracket for `kappa` with a single
/// crossing-map jet over `E x A` and assembles the derivatives of
/// `pi h(eps, kappa(eps, tau))`.
pub fn branch_terms(chart: &ManifoldChart, eps: Interval, tau: Interval, gap_coord: usize, ctrl: &StepControl) -> Result<BranchTerms, MelnikovError> {
    let rate = Interval::point(chart.time_rate);
    let mut a = kappa_guess(chart, eps, tau)?;
    let mut last = None;
    for _ in 0..BRACKET_ATTEMPTS {
        let h = chart.h_map(eps, a, ctrl)?;
        let g = h.component(chart.ambient_time);
        let slope = g.jacobian.get(0, 1);
        let offset = rate * h.time;
        match kappa_fixed_point(tau, a, offset, slope) {
            Ok(kappa) => {
                let kd = kappa_derivatives(&g)?;
                let residuals = kappa_residuals(&g, &kd);
                let residual_input_width = [g.jacobian.get(0, 0), g.jacobian.get(0, 1), g.hessian.get(0, 0, 1), g.hessian.get(0, 1, 1)].iter().map(Interval::width).sum();
                let x = h.component(gap_coord);
                let (he, hs) = (x.jacobian.get(0, 0), x.jacobian.get(0, 1));
                let (hes, hss) = (x.hessian.get(0, 0, 1), x.hessian.get(0, 1, 1));
                return Ok(BranchTerms {
                    branch: chart.branch,
                    bracket: a,
                    kappa,
                    kappa_derivatives: kd,
                    residuals,
                    residual_input_width,
                    value: x.value[0],
                    d_eps: he + hs * kd.d_eps,
                    d2_tau_eps: hes * kd.d_tau + hss * kd.d_tau * kd.d_eps + hs * kd.d_eps_tau,
                    d_tau: hs * kd.d_tau,
                });
            }
            Err(e) => {
                if slope.lo() <= 0.0 {
                    return Err(e.into());
                }
                let image = tau - offset;
                let wide = a.hull(&image);
                a = wide.inflate(0.5 * wide.width() + 1e-9);
                last = Some(e);
            }
        }
    }
    Err(last.unwrap_or_else(|| PoincareError::BracketFails("no attempt made".into())).into())
}

/// Derivative bounds of `delta` over `eps x tau`; `with_delta` also encloses
/// `delta` itself (direct mode).
pub fn delta_bounds(pair: &ChartPair, eps: Interval, tau: Interval, ctrl: &StepControl, with_delta: bool) -> Result<DeltaBounds, MelnikovError> {
    let u = branch_terms(&pair.unstable, eps, tau, pair.gap_coord, ctrl)?;
    let s = branch_terms(&pair.stable, eps, tau, pair.gap_coord, ctrl)?;
    let o = Interval::point(pair.orientation);
    Ok(DeltaBounds {
        tau,
        eps,
        d_eps: o * (u.d_eps - s.d_eps),
        d2_tau_eps: o * (u.d2_tau_eps - s.d2_tau_eps),
        delta: with_delta.then(|| o * (u.value - s.value)),
        d_tau: Some(o * (u.d_tau - s.d_tau)),
        unstable: u,
        stable: s,
    })
}

/// `d delta/d eps` and `d2 delta/d tau d eps` over `eps x tau`.
pub fn delta_derivatives(pair: &ChartPair, eps: Interval, tau: Interval, ctrl: &StepControl) -> Result<DeltaBounds, MelnikovError> {
    delta_bounds(pair, eps, tau, ctrl, false)
}
