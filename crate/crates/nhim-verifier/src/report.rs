use jets::ExprDag;

use crate::blocks::SlopeMode;
use crate::isolating::{check_isolating_block, BlockCheck};
use crate::rates::{check_rate_conditions, RateCheck, RateConstants};
use crate::second::{second_deriv_bound, SecondDerivConstants};
use crate::slope::{auto_l, SlopeCheck};
use crate::{DomainSpec, NhimError};

/// Settings of a full verification run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NhimOptions {
    /// Order `k` of the rate conditions.
    pub order: usize,
    /// Upper end of the search for `L`.
    pub l_max: f64,
}

impl Default for NhimOptions {
    fn default() -> Self {
        NhimOptions { order: 2, l_max: 0.5 }
    }
}

/// Clauses that follow from the checked ones by theorem rather than by a
/// separate computation.
pub const IMPLIED_CLAUSES: [&str; 3] = [
    "backward cone conditions: implied by the rate conditions and the isolating block for small time steps",
    "covering conditions: implied by the isolating block for small time steps",
    "center coordinate with boundary: invariant since its derivative vanishes",
];

/// Everything established for one field over one domain.
#[derive(Clone, Debug, PartialEq)]
pub struct NhimReport {
    /// Certified slope `L`: stable radius `R * L` and graph slope `L`.
    pub l: f64,
    pub domain: DomainSpec,
    pub order: usize,
    pub rates: RateConstants,
    pub rate_check: RateCheck,
    pub isolating: BlockCheck,
    pub slope: SlopeCheck,
    pub second: SecondDerivConstants,
}

impl NhimReport {
    pub fn passed(&self) -> bool {
        self.rate_check.passed() && self.isolating.passed() && self.slope.passed
    }

    /// Bound on every first partial of the center-unstable graph.
    pub fn first_deriv_bound(&self) -> f64 {
        self.l
    }

    /// Bound `2M` on every second partial of the center-unstable graph.
    pub fn second_deriv_bound(&self) -> f64 {
        (2.0 * self.second.m_bound).next_up()
    }
}

/// Chooses `L`, then checks the rate conditions, the isolating block, the
/// graph slope and the second-derivative bound on the resulting domain.
pub fn verify_nhim(f: &ExprDag, template: &DomainSpec, opts: NhimOptions) -> Result<NhimReport, NhimError> {
    let a = auto_l(f, template, opts.l_max, opts.order)?;
    let rate_check = check_rate_conditions(&a.rates, opts.order);
    let isolating = check_isolating_block(f, &a.domain)?;
    let second = second_deriv_bound(f, &a.domain, a.l, SlopeMode::Graph)?;
    Ok(NhimReport {
        l: a.l,
        domain: a.domain,
        order: opts.order,
        rates: a.rates,
        rate_check,
        isolating,
        slope: a.slope,
        second,
    })
}
