use jets::ExprDag;
use lognorm::{lognorm_upper, ml_lower, opnorm_sup_tight};
use rayon::prelude::*;

use crate::blocks::{cell_jets, split_blocks, BlockPartials, Blocking, SlopeMode};
use crate::rates::{check_rate_conditions, rate_constants, RateConstants};
use crate::{DomainSpec, NhimError};

/// Cone constants for slope `M`, in original coordinates:
/// `xi = inf m_l(df_x/dx) - M sup |df_x/dy|`,
/// `mu1 = sup l(df_y/dy) + (1/M) sup |df_y/dx|`,
/// `mu2 = sup l(df_y/dy) + M sup |df_x/dy|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeRates {
    pub xi: f64,
    pub mu1: f64,
    pub mu2: f64,
}

/// Outcome of a slope check: `mu1 < xi` certifies that the manifold is the
/// graph of a function of the `x` block with Lipschitz constant `M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeCheck {
    pub mode: SlopeMode,
    pub m: f64,
    pub rates: ConeRates,
    pub passed: bool,
}

pub(crate) fn cone_rates(blocks: &[BlockPartials], m: f64) -> ConeRates {
    let per: Vec<(f64, f64, f64, f64)> = blocks
        .par_iter()
        .map(|b| {
            (
                ml_lower(&b.dfx_dx),
                opnorm_sup_tight(&b.dfx_dy),
                lognorm_upper(&b.dfy_dy),
                opnorm_sup_tight(&b.dfy_dx),
            )
        })
        .collect();
    let mut ml = f64::INFINITY;
    let mut nxy = 0.0f64;
    let mut l = f64::NEG_INFINITY;
    let mut nyx = 0.0f64;
    for (a, b, c, d) in per {
        ml = ml.min(a);
        nxy = nxy.max(b);
        l = l.max(c);
        nyx = nyx.max(d);
    }
    let mi = (1.0 / m).next_up();
    ConeRates {
        xi: (ml - (m * nxy).next_up()).next_down(),
        mu1: (l + (mi * nyx).next_up()).next_up(),
        mu2: (l + (m * nxy).next_up()).next_up(),
    }
}

pub(crate) fn blocks_for(f: &ExprDag, d: &DomainSpec, mode: SlopeMode) -> Result<Vec<BlockPartials>, NhimError> {
    let b = Blocking::new(d, mode);
    Ok(cell_jets(f, d)?
        .into_iter()
        .map(|(cell, jet)| split_blocks(cell, &jet, &b))
        .collect())
}

/// Verifies `mu1(M) < xi(M)` over `D` for the blocks chosen by `mode`.
pub fn slope_check(f: &ExprDag, d: &DomainSpec, m: f64, mode: SlopeMode) -> Result<SlopeCheck, NhimError> {
    assert!(m > 0.0, "slope must be positive");
    let rates = cone_rates(&blocks_for(f, d, mode)?, m);
    Ok(SlopeCheck {
        mode,
        m,
        rates,
        passed: rates.mu1 < rates.xi,
    })
}

/// Result of the automatic choice of `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct AutoL {
    /// Smallest verified scale: stable radius `R * l`, graph slope `l`.
    pub l: f64,
    pub domain: DomainSpec,
    pub rates: RateConstants,
    pub slope: SlopeCheck,
    pub evaluations: usize,
}

/// Lower end of the bisection: scales below this count as "any L works".
pub const L_FLOOR: f64 = 1e-12;

/// Relative tolerance of the bisection.
pub const L_TOLERANCE: f64 = 1e-3;

fn feasible(f: &ExprDag, template: &DomainSpec, s: f64, order: usize) -> Result<Option<(DomainSpec, RateConstants, SlopeCheck)>, NhimError> {
    let d = template.with_stable_scale(s);
    let rc = rate_constants(f, &d)?;
    if !check_rate_conditions(&rc, order).passed() {
        return Ok(None);
    }
    let sc = slope_check(f, &d, s, SlopeMode::Graph)?;
    Ok(sc.passed.then_some((d, rc, sc)))
}

/// Smallest `L` in `[L_FLOOR, l_max]` (to relative tolerance
/// [`L_TOLERANCE`]) for which the domain with stable radius `R * L`
/// satisfies the rate conditions of order `order` and the graph slope
/// check with slope `L`. Bisection is geometric and the returned value is
/// always one at which both checks passed.
pub fn auto_l(f: &ExprDag, template: &DomainSpec, l_max: f64, order: usize) -> Result<AutoL, NhimError> {
    assert!(l_max > 0.0 && l_max < 1.0, "L_max must lie in (0, 1)");
    let mut evaluations = 1;
    let mut best = feasible(f, template, l_max, order)?.ok_or(NhimError::Infeasible { l_max })?;
    let mut hi = l_max;
    let mut lo = L_FLOOR;
    evaluations += 1;
    if let Some(found) = feasible(f, template, lo, order)? {
        best = found;
        hi = lo;
    }
    while hi > lo * (1.0 + L_TOLERANCE) {
        let mid = (lo * hi).sqrt();
        evaluations += 1;
        match feasible(f, template, mid, order)? {
            Some(found) => {
                best = found;
                hi = mid;
            }
            None => lo = mid,
        }
    }
    let (domain, rates, slope) = best;
    Ok(AutoL {
        l: hi,
        domain,
        rates,
        slope,
        evaluations,
    })
}
