//! Verification of normally hyperbolic invariant manifolds of vector fields.
//!
//! The domain is `D = Lambda x B_u(R) x B_s(R_s)` with center coordinates
//! `lambda`, unstable coordinates `x` and stable coordinates `y`. From
//! interval enclosures of `Df` and `D^2 f` over the cells of `D` this crate
//! computes the rate constants, checks the rate conditions and the
//! isolating-block sign conditions, chooses the smallest certifiable slope
//! `L` of the center-unstable graph and bounds its second derivatives.

pub mod blocks;
pub mod domain;
pub mod isolating;
pub mod rates;
pub mod report;
pub mod second;
pub mod slope;

pub use blocks::{block_partials, normalize_jacobian, BlockPartials, Blocking, SlopeMode};
pub use domain::{CenterCoord, DomainSpec, Role};
pub use isolating::{check_isolating_block, mean_value_enclosure, BlockCheck, Face};
pub use rates::{check_rate_conditions, rate_constants, rate_inequalities, RateCheck, RateConstants, Violation};
pub use report::{verify_nhim, NhimOptions, NhimReport, IMPLIED_CLAUSES};
pub use second::{second_deriv_bound, MFormula, SecondDerivConstants};
pub use slope::{auto_l, slope_check, AutoL, ConeRates, SlopeCheck, L_FLOOR, L_TOLERANCE};

use interval_core::IntervalError;
use jets::JetError;

#[derive(Debug, thiserror::Error)]
pub enum NhimError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("no slope up to {l_max:e} satisfies the rate conditions")]
    Infeasible { l_max: f64 },
    #[error("cone rates violate mu1 < xi, mu2 < 2 xi (xi = {xi:e}, mu1 = {mu1:e}, mu2 = {mu2:e})")]
    RateHypothesisViolated { xi: f64, mu1: f64, mu2: f64 },
}
