//! Crossings of coordinate sections with rigorous jets of the crossing map,
//! and the time-alignment function `kappa` solving `pi_s h(eps, s) = tau`.

pub mod crossing;
pub mod kappa;
pub mod section;

use integrator::IntegratorError;
use interval_core::IntervalError;
use jets::JetError;
use thiserror::Error;

pub use crossing::{first_crossing, first_crossing_from, point_crossing, CrossingJet};
pub use kappa::{kappa_derivatives, kappa_fixed_point, kappa_residuals, solve_kappa, AlignmentMap, KappaBracket, KappaDerivatives, KAPPA_TOLERANCE};
pub use section::Section;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PoincareError {
    #[error("no crossing with the section before t = {t_max}")]
    NoCrossing { t_max: f64 },
    #[error("normal velocity not sign-definite near t = {t:e}")]
    NotTransversal { t: f64 },
    #[error("kappa bracket fails: {0}")]
    BracketFails(String),
    #[error("denominator {lo:e}..{hi:e} contains zero")]
    DegenerateDenominator { lo: f64, hi: f64 },
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}
