//! Validated integration of autonomous ODEs `x' = f(x)` given as expression
//! DAGs.
//!
//! A step is an interval Taylor expansion in time with a Lagrange remainder
//! evaluated over an a-priori (rough) enclosure. The same recursion run in
//! second-order jet arithmetic gives the first and second variational
//! equations, so one step yields enclosures of `phi_h`, `D phi_h` and
//! `D^2 phi_h` over the current set. The set, every column of the first
//! derivative and every packed slice of the second derivative are kept as
//! parallelepipeds (point center, orthogonal basis, interval coefficients)
//! re-orthogonalized by QR after each step.

pub mod control;
pub mod flow;
pub mod lohner;
pub mod point;
pub mod rough;

use interval_core::IntervalError;
use jets::JetError;
use thiserror::Error;

pub use control::StepControl;
pub use flow::{advance, flow_step, integrate, integrate_from, prepare_step, FlowJet, PreparedStep, Representation, StepMap, TaylorStep};
pub use lohner::Parallelepiped;
pub use point::{point_flow, point_step};
pub use rough::{rough_enclosure, rough_jet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegratorError {
    #[error("no a-priori enclosure found for step {h:e}")]
    TooLarge { h: f64 },
    #[error("step size fell below h_min = {h_min:e} at t = {t:e}")]
    StepFloor { t: f64, h_min: f64 },
    #[error("invalid step control: {0}")]
    InvalidControl(String),
    #[error("field has {outputs} outputs for {arity} variables")]
    NotAField { arity: usize, outputs: usize },
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}
