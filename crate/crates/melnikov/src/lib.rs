//! Melnikov-type distance between the unstable and stable manifold traces on
//! a section: its parameter derivatives from manifold charts and crossing
//! maps, the sign conditions that certify a transversal intersection near
//! zero parameter, and direct sign-change checks for larger parameters.

pub mod cells;
pub mod certificate;
pub mod chart;
pub mod delta;

use integrator::IntegratorError;
use interval_core::IntervalError;
use jets::JetError;
use poincare::PoincareError;
use thiserror::Error;

pub use cells::{continuation, coverage_gaps, direct_bounds, melnikov_bounds, schedule, CellBounds, CellResult, CellSpec, ContinuationReport, TauParams};
pub use certificate::{verify_direct, verify_theorem_main, CellMode, Clause, Sign, SignPattern, TransversalityCertificate};
pub use chart::{manifold_local_chart, Branch, BranchGeometry, LocalLayout, ManifoldChart};
pub use delta::{branch_terms, delta_bounds, delta_derivatives, BranchTerms, ChartPair, DeltaBounds};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MelnikovError {
    #[error("certificate missing: {0}")]
    CertificateMissing(String),
    #[error("sign not definite: {clause}")]
    SignIndefinite { clause: String },
    #[error("sign pattern violated: {clause}")]
    PatternMismatch { clause: String },
    #[error("chart geometry: {0}")]
    Geometry(String),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("coverage: {0}")]
    Coverage(String),
    #[error(transparent)]
    Poincare(#[from] PoincareError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}
