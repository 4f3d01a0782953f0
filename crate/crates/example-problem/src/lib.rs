//! The reference problem: a planar saddle with a homoclinic loop,
//! `x' = y - eps cos(t) y^2`, `y' = x - x^2`, written as the autonomous
//! field on `(x, eps, t, y)`, together with the local coordinates in which
//! the saddle circle is a normally hyperbolic invariant manifold, the
//! polynomial seed of its unstable manifold and the reversing symmetry.
//!
//! Problems are exchanged as TOML fixtures; [`build_example`] produces the
//! same data programmatically.

pub mod fixture;
pub mod problem;
pub mod seed;
pub mod symmetry;

use interval_core::IntervalError;
use jets::JetError;
use thiserror::Error;

pub use fixture::{example_fixture, load_problem, parse_problem, write_problem, FIXTURE_PATH};
pub use problem::{build_example, diagonal_field, example_ambient, BranchSpec, DomainTemplate, ProblemSpec, Published, AMBIENT_VARS, LOCAL_VARS};
pub use seed::{param_method_seed, ParamSeed, Series, MAX_SEED_ORDER};
pub use symmetry::{symmetry_transport, transport_jet, Involution};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExampleError {
    #[error("resonance: lambda_s - {degree} lambda_u contains zero")]
    ResonanceObstruction { degree: usize },
    #[error("field not in diagonal form: {0}")]
    NotDiagonal(String),
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}
