//! Outward-rounded interval arithmetic on `f64`.
//!
//! Every operation returns an interval that contains the exact real result
//! for all point inputs. Rounding is emulated from round-to-nearest results
//! by error-free transformations, so no floating-point environment state is
//! touched and all values are safe to share between threads.

pub mod boxes;
pub mod error;
pub mod interval;
pub mod matrix;
pub mod newton;
pub mod rounding;
pub mod transcendental;
pub mod vector;

pub use boxes::{split, split_grid, IntervalBox, Topology};
pub use error::{IntervalError, NewtonError};
pub use interval::Interval;
pub use matrix::{mat_m_lower, mat_opnorm_sup, IntervalMatrix, Matrix};
pub use newton::{interval_newton, interval_newton_refine};
pub use transcendental::{half_pi, pi, two_pi};
pub use vector::{vec_norm_sup, IntervalVector};
