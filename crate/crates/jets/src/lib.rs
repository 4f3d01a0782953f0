//! Expression DAGs and interval second-order jets.
//!
//! A vector field is given as an [`ExprDag`]. Evaluating it over a box with
//! [`Jet2Scalar`] inputs yields enclosures of the value, the Jacobian and
//! the Hessian of every output ([`eval_jet2`]). The same DAG drives the
//! Taylor-coefficient recursion used by the integrator ([`ExprDag::taylor`]).

pub mod dag;
pub mod error;
pub mod hexfloat;
pub mod jet;
pub mod scalar;
pub mod sexpr;

pub use dag::{eval_jet2, eval_jet2_seeded, BinaryOp, DagBuilder, ExprDag, Node, NodeId, UnaryOp};
pub use error::JetError;
pub use hexfloat::{format_hex, parse_hex};
pub use jet::{compose_jet2, Jet2, Jet2Scalar, SymTensor3, MAX_DIM};
pub use scalar::Scalar;
pub use sexpr::{format_dag, parse_dag, parse_number};
