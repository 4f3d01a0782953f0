use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("division by an interval containing zero: [{lo:e}, {hi:e}]")]
    DivisionByZero { lo: f64, hi: f64 },
    #[error("{op} is undefined on [{lo:e}, {hi:e}]")]
    Domain { op: &'static str, lo: f64, hi: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("interval matrix is not verifiably invertible")]
    Singular,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NewtonError {
    #[error("Newton image is not contained in the search box")]
    NoContraction,
    #[error("interval Jacobian cannot be inverted")]
    SingularJacobian,
    #[error(transparent)]
    Interval(#[from] IntervalError),
}
