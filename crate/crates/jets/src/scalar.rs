use interval_core::{Interval, IntervalError};

/// Number type the expression evaluator and the Taylor recursion run on.
///
/// Implemented for `f64` (plain floating point, used for non-rigorous
/// estimates), [`Interval`] and [`crate::Jet2Scalar`].
pub trait Scalar: Clone + Sized {
    /// A constant with the same shape (e.g. jet dimension) as `like`.
    fn constant(c: Interval, like: &Self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: Interval) -> Self;
    fn div(&self, o: &Self) -> Result<Self, IntervalError>;
    fn sqr(&self) -> Self;
    fn sqrt(&self) -> Result<Self, IntervalError>;
    fn exp(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;

    fn zero(like: &Self) -> Self {
        Self::constant(Interval::ZERO, like)
    }
}

impl Scalar for f64 {
    fn constant(c: Interval, _: &Self) -> Self {
        c.mid()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: Interval) -> Self {
        self * c.mid()
    }
    fn div(&self, o: &Self) -> Result<Self, IntervalError> {
        if *o == 0.0 {
            return Err(IntervalError::DivisionByZero { lo: 0.0, hi: 0.0 });
        }
        Ok(self / o)
    }
    fn sqr(&self) -> Self {
        self * self
    }
    fn sqrt(&self) -> Result<Self, IntervalError> {
        if *self < 0.0 {
            return Err(IntervalError::Domain {
                op: "sqrt",
                lo: *self,
                hi: *self,
            });
        }
        Ok(f64::sqrt(*self))
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
}

impl Scalar for Interval {
    fn constant(c: Interval, _: &Self) -> Self {
        c
    }
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn sub(&self, o: &Self) -> Self {
        *self - *o
    }
    fn mul(&self, o: &Self) -> Self {
        *self * *o
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn scale(&self, c: Interval) -> Self {
        *self * c
    }
    fn div(&self, o: &Self) -> Result<Self, IntervalError> {
        Interval::div(self, o)
    }
    fn sqr(&self) -> Self {
        Interval::sqr(self)
    }
    fn sqrt(&self) -> Result<Self, IntervalError> {
        Interval::sqrt(self)
    }
    fn exp(&self) -> Self {
        Interval::exp(self)
    }
    fn sin(&self) -> Self {
        Interval::sin(self)
    }
    fn cos(&self) -> Self {
        Interval::cos(self)
    }
}
