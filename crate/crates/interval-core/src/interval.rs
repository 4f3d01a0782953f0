use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::IntervalError;
use crate::rounding::*;

/// A closed interval `[lo, hi]` of reals with float endpoints.
///
/// Endpoints may be infinite. Every operation returns an interval that
/// contains the exact result for all point inputs.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    /// Builds `[lo, hi]`.
    ///
    /// # Panics
    /// If an endpoint is NaN or `lo > hi`.
    pub fn new(lo: f64, hi: f64) -> Self {
        match Self::try_new(lo, hi) {
            Some(i) => i,
            None => panic!("invalid interval [{lo}, {hi}]"),
        }
    }

    pub fn try_new(lo: f64, hi: f64) -> Option<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            None
        } else {
            Some(Interval { lo, hi })
        }
    }

    pub fn point(x: f64) -> Self {
        Self::new(x, x)
    }

    /// Symmetric interval `[-r, r]`.
    pub fn symmetric(r: f64) -> Self {
        let r = r.abs();
        Self::new(-r, r)
    }

    /// Smallest interval containing both floats.
    pub fn hull_of(a: f64, b: f64) -> Self {
        Self::new(a.min(b), a.max(b))
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// A float inside the interval, close to its center.
    pub fn mid(&self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => {
                let m = 0.5 * self.lo + 0.5 * self.hi;
                m.clamp(self.lo, self.hi)
            }
            (false, true) => {
                if self.hi >= 0.0 {
                    0.0_f64.min(self.hi)
                } else {
                    -f64::MAX.min(-self.hi * 2.0).max(self.hi)
                }
            }
            (true, false) => {
                if self.lo <= 0.0 {
                    0.0
                } else {
                    f64::MAX
                }
            }
            (false, false) => 0.0,
        }
    }

    /// Upper bound of `hi - lo`.
    pub fn width(&self) -> f64 {
        sub_up(self.hi, self.lo)
    }

    /// Upper bound of the distance from `mid()` to either endpoint.
    pub fn rad(&self) -> f64 {
        let m = self.mid();
        sub_up(self.hi, m).max(sub_up(m, self.lo))
    }

    /// Largest absolute value in the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value in the interval.
    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// `self ⊆ other`.
    pub fn subset(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `self` lies in the interior of `other`.
    pub fn interior(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    /// Every element is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.lo > 0.0
    }

    /// Every element is strictly negative.
    pub fn is_negative(&self) -> bool {
        self.hi < 0.0
    }

    /// Strictly positive or strictly negative.
    pub fn is_sign_definite(&self) -> bool {
        self.is_positive() || self.is_negative()
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        Interval::try_new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    /// Adds `[-r, r]`.
    pub fn inflate(&self, r: f64) -> Interval {
        let r = r.abs();
        Interval {
            lo: sub_down(self.lo, r),
            hi: add_up(self.hi, r),
        }
    }

    /// Moves each endpoint outward by `n` ulps.
    pub fn widen_ulps(&self, n: u32) -> Interval {
        let mut lo = self.lo;
        let mut hi = self.hi;
        for _ in 0..n {
            lo = lo.next_down();
            hi = hi.next_up();
        }
        Interval { lo, hi }
    }

    pub fn sqr(&self) -> Interval {
        if self.lo >= 0.0 {
            Interval {
                lo: mul_down(self.lo, self.lo),
                hi: mul_up(self.hi, self.hi),
            }
        } else if self.hi <= 0.0 {
            Interval {
                lo: mul_down(self.hi, self.hi),
                hi: mul_up(self.lo, self.lo),
            }
        } else {
            let m = self.mag();
            Interval {
                lo: 0.0,
                hi: mul_up(m, m),
            }
        }
    }

    /// Square root; fails when the interval has negative elements.
    pub fn sqrt(&self) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::Domain {
                op: "sqrt",
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(Interval {
            lo: sqrt_down(self.lo),
            hi: sqrt_up(self.hi),
        })
    }

    /// Square root of the nonnegative part; fails only when the whole
    /// interval is negative.
    pub fn sqrt_truncated(&self) -> Result<Interval, IntervalError> {
        if self.hi < 0.0 {
            return Err(IntervalError::Domain {
                op: "sqrt",
                lo: self.lo,
                hi: self.hi,
            });
        }
        Interval::new(self.lo.max(0.0), self.hi).sqrt()
    }

    pub fn recip(&self) -> Result<Interval, IntervalError> {
        Interval::ONE.div(self)
    }

    /// Division; a divisor containing zero is an error.
    pub fn div(&self, rhs: &Interval) -> Result<Interval, IntervalError> {
        if rhs.contains_zero() {
            return Err(IntervalError::DivisionByZero {
                lo: rhs.lo,
                hi: rhs.hi,
            });
        }
        let (a, b) = (self, rhs);
        let lo = div_down(a.lo, b.lo)
            .min(div_down(a.lo, b.hi))
            .min(div_down(a.hi, b.lo))
            .min(div_down(a.hi, b.hi));
        let hi = div_up(a.lo, b.lo)
            .max(div_up(a.lo, b.hi))
            .max(div_up(a.hi, b.lo))
            .max(div_up(a.hi, b.hi));
        Ok(Interval { lo, hi })
    }

    pub fn abs(&self) -> Interval {
        Interval {
            lo: self.mig(),
            hi: self.mag(),
        }
    }

    pub fn max(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.max(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn min(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.min(other.hi),
        }
    }

    /// Integer power. Uses monotonicity of `x^n` on each sign branch, so the
    /// result is the tightest enclosure up to rounding.
    pub fn pow_int(&self, n: i32) -> Result<Interval, IntervalError> {
        if n < 0 {
            return self.pow_int(-n)?.recip();
        }
        if n == 0 {
            return Ok(Interval::ONE);
        }
        let n = n as u32;
        if n % 2 == 0 {
            let lo = pow_nonneg(self.mig(), n).lo;
            let hi = pow_nonneg(self.mag(), n).hi;
            Ok(Interval { lo, hi })
        } else {
            let lo = pow_signed(self.lo, n).lo;
            let hi = pow_signed(self.hi, n).hi;
            Ok(Interval { lo, hi })
        }
    }

    /// Splits into `n` consecutive pieces sharing endpoints.
    pub fn split(&self, n: usize) -> Vec<Interval> {
        assert!(n >= 1, "split into zero parts");
        if n == 1 {
            return vec![*self];
        }
        let mut cuts = Vec::with_capacity(n + 1);
        cuts.push(self.lo);
        for i in 1..n {
            let t = i as f64 / n as f64;
            let c = self.lo + (self.hi - self.lo) * t;
            let prev = *cuts.last().unwrap();
            cuts.push(c.clamp(prev, self.hi));
        }
        cuts.push(self.hi);
        cuts.windows(2).map(|w| Interval::new(w[0], w[1])).collect()
    }

    /// Enclosure of the sum of a slice.
    pub fn sum<'a, I: IntoIterator<Item = &'a Interval>>(items: I) -> Interval {
        items.into_iter().fold(Interval::ZERO, |acc, x| acc + *x)
    }
}

/// `x^n` for a float `x >= 0` by repeated squaring.
fn pow_nonneg(x: f64, n: u32) -> Interval {
    let mut result = Interval::ONE;
    let mut base = Interval::point(x);
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            result = result * base;
        }
        base = base.sqr();
        k >>= 1;
    }
    result
}

/// `x^n` for odd `n` and any float `x`.
fn pow_signed(x: f64, n: u32) -> Interval {
    if x >= 0.0 {
        pow_nonneg(x, n)
    } else {
        -pow_nonneg(-x, n)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: add_down(self.lo, rhs.lo),
            hi: add_up(self.hi, rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: sub_down(self.lo, rhs.hi),
            hi: sub_up(self.hi, rhs.lo),
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, rhs: Interval) -> Interval {
        let (a, b) = (self, rhs);
        if a.lo >= 0.0 && b.lo >= 0.0 {
            return Interval {
                lo: mul_down(a.lo, b.lo),
                hi: mul_up(a.hi, b.hi),
            };
        }
        let lo = mul_down(a.lo, b.lo)
            .min(mul_down(a.lo, b.hi))
            .min(mul_down(a.hi, b.lo))
            .min(mul_down(a.hi, b.hi));
        let hi = mul_up(a.lo, b.lo)
            .max(mul_up(a.lo, b.hi))
            .max(mul_up(a.hi, b.lo))
            .max(mul_up(a.hi, b.hi));
        Interval { lo, hi }
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, rhs: f64) -> Interval {
        self + Interval::point(rhs)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, rhs: f64) -> Interval {
        self - Interval::point(rhs)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, rhs: f64) -> Interval {
        self * Interval::point(rhs)
    }
}

impl Mul<Interval> for f64 {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        Interval::point(self) * rhs
    }
}

impl AddAssign for Interval {
    fn add_assign(&mut self, rhs: Interval) {
        *self = *self + rhs;
    }
}

impl SubAssign for Interval {
    fn sub_assign(&mut self, rhs: Interval) {
        *self = *self - rhs;
    }
}

impl MulAssign for Interval {
    fn mul_assign(&mut self, rhs: Interval) {
        *self = *self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_arithmetic() {
        let s = Interval::new(1.0, 2.0) + Interval::new(3.0, 4.0);
        assert_eq!(s, Interval::new(4.0, 6.0));
        let p = Interval::new(1.0, 2.0) * Interval::new(-1.0, 1.0);
        assert_eq!(p, Interval::new(-2.0, 2.0));
        let d = Interval::new(1.0, 2.0).div(&Interval::new(4.0, 8.0)).unwrap();
        assert_eq!(d, Interval::new(0.125, 0.5));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let r = Interval::ONE.div(&Interval::new(-1.0, 1.0));
        assert!(matches!(r, Err(IntervalError::DivisionByZero { .. })));
    }

    #[test]
    fn sqrt_domain() {
        assert!(Interval::new(-1.0, 4.0).sqrt().is_err());
        assert_eq!(
            Interval::new(-1.0, 4.0).sqrt_truncated().unwrap(),
            Interval::new(0.0, 2.0)
        );
        assert_eq!(Interval::new(4.0, 9.0).sqrt().unwrap(), Interval::new(2.0, 3.0));
    }

    #[test]
    fn sqr_of_straddling_interval_is_nonnegative() {
        assert_eq!(Interval::new(-2.0, 1.0).sqr(), Interval::new(0.0, 4.0));
        assert_eq!(Interval::new(-2.0, -1.0).sqr(), Interval::new(1.0, 4.0));
    }

    #[test]
    fn pow_int_matches_repeated_multiplication() {
        let x = Interval::new(-1.5, 0.5);
        assert_eq!(x.pow_int(2).unwrap(), Interval::new(0.0, 2.25));
        assert_eq!(x.pow_int(3).unwrap(), Interval::new(-3.375, 0.125));
        assert_eq!(Interval::new(2.0, 2.0).pow_int(10).unwrap(), Interval::point(1024.0));
        assert_eq!(Interval::new(2.0, 4.0).pow_int(-1).unwrap(), Interval::new(0.25, 0.5));
        assert_eq!(x.pow_int(0).unwrap(), Interval::ONE);
    }

    #[test]
    fn split_covers_with_shared_endpoints() {
        let parts = Interval::new(0.0, 1.0).split(2);
        assert_eq!(parts, vec![Interval::new(0.0, 0.5), Interval::new(0.5, 1.0)]);
        let parts = Interval::new(1e-3, 1e-2).split(90);
        assert_eq!(parts.len(), 90);
        assert_eq!(parts[0].lo(), 1e-3);
        assert_eq!(parts[89].hi(), 1e-2);
        for w in parts.windows(2) {
            assert_eq!(w[0].hi(), w[1].lo());
        }
        for p in &parts {
            assert!((p.width() - 1e-4).abs() < 1e-15);
        }
    }

    #[test]
    fn mid_and_rad() {
        let x = Interval::new(1.0, 3.0);
        assert_eq!(x.mid(), 2.0);
        assert_eq!(x.rad(), 1.0);
        assert!(Interval::ENTIRE.contains(Interval::ENTIRE.mid()));
        assert!(Interval::new(f64::NEG_INFINITY, -5.0).contains(Interval::new(f64::NEG_INFINITY, -5.0).mid()));
    }

    #[test]
    fn set_relations() {
        let a = Interval::new(0.0, 1.0);
        let b = Interval::new(-1.0, 2.0);
        assert!(a.subset(&b) && a.interior(&b) && !b.subset(&a));
        assert_eq!(a.intersection(&Interval::new(2.0, 3.0)), None);
        assert_eq!(a.hull(&Interval::new(2.0, 3.0)), Interval::new(0.0, 3.0));
    }
}
