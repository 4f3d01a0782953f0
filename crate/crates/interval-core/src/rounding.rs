//! Directed rounding of the four basic operations and sqrt.
//!
//! Every operation is carried out in round-to-nearest. The exact rounding
//! error is then recovered with an error-free transformation (TwoSum, FMA
//! residuals) and its sign decides whether the nearest result must be moved
//! one ulp. When the error-free transformation is not exact (underflow range,
//! overflow), the result is widened unconditionally.

/// Results smaller than this in magnitude may carry an inexact FMA residual.
const TINY: f64 = 1.0e-290;

#[inline]
fn widen_down(x: f64) -> f64 {
    if x.is_nan() {
        f64::NEG_INFINITY
    } else {
        x.next_down()
    }
}

#[inline]
fn widen_up(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x.next_up()
    }
}

#[inline]
fn overflow_down(s: f64) -> f64 {
    if s == f64::INFINITY {
        f64::MAX
    } else {
        s
    }
}

#[inline]
fn overflow_up(s: f64) -> f64 {
    if s == f64::NEG_INFINITY {
        -f64::MAX
    } else {
        s
    }
}

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

/// Largest float not above `a + b`.
#[inline]
pub fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_nan() {
        return f64::NEG_INFINITY;
    }
    if s.is_infinite() {
        return if a.is_finite() && b.is_finite() {
            overflow_down(s)
        } else {
            s
        };
    }
    let e = two_sum_err(a, b, s);
    if e < 0.0 {
        s.next_down()
    } else {
        s
    }
}

/// Smallest float not below `a + b`.
#[inline]
pub fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_nan() {
        return f64::INFINITY;
    }
    if s.is_infinite() {
        return if a.is_finite() && b.is_finite() {
            overflow_up(s)
        } else {
            s
        };
    }
    let e = two_sum_err(a, b, s);
    if e > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

#[inline]
pub fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

/// Endpoint product with the interval convention `0 * inf = 0`.
#[inline]
fn raw_mul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

#[inline]
pub fn mul_down(a: f64, b: f64) -> f64 {
    let p = raw_mul(a, b);
    if p == 0.0 {
        return if a == 0.0 || b == 0.0 { 0.0 } else { widen_down(p) };
    }
    if p.is_infinite() {
        return if a.is_finite() && b.is_finite() {
            overflow_down(p)
        } else {
            p
        };
    }
    if p.abs() < TINY {
        return widen_down(p);
    }
    let e = a.mul_add(b, -p);
    if e < 0.0 {
        p.next_down()
    } else {
        p
    }
}

#[inline]
pub fn mul_up(a: f64, b: f64) -> f64 {
    let p = raw_mul(a, b);
    if p == 0.0 {
        return if a == 0.0 || b == 0.0 { 0.0 } else { widen_up(p) };
    }
    if p.is_infinite() {
        return if a.is_finite() && b.is_finite() {
            overflow_up(p)
        } else {
            p
        };
    }
    if p.abs() < TINY {
        return widen_up(p);
    }
    let e = a.mul_add(b, -p);
    if e > 0.0 {
        p.next_up()
    } else {
        p
    }
}

/// Sign of the exact residual `a - q*b`, or `None` when it cannot be trusted.
#[inline]
fn div_residual_sign(a: f64, b: f64, q: f64) -> Option<f64> {
    if !q.is_finite() || q == 0.0 || q.abs() < TINY || !a.is_finite() || !b.is_finite() {
        return None;
    }
    let r = (-q).mul_add(b, a);
    Some(r * b.signum())
}

#[inline]
pub fn div_down(a: f64, b: f64) -> f64 {
    if a == 0.0 && b != 0.0 {
        return 0.0;
    }
    let q = a / b;
    if q.is_infinite() && a.is_finite() && b.is_finite() && b != 0.0 {
        return overflow_down(q);
    }
    match div_residual_sign(a, b, q) {
        Some(s) if s >= 0.0 => q,
        Some(_) => q.next_down(),
        None => {
            if q.is_infinite() || (q == 0.0 && (a.is_infinite() || b.is_infinite())) {
                if b.is_infinite() && a.is_finite() {
                    // a / inf tends to 0 from the side of the sign of a/b.
                    if (a > 0.0) == (b > 0.0) {
                        0.0
                    } else {
                        -f64::MIN_POSITIVE
                    }
                } else {
                    q
                }
            } else {
                widen_down(q)
            }
        }
    }
}

#[inline]
pub fn div_up(a: f64, b: f64) -> f64 {
    if a == 0.0 && b != 0.0 {
        return 0.0;
    }
    let q = a / b;
    if q.is_infinite() && a.is_finite() && b.is_finite() && b != 0.0 {
        return overflow_up(q);
    }
    match div_residual_sign(a, b, q) {
        Some(s) if s <= 0.0 => q,
        Some(_) => q.next_up(),
        None => {
            if q.is_infinite() || (q == 0.0 && (a.is_infinite() || b.is_infinite())) {
                if b.is_infinite() && a.is_finite() {
                    if (a > 0.0) == (b > 0.0) {
                        f64::MIN_POSITIVE
                    } else {
                        0.0
                    }
                } else {
                    q
                }
            } else {
                widen_up(q)
            }
        }
    }
}

/// Largest float not above `sqrt(a)`, `a >= 0`.
#[inline]
pub fn sqrt_down(a: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    let s = a.sqrt();
    if s.is_infinite() {
        return s;
    }
    if a < TINY {
        return widen_down(s).max(0.0);
    }
    let r = (-s).mul_add(s, a);
    if r < 0.0 {
        s.next_down()
    } else {
        s
    }
}

/// Smallest float not below `sqrt(a)`, `a >= 0`.
#[inline]
pub fn sqrt_up(a: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    let s = a.sqrt();
    if s.is_infinite() {
        return s;
    }
    if a < TINY {
        return widen_up(s);
    }
    let r = (-s).mul_add(s, a);
    if r > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_operations_are_not_widened() {
        assert_eq!(add_down(1.0, 3.0), 4.0);
        assert_eq!(add_up(2.0, 4.0), 6.0);
        assert_eq!(mul_down(1.5, 2.0), 3.0);
        assert_eq!(div_up(1.0, 4.0), 0.25);
        assert_eq!(sqrt_down(9.0), 3.0);
        assert_eq!(sqrt_up(9.0), 3.0);
    }

    #[test]
    fn inexact_operations_bracket_the_result() {
        let lo = add_down(0.1, 0.2);
        let hi = add_up(0.1, 0.2);
        assert!(lo < hi);
        assert!(hi.next_down() <= lo.next_up());
        let lo = div_down(1.0, 3.0);
        let hi = div_up(1.0, 3.0);
        assert!(lo < hi && 3.0 * lo <= 1.0 && 1.0 <= 3.0 * hi);
        let lo = sqrt_down(2.0);
        let hi = sqrt_up(2.0);
        assert!(lo * lo <= 2.0 && hi * hi >= 2.0);
    }

    #[test]
    fn overflow_is_handled() {
        assert_eq!(add_down(f64::MAX, f64::MAX), f64::MAX);
        assert_eq!(add_up(f64::MAX, f64::MAX), f64::INFINITY);
        assert_eq!(mul_down(f64::MAX, 2.0), f64::MAX);
        assert_eq!(mul_up(0.0, f64::INFINITY), 0.0);
    }

    #[test]
    fn subnormal_products_are_widened() {
        let a = 1e-200;
        assert!(mul_down(a, a) <= 0.0);
        assert!(mul_up(a, a) > 0.0);
    }
}
