//! Rigorous `exp`, `sin` and `cos`.
//!
//! Arguments are reduced with an interval enclosure of the constant
//! (`ln 2` or `pi/2`), the reduced argument is fed to a truncated Taylor
//! series evaluated in interval arithmetic, and the Lagrange remainder is
//! added as an explicit interval. The final result is widened by 2 ulp.

use crate::interval::Interval;

/// Enclosure of pi.
pub fn pi() -> Interval {
    let c = std::f64::consts::PI;
    Interval::new(c.next_down(), c.next_up())
}

/// Enclosure of pi / 2.
pub fn half_pi() -> Interval {
    let c = std::f64::consts::FRAC_PI_2;
    Interval::new(c.next_down(), c.next_up())
}

/// Enclosure of 2 pi.
pub fn two_pi() -> Interval {
    let c = std::f64::consts::TAU;
    Interval::new(c.next_down(), c.next_up())
}

fn ln2() -> Interval {
    let c = std::f64::consts::LN_2;
    Interval::new(c.next_down(), c.next_up())
}

const EXP_TERMS: u32 = 18;
const TRIG_TERMS: u32 = 14;

/// `sum_{j<=n} r^j/j!` plus the Lagrange remainder, for `|r| <= 1`.
fn exp_series(r: Interval) -> Interval {
    let mut term = Interval::ONE;
    let mut sum = Interval::ONE;
    for j in 1..=EXP_TERMS {
        term = (term * r).div(&Interval::point(j as f64)).expect("nonzero");
        sum += term;
    }
    // Remainder r^(n+1)/(n+1)! * e^xi with |xi| <= |r| <= 1 < 3.
    let m = r.mag();
    let mut bound = Interval::point(3.0);
    for j in 1..=EXP_TERMS + 1 {
        bound = (bound * Interval::point(m)).div(&Interval::point(j as f64)).expect("nonzero");
    }
    sum + Interval::symmetric(bound.hi())
}

/// Enclosure of `e^x` for a float `x`.
fn exp_point(x: f64) -> Interval {
    if x.is_nan() {
        return Interval::ENTIRE;
    }
    if x == f64::NEG_INFINITY {
        return Interval::ZERO;
    }
    if x > 709.0 {
        return Interval::new(exp_point(709.0).lo(), f64::INFINITY);
    }
    if x < -745.0 {
        return Interval::new(0.0, f64::MIN_POSITIVE);
    }
    let k = (x / std::f64::consts::LN_2).round();
    let r = Interval::point(x) - ln2() * Interval::point(k);
    let s = exp_series(r);
    // Scale by 2^k in two exact steps to stay away from overflow of 2^k itself.
    let k = k as i32;
    let k1 = k / 2;
    let k2 = k - k1;
    let f1 = Interval::point(2f64.powi(k1));
    let f2 = Interval::point(2f64.powi(k2));
    let v = s * f1 * f2;
    Interval::new(v.lo().max(0.0), v.hi())
}

/// Series for `sin r` and `cos r`, `|r| <= 1`.
fn sin_cos_series(r: Interval) -> (Interval, Interval) {
    let r2 = r.sqr();
    let mut s_term = r;
    let mut s_sum = r;
    let mut c_term = Interval::ONE;
    let mut c_sum = Interval::ONE;
    for j in 1..=TRIG_TERMS {
        let a = (2 * j) as f64;
        let b = (2 * j + 1) as f64;
        c_term = -(c_term * r2).div(&Interval::point((a - 1.0) * a)).expect("nonzero");
        s_term = -(s_term * r2).div(&Interval::point(a * b)).expect("nonzero");
        c_sum += c_term;
        s_sum += s_term;
    }
    // Both remainders are bounded by |r|^n/n! with n = 2*TRIG_TERMS + 2.
    let m = Interval::point(r.mag());
    let mut bound = Interval::ONE;
    let n = 2 * TRIG_TERMS + 2;
    for j in 1..=n {
        bound = (bound * m).div(&Interval::point(j as f64)).expect("nonzero");
    }
    let rem = bound.hi();
    (s_sum.inflate(rem), c_sum.inflate(rem))
}

/// Enclosures of `sin x` and `cos x` for a float `x`.
fn sin_cos_point(x: f64) -> (Interval, Interval) {
    let unit = Interval::new(-1.0, 1.0);
    if !x.is_finite() || x.abs() > 1.0e15 {
        return (unit, unit);
    }
    let k = (x / std::f64::consts::FRAC_PI_2).round();
    let r = Interval::point(x) - half_pi() * Interval::point(k);
    let (s, c) = sin_cos_series(r);
    let q = (k.rem_euclid(4.0)) as i64;
    let (sin, cos) = match q {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    };
    let clip = |v: Interval| v.intersection(&unit).unwrap_or(unit);
    (clip(sin), clip(cos))
}

/// Integers `j` such that `j * pi + shift` may lie in `[a, b]`.
fn possible_multiples(a: f64, b: f64, shift: Interval) -> (f64, f64) {
    let p = pi();
    let qa = (Interval::point(a) - shift).div(&p).expect("pi is nonzero");
    let qb = (Interval::point(b) - shift).div(&p).expect("pi is nonzero");
    (qa.lo().ceil(), qb.hi().floor())
}

fn trig(x: &Interval, cosine: bool) -> Interval {
    let unit = Interval::new(-1.0, 1.0);
    if !x.is_finite() || x.width() >= 7.0 || x.mag() > 1.0e15 {
        return unit;
    }
    let pick = |v: f64| {
        let (s, c) = sin_cos_point(v);
        if cosine {
            c
        } else {
            s
        }
    };
    let mut result = pick(x.lo()).hull(&pick(x.hi()));
    // Extrema of cos sit at j*pi (value (-1)^j); of sin at pi/2 + j*pi.
    let shift = if cosine { Interval::ZERO } else { half_pi() };
    let (j0, j1) = possible_multiples(x.lo(), x.hi(), shift);
    let mut j = j0;
    while j <= j1 {
        let even = (j.rem_euclid(2.0)) == 0.0;
        let v = if even { 1.0 } else { -1.0 };
        result = result.hull(&Interval::point(v));
        j += 1.0;
    }
    result.widen_ulps(2).intersection(&unit).unwrap_or(unit)
}

impl Interval {
    pub fn exp(&self) -> Interval {
        let lo = exp_point(self.lo()).lo();
        let hi = exp_point(self.hi()).hi();
        let r = Interval::new(lo, hi).widen_ulps(2);
        Interval::new(r.lo().max(0.0), r.hi())
    }

    pub fn cos(&self) -> Interval {
        trig(self, true)
    }

    pub fn sin(&self) -> Interval {
        trig(self, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cos_zero_is_tight() {
        let c = Interval::ZERO.cos();
        assert!(c.contains(1.0));
        assert!(c.width() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn exp_values() {
        let e = Interval::ONE.exp();
        assert!(e.contains(std::f64::consts::E));
        assert!(e.width() < 1e-14 * std::f64::consts::E);
        assert!(Interval::ZERO.exp().contains(1.0));
        let big = Interval::point(700.0).exp();
        assert!(big.contains(700f64.exp()));
        assert!(Interval::point(-20.0).exp().contains((-20f64).exp()));
    }

    #[test]
    fn trig_extrema_are_included() {
        let c = Interval::new(-0.1, 0.1).cos();
        assert!(c.contains(1.0));
        let s = Interval::new(1.5, 1.7).sin();
        assert!(s.contains(1.0));
        let c = Interval::new(3.0, 3.3).cos();
        assert!(c.contains(-1.0));
        assert_eq!(Interval::new(0.0, 10.0).sin(), Interval::new(-1.0, 1.0));
    }

    #[test]
    fn trig_matches_libm_on_points() {
        for i in -200..200 {
            let x = i as f64 * 0.173;
            assert!(Interval::point(x).sin().contains(x.sin()), "sin {x}");
            assert!(Interval::point(x).cos().contains(x.cos()), "cos {x}");
            assert!(Interval::point(x).sin().width() < 1e-13);
        }
    }

    #[test]
    fn pi_enclosure_is_tight() {
        assert!(pi().width() < 1e-15);
        assert!(Interval::point(std::f64::consts::PI).sin().contains(0.0));
    }
}
