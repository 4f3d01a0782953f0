use jets::ExprDag;

use crate::IntegratorError;

const POINT_ORDER: usize = 20;

/// One non-rigorous Taylor step of length `h` in plain floating point.
pub fn point_step(f: &ExprDag, x: &[f64], h: f64) -> Result<Vec<f64>, IntegratorError> {
    let c = f.taylor(x, POINT_ORDER)?;
    Ok(c.iter()
        .map(|ci| ci.iter().rev().fold(0.0, |acc, &a| acc * h + a))
        .collect())
}

/// Non-rigorous high-order approximation of `Phi(t, x)` for `t >= 0`, for
/// oracles and initial guesses only.
pub fn point_flow(f: &ExprDag, x: &[f64], t: f64) -> Result<Vec<f64>, IntegratorError> {
    assert!(t >= 0.0, "integrate the negated field for backward time");
    let mut x = x.to_vec();
    let mut s = 0.0;
    while s < t {
        let c = f.taylor(&x, POINT_ORDER)?;
        let mag = |k: usize| c.iter().map(|ci| ci[k].abs()).fold(0.0, f64::max);
        let est = |m: f64, k: usize| if m > 0.0 { (1e-17 / m).powf(1.0 / k as f64) } else { f64::INFINITY };
        let h = est(mag(POINT_ORDER), POINT_ORDER).min(est(mag(POINT_ORDER - 1), POINT_ORDER - 1)).min(0.25).min(t - s);
        x = c.iter().map(|ci| ci.iter().rev().fold(0.0, |acc, &a| acc * h + a)).collect();
        s += h;
    }
    Ok(x)
}
