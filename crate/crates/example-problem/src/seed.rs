use interval_core::{Interval, IntervalError, IntervalVector};
use jets::{eval_jet2, ExprDag, Scalar};

use crate::ExampleError;

/// Truncated power series in one variable with interval coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Series(pub Vec<Interval>);

impl Series {
    pub fn variable(order: usize) -> Series {
        let mut c = vec![Interval::ZERO; order + 1];
        if order >= 1 {
            c[1] = Interval::ONE;
        }
        Series(c)
    }

    pub fn from_coeffs(c: &[Interval], order: usize) -> Series {
        Series((0..=order).map(|k| c.get(k).copied().unwrap_or(Interval::ZERO)).collect())
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Interval {
        self.0[k]
    }

    fn zip(&self, o: &Series, op: impl Fn(Interval, Interval) -> Interval) -> Series {
        Series(self.0.iter().zip(&o.0).map(|(a, b)| op(*a, *b)).collect())
    }

    fn conv(&self, o: &Series, k: usize, from: usize, to: usize) -> Interval {
        Interval::sum((from..=to).map(|j| self.0[j] * o.0[k - j]).collect::<Vec<_>>().iter())
    }
}

impl Scalar for Series {
    fn constant(c: Interval, like: &Self) -> Self {
        Series::from_coeffs(&[c], like.order())
    }
    fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }
    fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }
    fn mul(&self, o: &Self) -> Self {
        Series((0..=self.order()).map(|k| self.conv(o, k, 0, k)).collect())
    }
    fn neg(&self) -> Self {
        Series(self.0.iter().map(|a| -*a).collect())
    }
    fn scale(&self, c: Interval) -> Self {
        Series(self.0.iter().map(|a| *a * c).collect())
    }
    fn div(&self, o: &Self) -> Result<Self, IntervalError> {
        let mut q: Vec<Interval> = Vec::with_capacity(self.0.len());
        for k in 0..self.0.len() {
            let acc = Interval::sum((0..k).map(|j| q[j] * o.0[k - j]).collect::<Vec<_>>().iter());
            q.push((self.0[k] - acc).div(&o.0[0])?);
        }
        Ok(Series(q))
    }
    fn sqr(&self) -> Self {
        self.mul(self)
    }
    fn sqrt(&self) -> Result<Self, IntervalError> {
        let mut s = vec![self.0[0].sqrt()?];
        let two_s0 = s[0] * Interval::point(2.0);
        for k in 1..self.0.len() {
            let acc = Interval::sum((1..k).map(|j| s[j] * s[k - j]).collect::<Vec<_>>().iter());
            s.push((self.0[k] - acc).div(&two_s0)?);
        }
        Ok(Series(s))
    }
    fn exp(&self) -> Self {
        let mut e = vec![self.0[0].exp()];
        for k in 1..self.0.len() {
            let acc = Interval::sum((1..=k).map(|j| Interval::point(j as f64) * self.0[j] * e[k - j]).collect::<Vec<_>>().iter());
            e.push(acc.div(&Interval::point(k as f64)).expect("k > 0"));
        }
        Series(e)
    }
    fn sin(&self) -> Self {
        sin_cos(self).0
    }
    fn cos(&self) -> Self {
        sin_cos(self).1
    }
}

fn sin_cos(a: &Series) -> (Series, Series) {
    let mut s = vec![a.0[0].sin()];
    let mut c = vec![a.0[0].cos()];
    for k in 1..a.0.len() {
        let ds = Interval::sum((1..=k).map(|j| Interval::point(j as f64) * a.0[j] * c[k - j]).collect::<Vec<_>>().iter());
        let dc = Interval::sum((1..=k).map(|j| Interval::point(j as f64) * a.0[j] * s[k - j]).collect::<Vec<_>>().iter());
        let kk = Interval::point(k as f64);
        s.push(ds.div(&kk).expect("k > 0"));
        c.push((-dc).div(&kk).expect("k > 0"));
    }
    (Series(s), Series(c))
}

/// Largest supported expansion order.
pub const MAX_SEED_ORDER: usize = 10;

/// Polynomial parameterization `K(xi) = (xi, K2(xi))` of the unstable
/// manifold of a planar saddle at the origin with inner dynamics `R`, solving
/// `F(K(xi)) = DK(xi) R(xi)` through the stated order.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamSeed {
    /// Coefficients of `K2`, index = power of `xi`.
    pub k2: Vec<Interval>,
    /// Coefficients of `R`.
    pub r: Vec<Interval>,
    pub order: usize,
    pub lambda_u: Interval,
    pub lambda_s: Interval,
}

/// Power matching for `F(u, v) = (lambda_u u, lambda_s v) + O(2)` (a 2-d
/// field in diagonal coordinates). At degree `k` the first component gives
/// `r_k = [F_1(xi, K2)]_k`, and the second
/// `a_k (lambda_s - k lambda_u) = sum_{2 <= j < k} j a_j r_{k+1-j} - [N_2(xi, K2)]_k`.
pub fn param_method_seed(field: &ExprDag, order: usize) -> Result<ParamSeed, ExampleError> {
    if field.arity() != 2 || field.output_count() != 2 {
        return Err(ExampleError::NotDiagonal("expected a planar field".into()));
    }
    if !(1..=MAX_SEED_ORDER).contains(&order) {
        return Err(ExampleError::NotDiagonal(format!("order {order} outside 1..={MAX_SEED_ORDER}")));
    }
    let j = eval_jet2(field, &IntervalVector::from_points(&[0.0, 0.0]))?;
    let off = [j.jacobian.get(0, 1), j.jacobian.get(1, 0), j.value[0], j.value[1]];
    if off.iter().any(|c| c.mag() != 0.0) {
        return Err(ExampleError::NotDiagonal("linear part must be diagonal with a fixed point at 0".into()));
    }
    let (lu, ls) = (j.jacobian.get(0, 0), j.jacobian.get(1, 1));
    let mut a = vec![Interval::ZERO; order + 1];
    let mut r = vec![Interval::ZERO; order + 1];
    if order >= 1 {
        r[1] = lu;
    }
    for k in 2..=order {
        let xi = Series::variable(order);
        let out = field.eval(&[xi, Series::from_coeffs(&a, order)])?;
        r[k] = out[0].coeff(k);
        let n2 = out[1].coeff(k);
        let acc = Interval::sum((2..k).map(|j| Interval::point(j as f64) * a[j] * r[k + 1 - j]).collect::<Vec<_>>().iter());
        let div = ls - Interval::point(k as f64) * lu;
        if div.contains_zero() {
            return Err(ExampleError::ResonanceObstruction { degree: k });
        }
        a[k] = (acc - n2).div(&div)?;
    }
    Ok(ParamSeed {
        k2: a,
        r,
        order,
        lambda_u: lu,
        lambda_s: ls,
    })
}

fn horner(c: &[Interval], x: Interval) -> Interval {
    c.iter().rev().fold(Interval::ZERO, |acc, &a| acc * x + a)
}

impl ParamSeed {
    pub fn k2_at(&self, xi: Interval) -> Interval {
        horner(&self.k2, xi)
    }

    /// Coefficients of `K2'`.
    pub fn k2_derivative(&self) -> Vec<Interval> {
        (1..self.k2.len()).map(|k| Interval::point(k as f64) * self.k2[k]).collect()
    }

    pub fn r_at(&self, xi: Interval) -> Interval {
        horner(&self.r, xi)
    }

    /// Enclosure of `F(K(xi)) - DK(xi) R(xi)` at `xi` by natural interval
    /// evaluation.
    pub fn residual(&self, field: &ExprDag, xi: Interval) -> Result<[Interval; 2], ExampleError> {
        let k = IntervalVector::new(vec![xi, self.k2_at(xi)]);
        let fk = field.eval_interval(&k)?;
        let rr = self.r_at(xi);
        let dk2 = horner(&self.k2_derivative(), xi);
        Ok([fk[0] - rr, fk[1] - dk2 * rr])
    }

    /// Power-series coefficients of the conjugacy residual through degree
    /// `upto`. For a polynomial field for which `F(K)` has degree at most
    /// `upto` these are all the coefficients, so evaluating them over an
    /// interval encloses the residual there.
    pub fn residual_coefficients(&self, field: &ExprDag, upto: usize) -> Result<[Vec<Interval>; 2], ExampleError> {
        let xi = Series::variable(upto);
        let k2 = Series::from_coeffs(&self.k2, upto);
        let rr = Series::from_coeffs(&self.r, upto);
        let dk2 = Series::from_coeffs(&self.k2_derivative(), upto);
        let fk = field.eval(&[xi, k2])?;
        Ok([fk[0].sub(&rr).0, fk[1].sub(&dk2.mul(&rr)).0])
    }

    /// Residual over `xi` from [`ParamSeed::residual_coefficients`].
    pub fn residual_over(&self, field: &ExprDag, xi: Interval, upto: usize) -> Result<[Interval; 2], ExampleError> {
        let [a, b] = self.residual_coefficients(field, upto)?;
        Ok([horner(&a, xi), horner(&b, xi)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use jets::parse_dag;

    fn diagonal_field() -> ExprDag {
        parse_dag(&["u", "v"], &["(- u (* (/ 1 2) (sqr (- u v))))", "(- (neg v) (* (/ 1 2) (sqr (- u v))))"]).unwrap()
    }

    #[test]
    fn cubic_seed_matches_closed_form() {
        let s = param_method_seed(&diagonal_field(), 3).unwrap();
        let third = |p: f64, q: f64| Interval::point(p).div(&Interval::point(q)).unwrap();
        assert!(s.k2[2].subset(&third(-1.0, 6.0).inflate(1e-15)) && s.k2[2].contains(-1.0 / 6.0));
        assert!(s.k2[3].contains(-1.0 / 12.0) && s.k2[3].width() < 1e-15);
        assert!(s.r[1].contains(1.0) && s.r[2].contains(-0.5) && s.r[3].contains(-1.0 / 6.0));
    }

    #[test]
    fn linear_field_gives_trivial_seed() {
        let f = parse_dag(&["u", "v"], &["(* 2 u)", "(neg v)"]).unwrap();
        let s = param_method_seed(&f, 5).unwrap();
        assert!(s.k2.iter().all(|c| c.mag() == 0.0));
        assert_eq!(s.r[1], Interval::point(2.0));
        assert!(s.r[2..].iter().all(|c| c.mag() == 0.0));
    }

    #[test]
    fn resonance_is_reported() {
        // lambda_s = 2 lambda_u: degree 2 resonant
        let f = parse_dag(&["u", "v"], &["u", "(+ (* 2 v) (sqr u))"]).unwrap();
        assert!(matches!(param_method_seed(&f, 3), Err(ExampleError::ResonanceObstruction { degree: 2 })));
    }

    #[test]
    fn residual_is_fourth_order() {
        let f = diagonal_field();
        let s = param_method_seed(&f, 3).unwrap();
        let [a, b] = s.residual_coefficients(&f, 9).unwrap();
        for c in a[..=3].iter().chain(&b[..=3]) {
            assert!(c.contains(0.0) && c.mag() < 1e-15);
        }
        for r in [1e-2, 1e-3, 2e-4] {
            let res = s.residual_over(&f, Interval::new(-r, r), 9).unwrap();
            let mag = res[0].mag().max(res[1].mag());
            assert!(mag < r.powi(4), "r = {r}: {mag:e}");
            assert!(mag > 1e-2 * r.powi(4), "r = {r}: {mag:e}");
        }
    }

    #[test]
    fn higher_orders_shrink_residual() {
        let f = diagonal_field();
        let xi = Interval::point(0.05);
        let res = |n: usize| {
            let r = param_method_seed(&f, n).unwrap().residual(&f, xi).unwrap();
            r[0].mag().max(r[1].mag())
        };
        assert!(res(6) < res(3) * 1e-3);
        assert!(res(10) < 1e-12);
    }

    #[test]
    fn series_transcendentals() {
        let x = Series::variable(6);
        let e = x.exp();
        assert!(e.coeff(3).contains(1.0 / 6.0));
        let s = x.sin();
        let c = x.cos();
        let one = s.sqr().add(&c.sqr());
        assert!(one.coeff(0).contains(1.0) && (1..=6).all(|k| one.coeff(k).contains(0.0)));
        let q = Scalar::div(&Series::constant(Interval::ONE, &x), &Series::constant(Interval::ONE, &x).sub(&x)).unwrap();
        assert!((0..=6).all(|k| q.coeff(k).contains(1.0)));
        let r = Series::constant(Interval::ONE, &x).add(&x).sqrt().unwrap();
        assert!(r.coeff(2).contains(-0.125));
    }
}
