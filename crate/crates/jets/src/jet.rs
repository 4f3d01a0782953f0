use interval_core::{Interval, IntervalError, IntervalMatrix, IntervalVector};

use crate::error::JetError;
use crate::scalar::Scalar;

/// Largest number of independent variables a [`Jet2Scalar`] can carry.
pub const MAX_DIM: usize = 6;
const MAX_PACKED: usize = MAX_DIM * (MAX_DIM + 1) / 2;

/// Packed index of the symmetric pair `(i, j)`.
#[inline]
pub fn tri(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    b * (b + 1) / 2 + a
}

/// Scalar second-order jet: value, gradient and symmetric Hessian, each
/// entry an interval, with respect to `dim` independent variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2Scalar {
    dim: usize,
    v: Interval,
    g: [Interval; MAX_DIM],
    h: [Interval; MAX_PACKED],
}

impl Jet2Scalar {
    pub fn constant(dim: usize, v: Interval) -> Self {
        assert!(dim <= MAX_DIM, "jet dimension {dim} exceeds {MAX_DIM}");
        Jet2Scalar {
            dim,
            v,
            g: [Interval::ZERO; MAX_DIM],
            h: [Interval::ZERO; MAX_PACKED],
        }
    }

    /// The `i`-th coordinate function with value `v`.
    pub fn variable(dim: usize, i: usize, v: Interval) -> Self {
        let mut j = Jet2Scalar::constant(dim, v);
        j.g[i] = Interval::ONE;
        j
    }

    /// Jet with the given gradient row and Hessian (read as symmetric).
    pub fn from_parts(v: Interval, grad: &[Interval], hess: impl Fn(usize, usize) -> Interval) -> Self {
        let dim = grad.len();
        let mut j = Jet2Scalar::constant(dim, v);
        j.g[..dim].copy_from_slice(grad);
        for b in 0..dim {
            for a in 0..=b {
                j.h[tri(a, b)] = hess(a, b);
            }
        }
        j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self) -> Interval {
        self.v
    }

    pub fn grad(&self, i: usize) -> Interval {
        self.g[i]
    }

    pub fn hess(&self, i: usize, j: usize) -> Interval {
        self.h[tri(i, j)]
    }

    fn packed(&self) -> usize {
        self.dim * (self.dim + 1) / 2
    }

    /// `f(self)` given enclosures of `f, f', f''` at the value.
    fn chain(&self, f0: Interval, f1: Interval, f2: Interval) -> Self {
        let mut r = Jet2Scalar::constant(self.dim, f0);
        for i in 0..self.dim {
            r.g[i] = f1 * self.g[i];
        }
        for b in 0..self.dim {
            for a in 0..=b {
                let k = tri(a, b);
                r.h[k] = f1 * self.h[k] + f2 * (self.g[a] * self.g[b]);
            }
        }
        r
    }

    fn zip(&self, o: &Self, f: impl Fn(Interval, Interval) -> Interval) -> Self {
        debug_assert_eq!(self.dim, o.dim);
        let mut r = Jet2Scalar::constant(self.dim, f(self.v, o.v));
        for i in 0..self.dim {
            r.g[i] = f(self.g[i], o.g[i]);
        }
        for k in 0..self.packed() {
            r.h[k] = f(self.h[k], o.h[k]);
        }
        r
    }

    /// Hull of two jets of equal dimension.
    pub fn hull(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.hull(&b))
    }

    pub fn subset(&self, o: &Self) -> bool {
        self.dim == o.dim
            && self.v.subset(&o.v)
            && (0..self.dim).all(|i| self.g[i].subset(&o.g[i]))
            && (0..self.packed()).all(|k| self.h[k].subset(&o.h[k]))
    }

    /// Widens every entry by `r` on both sides.
    pub fn inflate(&self, r: f64) -> Self {
        let mut j = *self;
        j.v = j.v.inflate(r);
        for i in 0..self.dim {
            j.g[i] = j.g[i].inflate(r);
        }
        for k in 0..self.packed() {
            j.h[k] = j.h[k].inflate(r);
        }
        j
    }
}

impl Scalar for Jet2Scalar {
    fn constant(c: Interval, like: &Self) -> Self {
        Jet2Scalar::constant(like.dim, c)
    }

    fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }

    fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }

    fn mul(&self, o: &Self) -> Self {
        let mut r = Jet2Scalar::constant(self.dim, self.v * o.v);
        for i in 0..self.dim {
            r.g[i] = self.v * o.g[i] + o.v * self.g[i];
        }
        for b in 0..self.dim {
            for a in 0..=b {
                let k = tri(a, b);
                r.h[k] = self.v * o.h[k] + o.v * self.h[k] + self.g[a] * o.g[b] + self.g[b] * o.g[a];
            }
        }
        r
    }

    fn neg(&self) -> Self {
        self.scale(Interval::point(-1.0))
    }

    fn scale(&self, c: Interval) -> Self {
        let mut r = *self;
        r.v = c * self.v;
        for i in 0..self.dim {
            r.g[i] = c * self.g[i];
        }
        for k in 0..self.packed() {
            r.h[k] = c * self.h[k];
        }
        r
    }

    fn div(&self, o: &Self) -> Result<Self, IntervalError> {
        let q = self.v.div(&o.v)?;
        let mut r = Jet2Scalar::constant(self.dim, q);
        for i in 0..self.dim {
            r.g[i] = (self.g[i] - q * o.g[i]).div(&o.v)?;
        }
        for b in 0..self.dim {
            for a in 0..=b {
                let k = tri(a, b);
                let num = self.h[k] - q * o.h[k] - r.g[a] * o.g[b] - r.g[b] * o.g[a];
                r.h[k] = num.div(&o.v)?;
            }
        }
        Ok(r)
    }

    fn sqr(&self) -> Self {
        let two_v = self.v * 2.0;
        let mut r = Jet2Scalar::constant(self.dim, self.v.sqr());
        for i in 0..self.dim {
            r.g[i] = two_v * self.g[i];
        }
        for b in 0..self.dim {
            for a in 0..=b {
                let k = tri(a, b);
                r.h[k] = two_v * self.h[k] + (self.g[a] * self.g[b]) * 2.0;
            }
        }
        r
    }

    fn sqrt(&self) -> Result<Self, IntervalError> {
        let f0 = self.v.sqrt()?;
        let f1 = Interval::point(0.5).div(&f0)?;
        let f2 = -(f1.sqr().div(&f0)?);
        Ok(self.chain(f0, f1, f2))
    }

    fn exp(&self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    fn sin(&self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(s, c, -s)
    }

    fn cos(&self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(c, -s, -c)
    }
}

/// Rank-3 interval array `H[k][i][j]`, symmetric in `(i, j)` by storage.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor3 {
    outputs: usize,
    dim: usize,
    data: Vec<Interval>,
}

impl SymTensor3 {
    pub fn zeros(outputs: usize, dim: usize) -> Self {
        SymTensor3 {
            outputs,
            dim,
            data: vec![Interval::ZERO; outputs * dim * (dim + 1) / 2],
        }
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn stride(&self) -> usize {
        self.dim * (self.dim + 1) / 2
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> Interval {
        self.data[k * self.stride() + tri(i, j)]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, k: usize, i: usize, j: usize, v: Interval) {
        let s = self.stride();
        self.data[k * s + tri(i, j)] = v;
    }

    /// Full symmetric matrix of output `k`.
    pub fn slice(&self, k: usize) -> IntervalMatrix {
        let mut m = IntervalMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.set(i, j, self.get(k, i, j));
            }
        }
        m
    }

    /// Builds from per-output matrices, symmetrizing as `(A + A^T) / 2`.
    pub fn from_slices(slices: &[IntervalMatrix]) -> Self {
        let dim = slices.first().map_or(0, |m| m.rows());
        let mut t = SymTensor3::zeros(slices.len(), dim);
        for (k, m) in slices.iter().enumerate() {
            for j in 0..dim {
                for i in 0..=j {
                    let v = if i == j {
                        m.get(i, i)
                    } else if m.get(i, j) == m.get(j, i) {
                        m.get(i, j)
                    } else {
                        (m.get(i, j) + m.get(j, i)) * 0.5
                    };
                    t.set(k, i, j, v);
                }
            }
        }
        t
    }

    /// `H[k](u, v)` for every output.
    pub fn bilinear(&self, u: &IntervalVector, v: &IntervalVector) -> IntervalVector {
        (0..self.outputs)
            .map(|k| {
                let mut s = Interval::ZERO;
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        s += self.get(k, i, j) * u[i] * v[j];
                    }
                }
                s
            })
            .collect()
    }

    /// `sum_l A[k][l] H[l]`.
    pub fn left_mul(&self, a: &IntervalMatrix) -> SymTensor3 {
        assert_eq!(a.cols(), self.outputs, "left multiplication dimensions");
        let mut t = SymTensor3::zeros(a.rows(), self.dim);
        let s = self.stride();
        for k in 0..a.rows() {
            for p in 0..s {
                let mut acc = Interval::ZERO;
                for l in 0..self.outputs {
                    acc += a.get(k, l) * self.data[l * s + p];
                }
                t.data[k * s + p] = acc;
            }
        }
        t
    }

    /// `B^T H[k] B` for every output (change of the inner variables).
    pub fn congruence(&self, b: &IntervalMatrix) -> SymTensor3 {
        assert_eq!(b.rows(), self.dim, "congruence dimensions");
        let n = b.cols();
        let mut t = SymTensor3::zeros(self.outputs, n);
        for k in 0..self.outputs {
            let hb = self.slice(k).mul(b);
            for q in 0..n {
                for p in 0..=q {
                    let mut acc = Interval::ZERO;
                    for i in 0..self.dim {
                        acc += b.get(i, p) * hb.get(i, q);
                    }
                    t.set(k, p, q, acc);
                }
            }
        }
        t
    }

    pub fn add(&self, o: &SymTensor3) -> SymTensor3 {
        assert_eq!((self.outputs, self.dim), (o.outputs, o.dim), "tensor sum dimensions");
        SymTensor3 {
            outputs: self.outputs,
            dim: self.dim,
            data: self.data.iter().zip(&o.data).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn hull(&self, o: &SymTensor3) -> SymTensor3 {
        SymTensor3 {
            outputs: self.outputs,
            dim: self.dim,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.hull(b)).collect(),
        }
    }

    pub fn subset(&self, o: &SymTensor3) -> bool {
        (self.outputs, self.dim) == (o.outputs, o.dim)
            && self.data.iter().zip(&o.data).all(|(a, b)| a.subset(b))
    }

    pub fn scale(&self, c: Interval) -> SymTensor3 {
        SymTensor3 {
            outputs: self.outputs,
            dim: self.dim,
            data: self.data.iter().map(|a| *a * c).collect(),
        }
    }

    /// Sub-tensor with the given outputs and variables.
    pub fn select(&self, outputs: &[usize], vars: &[usize]) -> SymTensor3 {
        let mut t = SymTensor3::zeros(outputs.len(), vars.len());
        for (a, &k) in outputs.iter().enumerate() {
            for q in 0..vars.len() {
                for p in 0..=q {
                    t.set(a, p, q, self.get(k, vars[p], vars[q]));
                }
            }
        }
        t
    }

    pub fn max_mag(&self) -> f64 {
        self.data.iter().map(|x| x.mag()).fold(0.0, f64::max)
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.data
    }
}

/// Enclosure of `(f, Df, D^2 f)` of a map `R^n -> R^m` over a box.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    pub value: IntervalVector,
    pub jacobian: IntervalMatrix,
    pub hessian: SymTensor3,
}

impl Jet2 {
    pub fn new(value: IntervalVector, jacobian: IntervalMatrix, hessian: SymTensor3) -> Self {
        assert_eq!(value.len(), jacobian.rows(), "jet value/jacobian rows");
        assert_eq!(hessian.outputs(), value.len(), "jet hessian outputs");
        assert_eq!(hessian.dim(), jacobian.cols(), "jet hessian dimension");
        Jet2 {
            value,
            jacobian,
            hessian,
        }
    }

    /// Jet of the identity map over `x`.
    pub fn identity(x: &IntervalVector) -> Self {
        let n = x.len();
        Jet2::new(x.clone(), IntervalMatrix::identity(n), SymTensor3::zeros(n, n))
    }

    /// Jet of the affine map `z -> A z + c` over a box whose image is `value`.
    pub fn linear(a: &IntervalMatrix, value: IntervalVector) -> Self {
        Jet2::new(value, a.clone(), SymTensor3::zeros(a.rows(), a.cols()))
    }

    pub fn outputs(&self) -> usize {
        self.value.len()
    }

    pub fn dim(&self) -> usize {
        self.jacobian.cols()
    }

    /// Packs scalar jets (all of the same dimension) into a vector jet.
    pub fn from_scalars(parts: &[Jet2Scalar]) -> Self {
        let m = parts.len();
        let n = parts.first().map_or(0, |p| p.dim());
        let mut jac = IntervalMatrix::zeros(m, n);
        let mut hes = SymTensor3::zeros(m, n);
        for (k, p) in parts.iter().enumerate() {
            for i in 0..n {
                jac.set(k, i, p.grad(i));
                for j in i..n {
                    hes.set(k, i, j, p.hess(i, j));
                }
            }
        }
        Jet2::new(parts.iter().map(|p| p.value()).collect(), jac, hes)
    }

    /// Scalar jets of each output.
    pub fn to_scalars(&self) -> Vec<Jet2Scalar> {
        (0..self.outputs())
            .map(|k| {
                let grad: Vec<Interval> = (0..self.dim()).map(|i| self.jacobian.get(k, i)).collect();
                Jet2Scalar::from_parts(self.value[k], &grad, |i, j| self.hessian.get(k, i, j))
            })
            .collect()
    }

    /// Keeps the listed outputs.
    pub fn select_outputs(&self, rows: &[usize]) -> Jet2 {
        let all: Vec<usize> = (0..self.dim()).collect();
        Jet2::new(
            rows.iter().map(|&k| self.value[k]).collect(),
            self.jacobian.select(rows, &all),
            self.hessian.select(rows, &all),
        )
    }

    /// Restricts to the listed input variables (others held fixed).
    pub fn select_vars(&self, vars: &[usize]) -> Jet2 {
        let rows: Vec<usize> = (0..self.outputs()).collect();
        Jet2::new(
            self.value.clone(),
            self.jacobian.select(&rows, vars),
            self.hessian.select(&rows, vars),
        )
    }

    pub fn hull(&self, o: &Jet2) -> Jet2 {
        Jet2::new(
            self.value.hull(&o.value),
            self.jacobian.hull(&o.jacobian),
            self.hessian.hull(&o.hessian),
        )
    }

    pub fn subset(&self, o: &Jet2) -> bool {
        self.value.subset(&o.value) && self.jacobian.subset(&o.jacobian) && self.hessian.subset(&o.hessian)
    }
}

/// Second-order chain rule: the jet of `outer o inner`, where `outer` is
/// evaluated over a box containing `inner.value`.
pub fn compose_jet2(outer: &Jet2, inner: &Jet2) -> Result<Jet2, JetError> {
    if outer.dim() != inner.outputs() {
        return Err(JetError::DimensionMismatch {
            expected: outer.dim(),
            got: inner.outputs(),
        });
    }
    let jac = outer.jacobian.mul(&inner.jacobian);
    let hes = outer
        .hessian
        .congruence(&inner.jacobian)
        .add(&inner.hessian.left_mul(&outer.jacobian));
    Ok(Jet2::new(outer.value.clone(), jac, hes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_product_rule() {
        let x = Jet2Scalar::variable(2, 0, Interval::point(3.0));
        let y = Jet2Scalar::variable(2, 1, Interval::point(-2.0));
        let p = x.mul(&y).mul(&x);
        // x^2 y at (3,-2)
        assert!(p.value().contains(-18.0));
        assert!(p.grad(0).contains(-12.0));
        assert!(p.grad(1).contains(9.0));
        assert!(p.hess(0, 0).contains(-4.0));
        assert!(p.hess(0, 1).contains(6.0));
        assert!(p.hess(1, 1).contains(0.0));
    }

    #[test]
    fn quotient_and_sqrt() {
        let x = Jet2Scalar::variable(1, 0, Interval::point(4.0));
        let one = Jet2Scalar::constant(1, Interval::ONE);
        let r = one.div(&x).unwrap();
        assert!(r.hess(0, 0).contains(2.0 / 64.0));
        let s = x.sqrt().unwrap();
        assert!(s.grad(0).contains(0.25));
        assert!(s.hess(0, 0).contains(-1.0 / 32.0));
    }

    #[test]
    fn tensor_symmetry() {
        let mut t = SymTensor3::zeros(1, 3);
        t.set(0, 2, 1, Interval::point(5.0));
        assert_eq!(t.get(0, 1, 2), Interval::point(5.0));
        let s = t.slice(0);
        assert_eq!(s, s.transpose());
    }

    #[test]
    fn compose_with_identity() {
        let x = IntervalVector::from_points(&[1.0, 2.0]);
        let inner = Jet2::from_scalars(&[
            Jet2Scalar::variable(2, 0, x[0]).mul(&Jet2Scalar::variable(2, 1, x[1])),
            Jet2Scalar::variable(2, 0, x[0]).sqr(),
        ]);
        let outer = Jet2::identity(&inner.value);
        assert_eq!(compose_jet2(&outer, &inner).unwrap(), inner);
        assert!(compose_jet2(&Jet2::identity(&IntervalVector::zeros(3)), &inner).is_err());
    }
}
