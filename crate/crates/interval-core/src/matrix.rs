use std::fmt;

use crate::error::IntervalError;
use crate::interval::Interval;
use crate::rounding::{add_up, div_down, mul_up, sqrt_up};
use crate::vector::IntervalVector;

/// Dense row-major float matrix used for midpoint computations.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Matrix::new(r, c, rows.iter().flatten().copied().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimensions");
        let mut p = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut s = 0.0;
                for k in 0..self.cols {
                    s += self.get(i, k) * other.get(k, j);
                }
                p.set(i, j, s);
            }
        }
        p
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|k| self.get(i, k) * v[k]).sum())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Approximate inverse by Gauss-Jordan elimination; `None` if singular.
    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a.get(i, k).abs().total_cmp(&a.get(j, k).abs()))?;
            let piv = a.get(p, k);
            if piv == 0.0 || !piv.is_finite() {
                return None;
            }
            a.swap_rows(k, p);
            inv.swap_rows(k, p);
            for j in 0..n {
                a.set(k, j, a.get(k, j) / piv);
                inv.set(k, j, inv.get(k, j) / piv);
            }
            for i in 0..n {
                if i != k {
                    let f = a.get(i, k);
                    if f != 0.0 {
                        for j in 0..n {
                            a.set(i, j, a.get(i, j) - f * a.get(k, j));
                            inv.set(i, j, inv.get(i, j) - f * inv.get(k, j));
                        }
                    }
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Householder QR of a square matrix: returns `(Q, R)` with `Q`
    /// orthogonal up to rounding and `R` upper triangular.
    pub fn qr(&self) -> (Matrix, Matrix) {
        let n = self.rows;
        assert_eq!(n, self.cols, "qr of a non-square matrix");
        let mut r = self.clone();
        let mut q = Matrix::identity(n);
        for k in 0..n.saturating_sub(1) {
            let norm: f64 = (k..n).map(|i| r.get(i, k).powi(2)).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let alpha = if r.get(k, k) > 0.0 { -norm } else { norm };
            let mut v: Vec<f64> = vec![0.0; n];
            for i in k..n {
                v[i] = r.get(i, k);
            }
            v[k] -= alpha;
            let vnorm2: f64 = v.iter().map(|x| x * x).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            // r = (I - 2vv^T/|v|^2) r ; q = q (I - 2vv^T/|v|^2)
            for j in 0..n {
                let s: f64 = (k..n).map(|i| v[i] * r.get(i, j)).sum::<f64>() * 2.0 / vnorm2;
                for i in k..n {
                    r.set(i, j, r.get(i, j) - s * v[i]);
                }
            }
            for i in 0..n {
                let s: f64 = (k..n).map(|j| q.get(i, j) * v[j]).sum::<f64>() * 2.0 / vnorm2;
                for j in k..n {
                    q.set(i, j, q.get(i, j) - s * v[j]);
                }
            }
        }
        (q, r)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Row-major matrix of intervals.
#[derive(Clone, PartialEq)]
pub struct IntervalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Interval>,
}

impl fmt::Debug for IntervalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntervalMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:?} ", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl IntervalMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Interval>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        IntervalMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntervalMatrix::new(rows, cols, vec![Interval::ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntervalMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Interval::ONE);
        }
        m
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        IntervalMatrix::new(
            m.rows(),
            m.cols(),
            m.as_slice().iter().map(|&x| Interval::point(x)).collect(),
        )
    }

    pub fn from_points(rows: usize, cols: usize, data: &[f64]) -> Self {
        IntervalMatrix::new(rows, cols, data.iter().map(|&x| Interval::point(x)).collect())
    }

    pub fn from_rows(rows: &[Vec<Interval>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        IntervalMatrix::new(r, c, rows.iter().flatten().copied().collect())
    }

    pub fn diagonal(d: &[Interval]) -> Self {
        let mut m = IntervalMatrix::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    pub fn from_columns(cols: &[IntervalVector]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |v| v.len());
        let mut m = IntervalMatrix::zeros(r, c);
        for (j, v) in cols.iter().enumerate() {
            for i in 0..r {
                m.set(i, j, v[i]);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Interval {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Interval) {
        self.data[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.data
    }

    pub fn row(&self, i: usize) -> IntervalVector {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn column(&self, j: usize) -> IntervalVector {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Sub-matrix picking the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> IntervalMatrix {
        let mut m = IntervalMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }

    /// Exact transpose.
    pub fn transpose(&self) -> IntervalMatrix {
        let mut t = IntervalMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntervalMatrix) -> IntervalMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimensions");
        let mut p = IntervalMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut s = Interval::ZERO;
                for k in 0..self.cols {
                    s += self.get(i, k) * other.get(k, j);
                }
                p.set(i, j, s);
            }
        }
        p
    }

    pub fn mul_vec(&self, v: &IntervalVector) -> IntervalVector {
        assert_eq!(self.cols, v.len(), "matrix-vector dimensions");
        (0..self.rows)
            .map(|i| {
                let mut s = Interval::ZERO;
                for k in 0..self.cols {
                    s += self.get(i, k) * v[k];
                }
                s
            })
            .collect()
    }

    pub fn add(&self, other: &IntervalMatrix) -> IntervalMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum dimensions");
        IntervalMatrix::new(
            self.rows,
            self.cols,
            self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect(),
        )
    }

    pub fn sub(&self, other: &IntervalMatrix) -> IntervalMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix difference dimensions");
        IntervalMatrix::new(
            self.rows,
            self.cols,
            self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect(),
        )
    }

    pub fn neg(&self) -> IntervalMatrix {
        IntervalMatrix::new(self.rows, self.cols, self.data.iter().map(|a| -*a).collect())
    }

    pub fn scale(&self, s: Interval) -> IntervalMatrix {
        IntervalMatrix::new(self.rows, self.cols, self.data.iter().map(|a| *a * s).collect())
    }

    pub fn hull(&self, other: &IntervalMatrix) -> IntervalMatrix {
        IntervalMatrix::new(
            self.rows,
            self.cols,
            self.data.iter().zip(&other.data).map(|(a, b)| a.hull(b)).collect(),
        )
    }

    pub fn subset(&self, other: &IntervalMatrix) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols)
            && self.data.iter().zip(&other.data).all(|(a, b)| a.subset(b))
    }

    pub fn contains_matrix(&self, m: &Matrix) -> bool {
        (self.rows, self.cols) == (m.rows(), m.cols())
            && self.data.iter().zip(m.as_slice()).all(|(a, &x)| a.contains(x))
    }

    pub fn mid(&self) -> Matrix {
        Matrix::new(self.rows, self.cols, self.data.iter().map(|x| x.mid()).collect())
    }

    /// Largest entry width.
    pub fn max_width(&self) -> f64 {
        self.data.iter().map(|x| x.width()).fold(0.0, f64::max)
    }

    /// `(A + A^T) / 2`; the result contains the symmetric part of every member.
    pub fn symmetric_part(&self) -> IntervalMatrix {
        assert!(self.is_square(), "symmetric part of a non-square matrix");
        let half = Interval::point(0.5);
        let mut s = IntervalMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in i..self.cols {
                let v = (self.get(i, j) + self.get(j, i)) * half;
                s.set(i, j, v);
                s.set(j, i, v);
            }
        }
        s
    }

    /// Upper bound of the max column sum of magnitudes.
    pub fn norm1_sup(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(0.0, |acc, i| add_up(acc, self.get(i, j).mag())))
            .fold(0.0, f64::max)
    }

    /// Upper bound of the max row sum of magnitudes.
    pub fn norm_inf_sup(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(0.0, |acc, j| add_up(acc, self.get(i, j).mag())))
            .fold(0.0, f64::max)
    }

    /// Upper bound of the Frobenius norm over the matrix set.
    pub fn frobenius_sup(&self) -> f64 {
        let s = self
            .data
            .iter()
            .fold(0.0, |acc, x| add_up(acc, mul_up(x.mag(), x.mag())));
        sqrt_up(s)
    }

    /// Upper bound of the spectral norm of every member.
    pub fn opnorm_sup(&self) -> f64 {
        let frob = self.frobenius_sup();
        let mixed = sqrt_up(mul_up(self.norm1_sup(), self.norm_inf_sup()));
        frob.min(mixed)
    }

    /// Enclosure of the inverses of all members, via interval Gauss-Jordan
    /// elimination with partial pivoting on the system preconditioned by the
    /// approximate midpoint inverse.
    pub fn inverse(&self) -> Result<IntervalMatrix, IntervalError> {
        if !self.is_square() {
            return Err(IntervalError::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(IntervalMatrix::zeros(0, 0));
        }
        let r = match self.mid().inverse() {
            Some(r) if r.as_slice().iter().all(|x| x.is_finite()) => IntervalMatrix::from_matrix(&r),
            _ => IntervalMatrix::identity(n),
        };
        let a = r.mul(self);
        let inv_ra = gauss_jordan_inverse(&a)?;
        Ok(inv_ra.mul(&r))
    }

    /// Solves `A x = b` for every member pair, returning an enclosure.
    pub fn solve(&self, b: &IntervalVector) -> Result<IntervalVector, IntervalError> {
        Ok(self.inverse()?.mul_vec(b))
    }

    /// Lower bound of `m(M) = min_{|z|=1} |Mz|` over all members; 0 when
    /// invertibility cannot be verified.
    pub fn m_lower(&self) -> f64 {
        if !self.is_square() {
            return 0.0;
        }
        if self.rows == 0 {
            return 0.0;
        }
        match self.inverse() {
            Ok(inv) => {
                let n = inv.opnorm_sup();
                if n.is_finite() && n > 0.0 {
                    div_down(1.0, n).max(0.0)
                } else {
                    0.0
                }
            }
            Err(_) => 0.0,
        }
    }
}

fn gauss_jordan_inverse(a: &IntervalMatrix) -> Result<IntervalMatrix, IntervalError> {
    let n = a.rows();
    let mut m = a.clone();
    let mut inv = IntervalMatrix::identity(n);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m.get(i, k).mig().total_cmp(&m.get(j, k).mig()))
            .expect("nonempty range");
        if m.get(p, k).contains_zero() {
            return Err(IntervalError::Singular);
        }
        if p != k {
            for j in 0..n {
                let t = m.get(k, j);
                m.set(k, j, m.get(p, j));
                m.set(p, j, t);
                let t = inv.get(k, j);
                inv.set(k, j, inv.get(p, j));
                inv.set(p, j, t);
            }
        }
        let piv = m.get(k, k);
        for j in 0..n {
            m.set(k, j, m.get(k, j).div(&piv)?);
            inv.set(k, j, inv.get(k, j).div(&piv)?);
        }
        m.set(k, k, Interval::ONE);
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = m.get(i, k);
            if f == Interval::ZERO {
                continue;
            }
            for j in 0..n {
                m.set(i, j, m.get(i, j) - f * m.get(k, j));
                inv.set(i, j, inv.get(i, j) - f * inv.get(k, j));
            }
            m.set(i, k, Interval::ZERO);
        }
    }
    Ok(inv)
}

/// Upper bound of the spectral norm over an interval matrix (`mat_opnorm_sup`).
pub fn mat_opnorm_sup(a: &IntervalMatrix) -> f64 {
    a.opnorm_sup()
}

/// Lower bound of `m(A)` over an interval matrix (`mat_m_lower`).
pub fn mat_m_lower(a: &IntervalMatrix) -> f64 {
    a.m_lower()
}
