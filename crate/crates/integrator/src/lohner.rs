use interval_core::{Interval, IntervalError, IntervalMatrix, Matrix};

/// The set `{ C + B R : R in coeffs }` of `n x k` matrices (a vector when
/// `k = 1`), with `C` a point matrix, `B` an `n x n` point basis and `R` an
/// interval matrix. Each column is a parallelepiped sharing the basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Parallelepiped {
    pub center: Matrix,
    pub basis: Matrix,
    pub coeffs: IntervalMatrix,
}

/// Entrywise intersection, falling back to `a` where the two are disjoint
/// (which only rounding could cause).
pub(crate) fn intersect(a: &IntervalMatrix, b: &IntervalMatrix) -> IntervalMatrix {
    IntervalMatrix::new(
        a.rows(),
        a.cols(),
        a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x.intersection(y).unwrap_or(*x)).collect(),
    )
}

impl Parallelepiped {
    /// Parallelepiped with the identity basis covering `m`.
    pub fn from_hull(m: &IntervalMatrix) -> Self {
        let center = m.mid();
        let coeffs = m.sub(&IntervalMatrix::from_matrix(&center));
        Parallelepiped {
            center,
            basis: Matrix::identity(m.rows()),
            coeffs,
        }
    }

    pub fn rows(&self) -> usize {
        self.center.rows()
    }

    pub fn cols(&self) -> usize {
        self.center.cols()
    }

    /// Interval hull `C + B R`.
    pub fn hull(&self) -> IntervalMatrix {
        IntervalMatrix::from_matrix(&self.center).add(&IntervalMatrix::from_matrix(&self.basis).mul(&self.coeffs))
    }

    /// Image under `X -> Y + J (X - C)` for `X` in the set: encloses
    /// `Y + J B R`, re-centred at `mid(Y)` and re-based on the orthogonal
    /// factor of `mid(J) B` (columns ordered by their contribution).
    /// Returns the new set and an interval hull intersected with the direct
    /// evaluation of `Y + (J B) R`.
    pub fn advance(&self, y: &IntervalMatrix, j: &IntervalMatrix) -> Result<(Parallelepiped, IntervalMatrix), IntervalError> {
        let n = self.rows();
        let bi = IntervalMatrix::from_matrix(&self.basis);
        let jb = j.mul(&bi);
        let direct = y.add(&jb.mul(&self.coeffs));
        let center = y.mid();
        let a = j.mid().mul(&self.basis);
        let weight = |c: usize| -> f64 {
            let norm: f64 = (0..n).map(|i| a.get(i, c).powi(2)).sum::<f64>().sqrt();
            let spread = (0..self.cols()).map(|l| self.coeffs.get(c, l).mag()).fold(0.0, f64::max);
            norm * spread
        };
        let mut order: Vec<usize> = (0..n).collect();
        let w: Vec<f64> = (0..n).map(weight).collect();
        order.sort_by(|&p, &q| w[q].total_cmp(&w[p]).then(p.cmp(&q)));
        let mut ap = Matrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            for i in 0..n {
                ap.set(i, dst, a.get(i, src));
            }
        }
        let (q, _) = ap.qr();
        let qinv = IntervalMatrix::from_matrix(&q).inverse()?;
        let shift = y.sub(&IntervalMatrix::from_matrix(&center));
        let coeffs = qinv.mul(&jb).mul(&self.coeffs).add(&qinv.mul(&shift));
        let next = Parallelepiped {
            center,
            basis: q,
            coeffs,
        };
        let hull = intersect(&next.hull(), &direct);
        Ok((next, hull))
    }

    /// Largest coefficient radius, a measure of the wrapping-free spread.
    pub fn spread(&self) -> f64 {
        self.coeffs.as_slice().iter().map(Interval::mag).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation(a: f64) -> IntervalMatrix {
        let (s, c) = a.sin_cos();
        IntervalMatrix::from_points(2, 2, &[c, -s, s, c])
    }

    #[test]
    fn hull_of_identity_basis() {
        let m = IntervalMatrix::new(2, 1, vec![Interval::new(0.0, 2.0), Interval::new(-1.0, 1.0)]);
        let p = Parallelepiped::from_hull(&m);
        assert!(m.subset(&p.hull()) && p.hull().subset(&m.hull(&p.hull())));
    }

    #[test]
    fn repeated_rotation_does_not_wrap() {
        // the square [-1,1]^2 rotated 100 times by 0.3 rad: a naive box
        // enclosure grows by sqrt(2) per step, the parallelepiped stays put
        let m = IntervalMatrix::new(2, 1, vec![Interval::new(-1.0, 1.0), Interval::new(-1.0, 1.0)]);
        let mut p = Parallelepiped::from_hull(&m);
        let j = rotation(0.3);
        let mut hull = p.hull();
        for _ in 0..100 {
            let c = IntervalMatrix::from_matrix(&p.center);
            let y = j.mul(&c);
            let (next, h) = p.advance(&y, &j).unwrap();
            p = next;
            hull = h;
        }
        assert!(hull.max_width() < 2.0 * 2f64.sqrt() + 1e-9, "{:?}", hull);
        assert!(p.spread() < 1.0 + 1e-9);
    }
}
