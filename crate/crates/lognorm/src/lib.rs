//! Euclidean logarithmic norm `l(A)` and logarithmic minimum `m_l(A)` of
//! interval matrices, as one-sided float bounds.
//!
//! In the Euclidean norm `l(A)` is the largest and `m_l(A)` the smallest
//! eigenvalue of `(A + A^T)/2`. Eigenvalue bounds come from an approximate
//! Jacobi diagonalization of the midpoint followed by a rigorous Gershgorin
//! enclosure of the transformed interval matrix.

use interval_core::{mat_opnorm_sup, Interval, IntervalMatrix, Matrix};

/// Enclosure of the spectrum of a set of symmetric matrices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymEigBounds {
    pub lambda_min_lower: f64,
    pub lambda_max_upper: f64,
}

/// Cyclic Jacobi rotations on a symmetric float matrix. Returns the
/// approximate eigenvector matrix (columns); no accuracy is assumed.
pub fn jacobi_eigenvectors(a: &Matrix) -> Matrix {
    let n = a.rows();
    let mut a = a.clone();
    let mut v = Matrix::identity(n);
    for _sweep in 0..60 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a.get(i, j) * a.get(i, j);
                }
            }
        }
        let diag: f64 = (0..n).map(|i| a.get(i, i) * a.get(i, i)).sum();
        if off <= 1e-32 * diag.max(f64::MIN_POSITIVE) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    v
}

/// Gershgorin enclosure of the real parts of all eigenvalues of members of `b`.
fn gershgorin(b: &IntervalMatrix) -> Interval {
    let n = b.rows();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = Interval::ZERO;
        for j in 0..n {
            if i != j {
                r += Interval::point(b.get(i, j).mag());
            }
        }
        let d = b.get(i, i);
        lo = lo.min((d - r).lo());
        hi = hi.max((d + r).hi());
    }
    Interval::new(lo, hi)
}

/// Bounds on every eigenvalue of every symmetric member of `s`.
pub fn sym_eig_bounds(s: &IntervalMatrix) -> SymEigBounds {
    assert!(s.is_square(), "eigenvalue bounds of a non-square matrix");
    let n = s.rows();
    if n == 0 {
        return SymEigBounds {
            lambda_min_lower: 0.0,
            lambda_max_upper: 0.0,
        };
    }
    let plain = gershgorin(s);
    let mid = s.symmetric_part().mid();
    let q = jacobi_eigenvectors(&mid);
    let qi = IntervalMatrix::from_matrix(&q);
    let qt = qi.transpose();
    // Q^T M Q has eigenvalues theta_k * lambda_k(M) with theta_k in the
    // spectrum of Q^T Q (Ostrowski), and |theta - 1| <= ||Q^T Q - I||.
    let delta = mat_opnorm_sup(&qt.mul(&qi).sub(&IntervalMatrix::identity(n)));
    let mut enclosure = plain;
    if delta < 0.5 {
        let transformed = gershgorin(&qt.mul(s).mul(&qi));
        let theta = Interval::new(1.0, 1.0).inflate(delta);
        if let Ok(rot) = transformed.div(&theta) {
            enclosure = enclosure.intersection(&rot).unwrap_or(enclosure);
        }
    }
    SymEigBounds {
        lambda_min_lower: enclosure.lo(),
        lambda_max_upper: enclosure.hi(),
    }
}

/// Upper bound of the logarithmic norm `l(M)` over all `M` in `a`.
pub fn lognorm_upper(a: &IntervalMatrix) -> f64 {
    sym_eig_bounds(&a.symmetric_part()).lambda_max_upper
}

/// Lower bound of `m_l(M) = -l(-M)` over all `M` in `a`.
pub fn ml_lower(a: &IntervalMatrix) -> f64 {
    -lognorm_upper(&a.neg())
}

/// Enclosure of `e^{L t} d0`: the separation envelope of two solutions
/// (upper when `L` bounds the log norm, lower when it bounds `m_l`).
pub fn growth_envelope(l: f64, t: Interval, d0: Interval) -> Interval {
    (Interval::point(l) * t).exp() * d0
}

/// Spectral-norm bound using the eigenvalue enclosure of `A^T A`, never
/// worse than [`mat_opnorm_sup`].
pub fn opnorm_sup_tight(a: &IntervalMatrix) -> f64 {
    let cheap = mat_opnorm_sup(a);
    let ata = a.transpose().mul(a);
    let top = sym_eig_bounds(&ata.symmetric_part()).lambda_max_upper.max(0.0);
    let tight = Interval::point(top).sqrt().map(|x| x.hi()).unwrap_or(f64::INFINITY);
    cheap.min(tight)
}
