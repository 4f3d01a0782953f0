use interval_core::{Interval, IntervalMatrix};
use jets::{ExprDag, SymTensor3};
use lognorm::{opnorm_sup_tight, sym_eig_bounds};
use rayon::prelude::*;

use crate::blocks::{BlockPartials, SlopeMode};
use crate::slope::{blocks_for, cone_rates};
use crate::{DomainSpec, NhimError};

/// Which bound on the second derivative was smaller.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MFormula {
    General,
    Improved,
}

/// Constants of the second-derivative estimate for a manifold that is a
/// graph over the `x` block with slope `lcal`:
///
/// * `c_x = 1/2 max_{|v|=1} |D^2 f_x (v,v)|`, `c_y` likewise for `f_y`;
/// * `c_y1 = 1/2 sup |d^2 f_y/dx^2|`, `c_y2 = sup |d^2 f_y/dx dy|`,
///   `c_y3 = 1/2 sup |d^2 f_y/dy^2|`;
/// * `M_general > (lcal c_x + c_y)(1 + lcal^2) / (2 xi - mu2)`;
/// * `M_improved > (lcal c_x (1 + lcal^2) + c_y1 + c_y2 lcal + c_y3 lcal^2) / (2 xi - mu2)`.
///
/// Every second partial of the graph then lies in `2 M [-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondDerivConstants {
    pub lcal: f64,
    pub c_x: f64,
    pub c_y: f64,
    pub c_y1: f64,
    pub c_y2: f64,
    pub c_y3: f64,
    pub xi: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub m_general: f64,
    pub m_improved: f64,
    pub m_bound: f64,
    pub formula_used: MFormula,
}

/// Upper bound of `max_{|u|=|v|=1} |(u^T B_k v)_k|` for the slices `B_k`.
fn bilinear_norm(slices: &[IntervalMatrix]) -> f64 {
    let mut acc = Interval::ZERO;
    for s in slices {
        let n = if s.is_square() && s.rows() > 0 && *s == s.transpose() {
            let e = sym_eig_bounds(s);
            e.lambda_max_upper.abs().max(e.lambda_min_lower.abs())
        } else {
            opnorm_sup_tight(s)
        };
        acc += Interval::point(n).sqr();
    }
    acc.sqrt().map(|r| r.hi()).unwrap_or(f64::INFINITY)
}

fn quadratic_norm(t: &SymTensor3) -> f64 {
    let slices: Vec<IntervalMatrix> = (0..t.outputs()).map(|k| t.slice(k)).collect();
    bilinear_norm(&slices)
}

#[derive(Clone, Copy, Default)]
struct CellSecond {
    c_x: f64,
    c_y: f64,
    c_y1: f64,
    c_y2: f64,
    c_y3: f64,
}

fn cell_second(b: &BlockPartials) -> CellSecond {
    let (xx, xy, yy) = b.fy_second_blocks();
    let half = |v: f64| {
        let h = v * 0.5;
        if h * 2.0 == v {
            h
        } else {
            h.next_up()
        }
    };
    CellSecond {
        c_x: half(quadratic_norm(&b.d2fx)),
        c_y: half(quadratic_norm(&b.d2fy)),
        c_y1: half(bilinear_norm(&xx)),
        c_y2: bilinear_norm(&xy),
        c_y3: half(bilinear_norm(&yy)),
    }
}

/// Second-derivative bound `M` for the invariant graph over the `x` block
/// (chosen by `mode`) with Lipschitz constant `lcal`, in original
/// coordinates over `D`.
pub fn second_deriv_bound(f: &ExprDag, d: &DomainSpec, lcal: f64, mode: SlopeMode) -> Result<SecondDerivConstants, NhimError> {
    assert!(lcal > 0.0, "slope must be positive");
    let blocks = blocks_for(f, d, mode)?;
    let rates = cone_rates(&blocks, lcal);
    let two_xi = (2.0 * rates.xi).next_down();
    if !(rates.mu1 < rates.xi && rates.mu2 < two_xi) {
        return Err(NhimError::RateHypothesisViolated {
            xi: rates.xi,
            mu1: rates.mu1,
            mu2: rates.mu2,
        });
    }
    let cs = blocks
        .par_iter()
        .map(cell_second)
        .collect::<Vec<_>>()
        .into_iter()
        .fold(CellSecond::default(), |a, c| CellSecond {
            c_x: a.c_x.max(c.c_x),
            c_y: a.c_y.max(c.c_y),
            c_y1: a.c_y1.max(c.c_y1),
            c_y2: a.c_y2.max(c.c_y2),
            c_y3: a.c_y3.max(c.c_y3),
        });
    let p = Interval::point;
    let l = p(lcal);
    let one_l2 = Interval::ONE + l.sqr();
    let denom = p(two_xi) - p(rates.mu2);
    let general = ((l * p(cs.c_x) + p(cs.c_y)) * one_l2).div(&denom)?;
    let improved = (l * p(cs.c_x) * one_l2 + p(cs.c_y1) + p(cs.c_y2) * l + p(cs.c_y3) * l.sqr()).div(&denom)?;
    // strict inequality: step one ulp above the upper bound of the quotient
    let m_general = general.hi().next_up();
    let m_improved = improved.hi().next_up();
    let (m_bound, formula_used) = if m_improved <= m_general {
        (m_improved, MFormula::Improved)
    } else {
        (m_general, MFormula::General)
    };
    Ok(SecondDerivConstants {
        lcal,
        c_x: cs.c_x,
        c_y: cs.c_y,
        c_y1: cs.c_y1,
        c_y2: cs.c_y2,
        c_y3: cs.c_y3,
        xi: rates.xi,
        mu1: rates.mu1,
        mu2: rates.mu2,
        m_general,
        m_improved,
        m_bound,
        formula_used,
    })
}
