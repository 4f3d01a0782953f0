use interval_core::{Interval, IntervalBox, IntervalMatrix};
use jets::{eval_jet2, ExprDag, Jet2, SymTensor3};
use rayon::prelude::*;

use crate::{DomainSpec, NhimError};

/// Which coordinates play the expanding (`x`) and the dominated (`y`) role
/// in a cone or slope estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlopeMode {
    /// `x` = unstable, `y` = (center, stable): fibers of the unstable foliation.
    Fiber,
    /// `x` = (center, unstable), `y` = stable: the center-unstable graph.
    Graph,
}

/// A split of the field's variables into two blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blocking {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
}

impl Blocking {
    pub fn new(d: &DomainSpec, mode: SlopeMode) -> Blocking {
        let c = d.center_vars();
        match mode {
            SlopeMode::Fiber => Blocking {
                x: d.unstable.clone(),
                y: c.iter().chain(&d.stable).copied().collect(),
            },
            SlopeMode::Graph => Blocking {
                x: c.iter().chain(&d.unstable).copied().collect(),
                y: d.stable.clone(),
            },
        }
    }
}

/// Enclosures of the blocks of `Df` and `D^2 f` over one cell.
#[derive(Clone, Debug)]
pub struct BlockPartials {
    pub cell: IntervalBox,
    pub dfx_dx: IntervalMatrix,
    pub dfx_dy: IntervalMatrix,
    pub dfy_dx: IntervalMatrix,
    pub dfy_dy: IntervalMatrix,
    /// Second derivatives of `f_x`, variables ordered `(x, y)`.
    pub d2fx: SymTensor3,
    /// Second derivatives of `f_y`, variables ordered `(x, y)`.
    pub d2fy: SymTensor3,
}

impl BlockPartials {
    /// `d^2 f_y / dx^2`, `d^2 f_y / dx dy` and `d^2 f_y / dy^2` slices.
    pub fn fy_second_blocks(&self) -> (Vec<IntervalMatrix>, Vec<IntervalMatrix>, Vec<IntervalMatrix>) {
        let nx = self.dfx_dx.rows();
        let ny = self.dfy_dy.rows();
        let xs: Vec<usize> = (0..nx).collect();
        let ys: Vec<usize> = (nx..nx + ny).collect();
        let mut xx = Vec::new();
        let mut xy = Vec::new();
        let mut yy = Vec::new();
        for k in 0..ny {
            let s = self.d2fy.slice(k);
            xx.push(s.select(&xs, &xs));
            xy.push(s.select(&xs, &ys));
            yy.push(s.select(&ys, &ys));
        }
        (xx, xy, yy)
    }
}

/// Jets of `f` over every cell of `D`, in cell order.
pub fn cell_jets(f: &ExprDag, d: &DomainSpec) -> Result<Vec<(IntervalBox, Jet2)>, NhimError> {
    d.validate(f.arity())?;
    if f.output_count() != f.arity() {
        return Err(NhimError::InvalidDomain("field must map R^n to R^n".into()));
    }
    d.cells()
        .into_par_iter()
        .map(|cell| {
            let jet = eval_jet2(f, cell.coords())?;
            Ok((cell, jet))
        })
        .collect()
}

pub(crate) fn split_blocks(cell: IntervalBox, jet: &Jet2, b: &Blocking) -> BlockPartials {
    let order: Vec<usize> = b.x.iter().chain(&b.y).copied().collect();
    let j = &jet.jacobian;
    BlockPartials {
        cell,
        dfx_dx: j.select(&b.x, &b.x),
        dfx_dy: j.select(&b.x, &b.y),
        dfy_dx: j.select(&b.y, &b.x),
        dfy_dy: j.select(&b.y, &b.y),
        d2fx: jet.hessian.select(&b.x, &order),
        d2fy: jet.hessian.select(&b.y, &order),
    }
}

/// Per-cell block enclosures of `Df` and `D^2 f` in original coordinates.
pub fn block_partials(f: &ExprDag, d: &DomainSpec, b: &Blocking) -> Result<Vec<BlockPartials>, NhimError> {
    Ok(cell_jets(f, d)?
        .into_iter()
        .map(|(cell, jet)| split_blocks(cell, &jet, b))
        .collect())
}

/// `diag(c)^{-1} J diag(c)`: the Jacobian in normalized coordinates.
pub fn normalize_jacobian(j: &IntervalMatrix, c: &[f64]) -> IntervalMatrix {
    let mut out = j.clone();
    for r in 0..j.rows() {
        for k in 0..j.cols() {
            if c[r] != c[k] {
                let f = Interval::point(c[k]).div(&Interval::point(c[r])).expect("positive scale");
                out.set(r, k, j.get(r, k) * f);
            }
        }
    }
    out
}
