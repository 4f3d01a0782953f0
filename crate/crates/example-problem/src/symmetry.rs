use interval_core::{Interval, IntervalMatrix, IntervalVector};
use jets::{ExprDag, Jet2};
use serde::{Deserialize, Serialize};

use crate::ExampleError;

/// A diagonal involution `S = diag(signs)` with `signs[i]` in `{1, -1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Involution {
    pub signs: Vec<f64>,
}

impl Involution {
    pub fn new(signs: Vec<f64>) -> Self {
        assert!(signs.iter().all(|s| *s == 1.0 || *s == -1.0), "involution signs must be +-1");
        Involution { signs }
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn matrix(&self) -> IntervalMatrix {
        IntervalMatrix::diagonal(&self.signs.iter().map(|&s| Interval::point(s)).collect::<Vec<_>>())
    }

    pub fn apply(&self, x: &IntervalVector) -> IntervalVector {
        x.iter().zip(&self.signs).map(|(&v, &s)| if s < 0.0 { -v } else { v }).collect()
    }

    pub fn apply_point(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.signs).map(|(v, s)| v * s).collect()
    }

    /// Enclosure of `f(S x) + S f(x)` over `x`; contains zero everywhere
    /// when `S` reverses `f`.
    pub fn reversal_defect(&self, f: &ExprDag, x: &IntervalVector) -> Result<IntervalVector, ExampleError> {
        let a = f.eval_interval(&self.apply(x))?;
        let b = self.apply(&f.eval_interval(x)?);
        Ok(a.iter().zip(b.iter()).map(|(&p, &q)| p + q).collect())
    }
}

/// `S x`: the image of a point set under the involution.
pub fn symmetry_transport(s: &Involution, x: &IntervalVector) -> IntervalVector {
    s.apply(x)
}

/// `S j`: the jet of `S o h` from the jet of `h`.
pub fn transport_jet(s: &Involution, j: &Jet2) -> Jet2 {
    assert_eq!(s.dim(), j.outputs(), "involution dimension");
    let mut out = j.clone();
    for (k, &sign) in s.signs.iter().enumerate() {
        if sign > 0.0 {
            continue;
        }
        out.value[k] = -out.value[k];
        for i in 0..j.dim() {
            out.jacobian.set(k, i, -j.jacobian.get(k, i));
            for l in 0..=i {
                out.hessian.set(k, i, l, -j.hessian.get(k, i, l));
            }
        }
    }
    out
}
