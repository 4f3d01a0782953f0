use interval_core::{split_grid, Interval, IntervalBox, IntervalVector};
use jets::{eval_jet2, ExprDag};
use rayon::prelude::*;

use crate::{DomainSpec, NhimError};

/// A boundary face of `D`: the part of the unstable (or stable) sphere on
/// which coordinate `var` has sign `sign` and the largest magnitude.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Face {
    pub unstable: bool,
    pub var: usize,
    pub sign: i8,
}

/// Outcome of the isolating-block check.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockCheck {
    /// `unstable_min` is a lower bound of `(pi_x f | pi_x q)` on the unstable
    /// boundary, `stable_max` an upper bound of `(pi_y f | pi_y q)` on the
    /// stable boundary.
    Pass {
        cells: usize,
        unstable_min: f64,
        stable_max: f64,
    },
    Fail {
        face: Face,
        cell: IntervalBox,
        product: Interval,
    },
}

impl BlockCheck {
    pub fn passed(&self) -> bool {
        matches!(self, BlockCheck::Pass { .. })
    }
}

/// Boxes covering the part of the sphere `|z| = r` (over `vars`) where
/// `z_var` has sign `sign` and `|z_var| >= r / sqrt(n)`.
fn face_box(d: &DomainSpec, face: Face) -> IntervalBox {
    let base = d.full_box();
    let (vars, r) = if face.unstable {
        (&d.unstable, d.radius)
    } else {
        (&d.stable, d.stable_radius)
    };
    let n = vars.len() as f64;
    let inner = if vars.len() == 1 {
        r
    } else {
        let root = Interval::point(n).sqrt().expect("positive");
        Interval::point(r).div(&root).expect("nonzero").lo()
    };
    let v = if face.sign > 0 {
        Interval::new(inner, r)
    } else {
        Interval::new(-r, -inner)
    };
    base.with(face.var, v)
}

/// Enclosure of `f` over `cell`: the natural extension intersected with the
/// mean-value form `f(m) + Df(cell) (cell - m)`.
pub fn mean_value_enclosure(f: &ExprDag, cell: &IntervalVector) -> Result<IntervalVector, NhimError> {
    let jet = eval_jet2(f, cell)?;
    let m = cell.mid();
    let fm = f.eval_interval(&IntervalVector::from_points(&m))?;
    let dz: IntervalVector = cell.iter().zip(&m).map(|(c, &mi)| *c - mi).collect();
    let mv = &fm + &jet.jacobian.mul_vec(&dz);
    Ok(mv.intersection(&jet.value).unwrap_or(mv))
}

/// Checks `(pi_x f(q) | pi_x q) > 0` on the unstable boundary and
/// `(pi_y f(q) | pi_y q) < 0` on the stable boundary, on faces subdivided
/// by the block partition.
pub fn check_isolating_block(f: &ExprDag, d: &DomainSpec) -> Result<BlockCheck, NhimError> {
    d.validate(f.arity())?;
    let mut faces = Vec::new();
    for (unstable, vars) in [(true, &d.unstable), (false, &d.stable)] {
        for &var in vars.iter() {
            for sign in [1i8, -1] {
                faces.push(Face { unstable, var, sign });
            }
        }
    }
    let mut jobs = Vec::new();
    for face in faces {
        let mut counts = d.block_partition.clone();
        let vars = if face.unstable { &d.unstable } else { &d.stable };
        if vars.len() == 1 {
            counts[face.var] = 1;
        }
        for cell in split_grid(&face_box(d, face), &counts) {
            jobs.push((face, cell));
        }
    }
    let products: Vec<Result<Interval, NhimError>> = jobs
        .par_iter()
        .map(|(face, cell)| {
            let fv = mean_value_enclosure(f, cell.coords())?;
            let vars = if face.unstable { &d.unstable } else { &d.stable };
            Ok(Interval::sum(&vars.iter().map(|&v| fv[v] * cell.get(v)).collect::<Vec<_>>()))
        })
        .collect();
    let mut unstable_min = f64::INFINITY;
    let mut stable_max = f64::NEG_INFINITY;
    for ((face, cell), p) in jobs.iter().zip(products) {
        let p = p?;
        let ok = if face.unstable { p.lo() > 0.0 } else { p.hi() < 0.0 };
        if !ok {
            return Ok(BlockCheck::Fail {
                face: *face,
                cell: cell.clone(),
                product: p,
            });
        }
        if face.unstable {
            unstable_min = unstable_min.min(p.lo());
        } else {
            stable_max = stable_max.max(p.hi());
        }
    }
    Ok(BlockCheck::Pass {
        cells: jobs.len(),
        unstable_min,
        stable_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use jets::parse_dag;

    fn dom(u: Vec<usize>, s: Vec<usize>) -> DomainSpec {
        let n = u.len() + s.len();
        DomainSpec {
            center: vec![],
            unstable: u,
            stable: s,
            radius: 0.1,
            stable_radius: 0.2,
            chart_radius: 1.0,
            slope: 0.5,
            block_partition: vec![2; n],
        }
    }

    #[test]
    fn saddle_is_isolating() {
        let f = parse_dag(&["x", "y"], &["x", "(neg y)"]).unwrap();
        let r = check_isolating_block(&f, &dom(vec![0], vec![1])).unwrap();
        match r {
            BlockCheck::Pass { unstable_min, stable_max, .. } => {
                assert!(unstable_min > 0.0099 && unstable_min <= 0.01);
                assert!(stable_max < -0.0399 && stable_max >= -0.04);
            }
            _ => panic!("expected pass"),
        }
    }

    #[test]
    fn sink_fails_on_unstable_face() {
        let f = parse_dag(&["x", "y"], &["(neg x)", "(neg y)"]).unwrap();
        match check_isolating_block(&f, &dom(vec![0], vec![1])).unwrap() {
            BlockCheck::Fail { face, product, .. } => {
                assert!(face.unstable);
                assert!(product.hi() <= 0.0);
            }
            _ => panic!("expected failure"),
        }
    }

    #[test]
    fn two_dimensional_unstable_sphere() {
        let f = parse_dag(&["a", "b", "y"], &["(+ a (* (/ 1 2) b))", "(- b (* (/ 1 2) a))", "(neg y)"]).unwrap();
        assert!(check_isolating_block(&f, &dom(vec![0, 1], vec![2])).unwrap().passed());
    }

    #[test]
    fn mean_value_form_is_tighter() {
        let f = parse_dag(&["x"], &["(- (sqr x) (* 2 x))"]).unwrap();
        let b = IntervalVector::new(vec![Interval::new(0.9, 1.1)]);
        let naive = f.eval_interval(&b).unwrap();
        let mv = mean_value_enclosure(&f, &b).unwrap();
        assert!(mv.subset(&naive) && mv[0].width() < naive[0].width());
        assert!(mv[0].contains(-1.0));
    }
}
