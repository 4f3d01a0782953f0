use interval_core::{Interval, IntervalMatrix, Matrix};
use jets::{parse_dag, DagBuilder, ExprDag, NodeId};
use nhim_verifier::{CenterCoord, DomainSpec};
use poincare::Section;
use serde::{Deserialize, Serialize};

use crate::seed::{param_method_seed, ParamSeed};
use crate::symmetry::Involution;
use crate::ExampleError;

pub const AMBIENT_VARS: [&str; 4] = ["x", "eps", "t", "y"];
pub const LOCAL_VARS: [&str; 4] = ["xb", "eps", "t", "yb"];

/// Order of the polynomial unstable-manifold seed used by the example.
pub const EXAMPLE_SEED_ORDER: usize = 3;

/// One manifold branch: the change `(x, eps, t, y) = C psi(xb, eps, t, yb)`
/// and the field in local coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchSpec {
    pub linear: Matrix,
    pub psi: ExprDag,
    pub psi_inv: ExprDag,
    /// The (possibly negated) ambient field conjugated by `C psi`.
    pub local_field: ExprDag,
    /// The ambient field for the unstable branch, its negation for the
    /// stable one.
    pub flow_field: ExprDag,
    pub reversed: bool,
    /// The section together with the crossing direction along `flow_field`.
    pub section: Section,
}

impl BranchSpec {
    /// `C psi` as one expression on local coordinates.
    pub fn chart_map(&self) -> ExprDag {
        let mut b = DagBuilder::new(&self.psi.var_names().to_vec());
        let z: Vec<NodeId> = (0..self.psi.arity()).map(|i| b.var(i)).collect();
        let p = b.inline(&self.psi, &z);
        let out = linear_combination(&mut b, &IntervalMatrix::from_matrix(&self.linear), &p);
        b.finish(&out)
    }

    /// `psi^{-1} C^{-1}` as one expression on ambient coordinates.
    pub fn chart_inverse(&self, ambient_names: &[String]) -> Result<ExprDag, ExampleError> {
        let ci = IntervalMatrix::from_matrix(&self.linear).inverse()?;
        let mut b = DagBuilder::new(ambient_names);
        let x: Vec<NodeId> = (0..ambient_names.len()).map(|i| b.var(i)).collect();
        let w = linear_combination(&mut b, &ci, &x);
        let out = b.inline(&self.psi_inv, &w);
        Ok(b.finish(&out))
    }
}

/// The NHIM domain `D` over a range of `eps` and a radius `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainTemplate {
    pub radius: f64,
    pub eps: [f64; 2],
    pub slope: f64,
    pub chart_radius: f64,
    pub partition: Vec<usize>,
    /// Local coordinate indices: unstable fiber, parameter, angle, stable.
    pub fiber: usize,
    pub eps_coord: usize,
    pub time_coord: usize,
    pub normal: usize,
}

impl DomainTemplate {
    pub fn eps_range(&self) -> Interval {
        Interval::new(self.eps[0], self.eps[1])
    }

    pub fn domain(&self) -> DomainSpec {
        DomainSpec {
            center: vec![CenterCoord::interval(self.eps_coord, self.eps_range()), CenterCoord::angle(self.time_coord)],
            unstable: vec![self.fiber],
            stable: vec![self.normal],
            radius: self.radius,
            stable_radius: self.radius,
            chart_radius: self.chart_radius,
            slope: self.slope,
            block_partition: self.partition.clone(),
        }
    }

    pub fn with_eps(&self, eps: Interval) -> DomainTemplate {
        DomainTemplate {
            eps: [eps.lo(), eps.hi()],
            ..self.clone()
        }
    }

    pub fn with_partition(&self, partition: Vec<usize>) -> DomainTemplate {
        DomainTemplate { partition, ..self.clone() }
    }
}

/// Published reference values kept with a problem for regression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Published {
    pub l: f64,
    pub m: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub eps_melnikov: f64,
    pub eps_total: f64,
    pub direct_cells: usize,
}

/// A complete problem definition.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub name: String,
    pub ambient: ExprDag,
    pub unstable: BranchSpec,
    pub stable: BranchSpec,
    pub template: DomainTemplate,
    pub symmetry: Option<Involution>,
    pub seed_order: usize,
    pub published: Option<Published>,
}

impl ProblemSpec {
    pub fn branch(&self, stable: bool) -> &BranchSpec {
        if stable {
            &self.stable
        } else {
            &self.unstable
        }
    }

    /// The section in the ambient coordinates (crossing direction of the
    /// unstable branch).
    pub fn section(&self) -> Section {
        self.unstable.section
    }
}

/// `x' = y - eps cos(t) y^2`, `eps' = 0`, `t' = 1`, `y' = x - x^2`.
pub fn example_ambient() -> ExprDag {
    parse_dag(&AMBIENT_VARS, &["(- y (* eps (cos t) (sqr y)))", "0", "1", "(- x (sqr x))"]).expect("valid expression")
}

fn linear_combination(b: &mut DagBuilder, m: &IntervalMatrix, x: &[NodeId]) -> Vec<NodeId> {
    (0..m.rows())
        .map(|i| {
            let terms: Vec<NodeId> = (0..m.cols())
                .filter(|&j| m.get(i, j).mag() != 0.0)
                .map(|j| {
                    let c = m.get(i, j);
                    if c == Interval::ONE {
                        x[j]
                    } else if c == Interval::point(-1.0) {
                        b.neg(x[j])
                    } else {
                        let k = b.constant(c);
                        b.mul(k, x[j])
                    }
                })
                .collect();
            b.sum(&terms)
        })
        .collect()
}

fn polynomial(b: &mut DagBuilder, coeffs: &[Interval], x: NodeId) -> NodeId {
    let terms: Vec<NodeId> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.mag() != 0.0)
        .map(|(k, &c)| {
            let p = if k == 0 { b.num(1.0) } else { b.pow(x, k as i32) };
            let k = b.constant(c);
            b.mul(k, p)
        })
        .collect();
    b.sum(&terms)
}

/// The planar field at `eps = 0` in the eigen-coordinates `(x, y) = C (u, v)`
/// with `C = [[1, -1], [1, 1]]`.
pub fn diagonal_field(ambient: &ExprDag) -> ExprDag {
    let mut b = DagBuilder::new(&["u", "v"]);
    let (u, v) = (b.var(0), b.var(1));
    let x = b.sub(u, v);
    let y = b.add(u, v);
    let zero = b.num(0.0);
    let f = b.inline(ambient, &[x, zero, zero, y]);
    let half = b.ratio(1.0, 2.0);
    let s = b.add(f[0], f[3]);
    let d = b.sub(f[3], f[0]);
    let fu = b.mul(half, s);
    let fv = b.mul(half, d);
    b.finish(&[fu, fv])
}

/// Builds a branch from `C`, the shear sign `sigma` of
/// `psi(xb, eps, t, yb) = (xb, eps, t, yb + sigma K2(xb))` and whether the
/// ambient field is reversed.
fn build_branch(ambient: &ExprDag, seed: &ParamSeed, c: Matrix, sigma: f64, reversed: bool, section: Section) -> Result<BranchSpec, ExampleError> {
    let k2 = &seed.k2;
    let k2p = seed.k2_derivative();
    let shear = |sign: f64| {
        let mut b = DagBuilder::new(&LOCAL_VARS);
        let z: Vec<NodeId> = (0..4).map(|i| b.var(i)).collect();
        let k = polynomial(&mut b, k2, z[0]);
        let last = if sign > 0.0 { b.add(z[3], k) } else { b.sub(z[3], k) };
        b.finish(&[z[0], z[1], z[2], last])
    };
    let psi = shear(sigma);
    let psi_inv = shear(-sigma);
    let flow_field = if reversed { ambient.negated() } else { ambient.clone() };

    let ci = IntervalMatrix::from_matrix(&c).inverse()?;
    let mut b = DagBuilder::new(&LOCAL_VARS);
    let z: Vec<NodeId> = (0..4).map(|i| b.var(i)).collect();
    let p = b.inline(&psi, &z);
    let x = linear_combination(&mut b, &IntervalMatrix::from_matrix(&c), &p);
    let f = b.inline(&flow_field, &x);
    let g = linear_combination(&mut b, &ci, &f);
    let kp = polynomial(&mut b, &k2p, z[0]);
    let corr = b.mul(kp, g[0]);
    let last = if sigma > 0.0 { b.sub(g[3], corr) } else { b.add(g[3], corr) };
    let local_field = b.finish(&[g[0], g[1], g[2], last]);
    Ok(BranchSpec {
        linear: c,
        psi,
        psi_inv,
        local_field,
        flow_field,
        reversed,
        section,
    })
}

/// The reference problem over `eps` in `e` with local radius `r`.
pub fn build_example(e: Interval, r: f64) -> Result<ProblemSpec, ExampleError> {
    if !(e.lo() >= 0.0 && e.hi() <= 0.1) {
        return Err(ExampleError::Malformed(format!("eps range {e:?} outside [0, 0.1]")));
    }
    if !(r > 0.0) {
        return Err(ExampleError::Malformed(format!("radius {r} must be positive")));
    }
    let ambient = example_ambient();
    let seed = param_method_seed(&diagonal_field(&ambient), EXAMPLE_SEED_ORDER)?;
    let cu = Matrix::from_rows(&[vec![1.0, 0.0, 0.0, -1.0], vec![0.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0, 1.0]]);
    let cs = Matrix::from_rows(&[vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0], vec![-1.0, 0.0, 0.0, 1.0]]);
    let unstable = build_branch(&ambient, &seed, cu, 1.0, false, Section::new(3, 0.0, -1))?;
    let stable = build_branch(&ambient, &seed, cs, -1.0, true, Section::new(3, 0.0, 1))?;
    Ok(ProblemSpec {
        name: "forced saddle loop".into(),
        ambient,
        unstable,
        stable,
        template: DomainTemplate {
            radius: r,
            eps: [e.lo(), e.hi()],
            slope: 0.5,
            chart_radius: 1.0,
            partition: vec![128, 1, 1, 1],
            fiber: 0,
            eps_coord: 1,
            time_coord: 2,
            normal: 3,
        },
        symmetry: Some(Involution::new(vec![1.0, 1.0, -1.0, -1.0])),
        seed_order: EXAMPLE_SEED_ORDER,
        published: Some(Published {
            l: 6.278276608e-6,
            m: 1.1271e-3,
            tau1: 4.6,
            tau2: 4.8,
            eps_melnikov: 1e-3,
            eps_total: 1e-2,
            direct_cells: 90,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use interval_core::IntervalVector;

    fn spec() -> ProblemSpec {
        build_example(Interval::new(0.0, 1e-3), 2e-4).unwrap()
    }

    #[test]
    fn saddle_circle_is_fixed() {
        let p = spec();
        for b in [&p.unstable, &p.stable] {
            let v = b.local_field.eval_interval(&IntervalVector::from_points(&[0.0, 1e-3, 0.7, 0.0])).unwrap();
            assert_eq!(v[0], Interval::ZERO);
            assert_eq!(v[3], Interval::ZERO);
            assert!(v[2].contains(if b.reversed { -1.0 } else { 1.0 }));
        }
    }

    #[test]
    fn unperturbed_ambient_is_planar_saddle() {
        let f = example_ambient();
        let v = f.eval_point(&[0.3, 0.0, 1.1, -0.2]).unwrap();
        assert_eq!(v, vec![-0.2, 0.0, 1.0, 0.3 - 0.09]);
    }

    #[test]
    fn linear_changes_invert() {
        let p = spec();
        for b in [&p.unstable, &p.stable] {
            let c = IntervalMatrix::from_matrix(&b.linear);
            let prod = c.mul(&c.inverse().unwrap());
            assert!(prod.contains_matrix(&Matrix::identity(4)));
            assert!(prod.max_width() == 0.0);
        }
    }

    #[test]
    fn local_fields_match_closed_form() {
        let p = spec();
        let (xb, e, t, yb): (f64, f64, f64, f64) = (0.013, 7e-4, 2.1, -0.004);
        let k2 = -xb * xb / 6.0 - xb * xb * xb / 12.0;
        let k2p = -xb / 3.0 - xb * xb / 4.0;
        let ec = e * t.cos();
        let a = xb + yb + k2;
        let b = xb - yb - k2;
        let f1 = xb - 0.5 * ec * a * a - 0.5 * b * b;
        let h = -yb - k2 + 0.5 * ec * a * a - 0.5 * b * b;
        let u = p.unstable.local_field.eval_point(&[xb, e, t, yb]).unwrap();
        assert!((u[0] - f1).abs() < 1e-15 && (u[3] - (h - k2p * f1)).abs() < 1e-15);
        let a = -xb + yb - k2;
        let b = xb + yb - k2;
        let g1 = xb + 0.5 * ec * a * a - 0.5 * b * b;
        let gh = -yb + k2 + 0.5 * ec * a * a + 0.5 * b * b;
        let s = p.stable.local_field.eval_point(&[xb, e, t, yb]).unwrap();
        assert!((s[0] - g1).abs() < 1e-15 && (s[3] - (gh + k2p * g1)).abs() < 1e-15);
        assert_eq!(s[2], -1.0);
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(build_example(Interval::new(0.0, 0.5), 2e-4).is_err());
        assert!(build_example(Interval::new(0.0, 1e-3), 0.0).is_err());
    }
}
