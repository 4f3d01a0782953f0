use integrator::{FlowJet, StepControl};
use interval_core::{Interval, IntervalMatrix, IntervalVector, Matrix};
use jets::{compose_jet2, eval_jet2, ExprDag, Jet2, Node, SymTensor3};
use nhim_verifier::NhimReport;
use poincare::{first_crossing_from, point_crossing, CrossingJet, Section};

use crate::MelnikovError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Unstable,
    Stable,
}

impl Branch {
    pub fn label(&self) -> &'static str {
        match self {
            Branch::Unstable => "u",
            Branch::Stable => "s",
        }
    }
}

/// Positions of the local coordinates: the fiber (unstable for the branch's
/// flow), the parameter, the angle and the normal (stable) coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalLayout {
    pub fiber: usize,
    pub eps: usize,
    pub time: usize,
    pub normal: usize,
}

/// The branch of the manifold near the fiber coordinate `r`, as the graph
/// `ybar = w(r, eps, s)` in local coordinates, pushed to the ambient space by
/// `C psi`.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldChart {
    pub branch: Branch,
    pub r: f64,
    pub eps_range: Interval,
    /// Bound on the stable coordinate of the graph.
    pub value_bound: f64,
    /// `L`: every first partial of `w` lies in `L [-1, 1]`.
    pub first_deriv_bound: f64,
    /// `2M`: every second partial of `w` lies in `2M [-1, 1]`.
    pub second_deriv_bound: f64,
    pub linear: Matrix,
    pub psi: ExprDag,
    pub base_field: ExprDag,
    /// `C psi` on local coordinates.
    pub chart_map: ExprDag,
    /// The field integrated from the chart to the section.
    pub flow_field: ExprDag,
    pub section: Section,
    pub layout: LocalLayout,
    /// Upper bound on flight times from the chart to the section.
    pub t_max: f64,
    pub ambient_time: usize,
    pub time_rate: f64,
}

/// Geometric data of one branch shared by every chart built on it.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchGeometry {
    pub linear: Matrix,
    pub psi: ExprDag,
    pub base_field: ExprDag,
    pub chart_map: ExprDag,
    pub flow_field: ExprDag,
    pub section: Section,
    pub layout: LocalLayout,
    pub t_max: f64,
    /// Ambient index of the angle coordinate.
    pub ambient_time: usize,
    /// Constant rate of the angle along `flow_field`.
    pub time_rate: f64,
}

fn depends_on_variables(dag: &ExprDag, node: usize) -> bool {
    let nodes = dag.nodes();
    let mut seen = vec![false; nodes.len()];
    let mut stack = vec![node];
    while let Some(i) = stack.pop() {
        if std::mem::replace(&mut seen[i], true) {
            continue;
        }
        match nodes[i] {
            Node::Var(_) => return true,
            Node::Const(_) => {}
            Node::Unary(_, a) => stack.push(a),
            Node::Binary(_, a, b) => stack.extend([a, b]),
        }
    }
    false
}

impl BranchGeometry {
    /// Checks that `chart_map` passes the local angle through unchanged to
    /// one ambient coordinate and that `flow_field` moves that coordinate at
    /// a constant nonzero rate.
    #[allow(clippy::too_many_arguments)]
    pub fn new(linear: Matrix, psi: ExprDag, base_field: ExprDag, chart_map: ExprDag, flow_field: ExprDag, section: Section, layout: LocalLayout, t_max: f64) -> Result<Self, MelnikovError> {
        let nodes = chart_map.nodes();
        let ambient_time = chart_map
            .outputs()
            .iter()
            .position(|&o| nodes[o] == Node::Var(layout.time))
            .ok_or_else(|| MelnikovError::Geometry("chart map does not pass the angle coordinate through".into()))?;
        let out = flow_field.outputs()[ambient_time];
        if depends_on_variables(&flow_field, out) {
            return Err(MelnikovError::Geometry("angle rate of the flow field is not constant".into()));
        }
        let rate = flow_field.eval_interval(&IntervalVector::zeros(flow_field.arity()))?[ambient_time];
        if !rate.is_point() || rate.lo() == 0.0 {
            return Err(MelnikovError::Geometry(format!("angle rate {rate:?} must be a nonzero constant")));
        }
        Ok(BranchGeometry {
            linear,
            psi,
            base_field,
            chart_map,
            flow_field,
            section,
            layout,
            t_max,
            ambient_time,
            time_rate: rate.lo(),
        })
    }
}

/// Builds the chart of a branch from its NHIM certificate.
///
/// The certificate must pass and its domain must cover `eps_range`; `r` must
/// lie in the verified fiber radius.
pub fn manifold_local_chart(branch: Branch, geometry: &BranchGeometry, report: Option<&NhimReport>, eps_range: Interval, r: f64) -> Result<ManifoldChart, MelnikovError> {
    let rep = report.ok_or_else(|| MelnikovError::CertificateMissing(format!("no NHIM certificate for branch {}", branch.label())))?;
    if !rep.passed() {
        return Err(MelnikovError::CertificateMissing(format!("NHIM certificate for branch {} did not pass", branch.label())));
    }
    let d = &rep.domain;
    let covers = d.center.iter().filter(|c| c.var == geometry.layout.eps && c.period.is_none()).any(|c| eps_range.subset(&c.range));
    if !covers {
        return Err(MelnikovError::CertificateMissing(format!("branch {}: certified domain does not cover eps in {eps_range:?}", branch.label())));
    }
    if !(r > 0.0 && r <= d.radius) {
        return Err(MelnikovError::CertificateMissing(format!("branch {}: r = {r:e} outside the certified radius {:e}", branch.label(), d.radius)));
    }
    Ok(ManifoldChart::from_bounds(branch, geometry, eps_range, r, d.stable_radius, rep.first_deriv_bound(), rep.second_deriv_bound()))
}

impl ManifoldChart {
    /// A chart with explicitly given bounds (no certificate check).
    pub fn from_bounds(branch: Branch, g: &BranchGeometry, eps_range: Interval, r: f64, value_bound: f64, l: f64, two_m: f64) -> Self {
        ManifoldChart {
            branch,
            r,
            eps_range,
            value_bound,
            first_deriv_bound: l,
            second_deriv_bound: two_m,
            linear: g.linear.clone(),
            psi: g.psi.clone(),
            base_field: g.base_field.clone(),
            chart_map: g.chart_map.clone(),
            flow_field: g.flow_field.clone(),
            section: g.section,
            layout: g.layout,
            t_max: g.t_max,
            ambient_time: g.ambient_time,
            time_rate: g.time_rate,
        }
    }

    /// The same chart restricted to a sub-range of the parameter.
    pub fn restricted(&self, eps: Interval) -> Result<ManifoldChart, MelnikovError> {
        if !eps.subset(&self.eps_range) {
            return Err(MelnikovError::CertificateMissing(format!("eps in {eps:?} outside the chart range {:?}", self.eps_range)));
        }
        Ok(ManifoldChart { eps_range: eps, ..self.clone() })
    }

    /// Jet of `(r, eps, s, w(r, eps, s))` in local coordinates over `(eps, s)`.
    pub fn local_jet(&self, eps: Interval, s: Interval) -> Jet2 {
        let n = self.psi.arity();
        let lay = self.layout;
        let l = Interval::symmetric(self.first_deriv_bound);
        let mut value = IntervalVector::zeros(n);
        value[lay.fiber] = Interval::point(self.r);
        value[lay.eps] = eps;
        value[lay.time] = s;
        value[lay.normal] = Interval::symmetric(self.value_bound);
        let mut jac = IntervalMatrix::zeros(n, 2);
        jac.set(lay.eps, 0, Interval::ONE);
        jac.set(lay.time, 1, Interval::ONE);
        jac.set(lay.normal, 0, l);
        jac.set(lay.normal, 1, l);
        let mut hess = SymTensor3::zeros(n, 2);
        let m = Interval::symmetric(self.second_deriv_bound);
        for (i, j) in [(0, 0), (0, 1), (1, 1)] {
            hess.set(lay.normal, i, j, m);
        }
        Jet2::new(value, jac, hess)
    }

    /// Jet of the chart point `q(eps, s) = C psi(r, eps, s, w)` in ambient
    /// coordinates.
    pub fn seed_jet(&self, eps: Interval, s: Interval) -> Result<Jet2, MelnikovError> {
        let inner = self.local_jet(eps, s);
        let outer = eval_jet2(&self.chart_map, &inner.value)?;
        Ok(compose_jet2(&outer, &inner)?)
    }

    /// The map `h(eps, s)`: first crossing of the branch flow from the chart
    /// point with the section.
    pub fn h_map(&self, eps: Interval, s: Interval, ctrl: &StepControl) -> Result<CrossingJet, MelnikovError> {
        let initial = FlowJet::from_chart(&self.chart_map, &self.local_jet(eps, s), 0.0)?;
        Ok(first_crossing_from(&self.flow_field, initial, &self.section, ctrl, self.t_max)?)
    }

    /// Non-rigorous crossing of the chart point with `w = 0`: the flight time
    /// and the crossing point.
    pub fn approximate_crossing(&self, eps: f64, s: f64) -> Result<(f64, Vec<f64>), MelnikovError> {
        let n = self.psi.arity();
        let mut z = vec![0.0; n];
        z[self.layout.fiber] = self.r;
        z[self.layout.eps] = eps;
        z[self.layout.time] = s;
        let q = self.chart_map.eval_point(&z)?;
        Ok(point_crossing(&self.flow_field, &q, &self.section, self.t_max)?)
    }
}
