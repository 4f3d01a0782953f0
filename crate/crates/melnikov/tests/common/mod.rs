#![allow(dead_code)]

use example_problem::{build_example, BranchSpec, ProblemSpec};
use interval_core::Interval;
use melnikov::{manifold_local_chart, Branch, BranchGeometry, ChartPair, LocalLayout};
use nhim_verifier::{verify_nhim, NhimOptions, NhimReport};

pub const T_MAX: f64 = 20.0;

pub fn layout(p: &ProblemSpec) -> LocalLayout {
    let t = &p.template;
    LocalLayout {
        fiber: t.fiber,
        eps: t.eps_coord,
        time: t.time_coord,
        normal: t.normal,
    }
}

pub fn geometry(p: &ProblemSpec, b: &BranchSpec) -> BranchGeometry {
    BranchGeometry::new(b.linear.clone(), b.psi.clone(), b.local_field.clone(), b.chart_map(), b.flow_field.clone(), b.section, layout(p), T_MAX).unwrap()
}

pub fn reports(p: &ProblemSpec) -> (NhimReport, NhimReport) {
    let d = p.template.domain();
    let u = verify_nhim(&p.unstable.local_field, &d, NhimOptions::default()).unwrap();
    let s = verify_nhim(&p.stable.local_field, &d, NhimOptions::default()).unwrap();
    (u, s)
}

/// Certified chart pair of the example over `[0, e]` with the `x` gap.
pub fn example_pair(e: f64) -> ChartPair {
    let r = 2e-4;
    let eps = Interval::new(0.0, e);
    let p = build_example(eps, r).unwrap();
    let (ru, rs) = reports(&p);
    let u = manifold_local_chart(Branch::Unstable, &geometry(&p, &p.unstable), Some(&ru), eps, r).unwrap();
    let s = manifold_local_chart(Branch::Stable, &geometry(&p, &p.stable), Some(&rs), eps, r).unwrap();
    ChartPair::new(u, s, 0)
}
