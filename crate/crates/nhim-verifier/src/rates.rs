use std::fmt;

use interval_core::IntervalMatrix;
use jets::ExprDag;
use lognorm::{lognorm_upper, ml_lower, opnorm_sup_tight};
use rayon::prelude::*;

use crate::blocks::{cell_jets, normalize_jacobian};
use crate::{DomainSpec, NhimError};

/// The eight rate constants of the field over `D`. The `mu` values are
/// upper bounds and the `xi` values lower bounds of their definitions.
///
/// Blocks: `lambda` = center, `x` = unstable, `y` = stable.
/// * `mu_s1  = sup l(df_y/dy) + (1/L) |df_y/d(lambda,x)|`
/// * `mu_s2  = sup l(df_y/dy) + L |df_(lambda,x)/dy|`
/// * `xi_u1  = inf m_l(df_x/dx) - (1/L) |df_x/d(lambda,y)|`
/// * `xi_u1P = inf m_l(df_x/dx) - (1/L) sup |df_x/d(lambda,y)|`
/// * `mu_cs1 = sup l(df_(lambda,y)/d(lambda,y)) + L |df_(lambda,y)/dx|`
/// * `mu_cs2 = sup l(df_(lambda,y)/d(lambda,y)) + (1/L) |df_x/d(lambda,y)|`
/// * `xi_cu1 = inf m_l(df_(lambda,x)/d(lambda,x)) - L |df_(lambda,x)/dy|`
/// * `xi_cu1P = inf m_l(df_(lambda,x)/d(lambda,x)) - L sup |df_(lambda,x)/dy|`
///
/// The `P` variants take the infimum of `m_l` over the whole domain; since
/// every point of `D` lies in some `P(z)`, this equals the infimum over
/// `z` of the infimum over `P(z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateConstants {
    pub mu_s1: f64,
    pub mu_s2: f64,
    pub xi_u1: f64,
    pub xi_u1p: f64,
    pub mu_cs1: f64,
    pub mu_cs2: f64,
    pub xi_cu1: f64,
    pub xi_cu1p: f64,
}

impl RateConstants {
    pub fn as_pairs(&self) -> [(&'static str, f64); 8] {
        [
            ("mu_s1", self.mu_s1),
            ("mu_s2", self.mu_s2),
            ("xi_u1", self.xi_u1),
            ("xi_u1P", self.xi_u1p),
            ("mu_cs1", self.mu_cs1),
            ("mu_cs2", self.mu_cs2),
            ("xi_cu1", self.xi_cu1),
            ("xi_cu1P", self.xi_cu1p),
        ]
    }
}

/// Per-cell ingredients of the rate constants.
#[derive(Clone, Copy, Debug)]
struct CellRates {
    l_yy: f64,
    n_y_lx: f64,
    ml_xx: f64,
    n_x_ly: f64,
    l_ly: f64,
    n_ly_x: f64,
    ml_lx: f64,
    n_lx_y: f64,
}

fn cell_rates(j: &IntervalMatrix, lam: &[usize], x: &[usize], y: &[usize]) -> CellRates {
    let cat = |a: &[usize], b: &[usize]| -> Vec<usize> { a.iter().chain(b).copied().collect() };
    let lx = cat(lam, x);
    let ly = cat(lam, y);
    CellRates {
        l_yy: lognorm_upper(&j.select(y, y)),
        n_y_lx: opnorm_sup_tight(&j.select(y, &lx)),
        ml_xx: ml_lower(&j.select(x, x)),
        n_x_ly: opnorm_sup_tight(&j.select(x, &ly)),
        l_ly: lognorm_upper(&j.select(&ly, &ly)),
        n_ly_x: opnorm_sup_tight(&j.select(&ly, x)),
        ml_lx: ml_lower(&j.select(&lx, &lx)),
        n_lx_y: opnorm_sup_tight(&j.select(&lx, y)),
    }
}

// Directed-rounding helpers for scalar reductions.
fn add_up(a: f64, b: f64) -> f64 {
    (a + b).next_up()
}
fn mul_up(a: f64, b: f64) -> f64 {
    (a * b).next_up()
}
fn sub_down(a: f64, b: f64) -> f64 {
    (a - b).next_down()
}
fn inv_up(l: f64) -> f64 {
    (1.0 / l).next_up()
}

/// Rate constants of `f` over `D`, evaluated in normalized coordinates
/// (stable coordinates divided by `R_s / R`) with cone slope `D.slope`.
pub fn rate_constants(f: &ExprDag, d: &DomainSpec) -> Result<RateConstants, NhimError> {
    let jets = cell_jets(f, d)?;
    let c = d.normalization();
    let lam = d.center_vars();
    let cells: Vec<CellRates> = jets
        .par_iter()
        .map(|(_, jet)| cell_rates(&normalize_jacobian(&jet.jacobian, &c), &lam, &d.unstable, &d.stable))
        .collect();
    let l = d.slope;
    let li = inv_up(l);
    let mut rc = RateConstants {
        mu_s1: f64::NEG_INFINITY,
        mu_s2: f64::NEG_INFINITY,
        xi_u1: f64::INFINITY,
        xi_u1p: f64::INFINITY,
        mu_cs1: f64::NEG_INFINITY,
        mu_cs2: f64::NEG_INFINITY,
        xi_cu1: f64::INFINITY,
        xi_cu1p: f64::INFINITY,
    };
    let mut ml_xx = f64::INFINITY;
    let mut ml_lx = f64::INFINITY;
    let mut n_x_ly = 0.0f64;
    let mut n_lx_y = 0.0f64;
    for cr in &cells {
        rc.mu_s1 = rc.mu_s1.max(add_up(cr.l_yy, mul_up(li, cr.n_y_lx)));
        rc.mu_s2 = rc.mu_s2.max(add_up(cr.l_yy, mul_up(l, cr.n_lx_y)));
        rc.xi_u1 = rc.xi_u1.min(sub_down(cr.ml_xx, mul_up(li, cr.n_x_ly)));
        rc.mu_cs1 = rc.mu_cs1.max(add_up(cr.l_ly, mul_up(l, cr.n_ly_x)));
        rc.mu_cs2 = rc.mu_cs2.max(add_up(cr.l_ly, mul_up(li, cr.n_x_ly)));
        rc.xi_cu1 = rc.xi_cu1.min(sub_down(cr.ml_lx, mul_up(l, cr.n_lx_y)));
        ml_xx = ml_xx.min(cr.ml_xx);
        ml_lx = ml_lx.min(cr.ml_lx);
        n_x_ly = n_x_ly.max(cr.n_x_ly);
        n_lx_y = n_lx_y.max(cr.n_lx_y);
    }
    rc.xi_u1p = sub_down(ml_xx, mul_up(li, n_x_ly));
    rc.xi_cu1p = sub_down(ml_lx, mul_up(l, n_lx_y));
    Ok(rc)
}

/// One violated inequality `lhs < rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub inequality: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl Violation {
    /// `rhs - lhs`; nonpositive for a violation.
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:e} < {:e} fails", self.inequality, self.lhs, self.rhs)
    }
}

/// Outcome of checking the rate conditions.
#[derive(Clone, Debug, PartialEq)]
pub enum RateCheck {
    Pass,
    Fail(Vec<Violation>),
}

impl RateCheck {
    pub fn passed(&self) -> bool {
        matches!(self, RateCheck::Pass)
    }
}

/// Every inequality of the rate conditions of order `k`, as `(name, lhs, rhs)`
/// meaning `lhs < rhs`.
pub fn rate_inequalities(rc: &RateConstants, k: usize) -> Vec<(String, f64, f64)> {
    let mut v = vec![
        ("mu_s1 < 0".to_string(), rc.mu_s1, 0.0),
        ("0 < xi_u1P".to_string(), 0.0, rc.xi_u1p),
        ("mu_cs1 < xi_u1P".to_string(), rc.mu_cs1, rc.xi_u1p),
        ("mu_s1 < xi_cu1P".to_string(), rc.mu_s1, rc.xi_cu1p),
    ];
    for j in 1..=k {
        let jj = (j + 1) as f64;
        // (j+1) * xi_cu1, rounded down
        let rhs = (jj * rc.xi_cu1).next_down();
        v.push((format!("mu_s2 < {}*xi_cu1", j + 1), rc.mu_s2, rhs));
    }
    v.push(("mu_cs2 < xi_u1".to_string(), rc.mu_cs2, rc.xi_u1));
    v
}

/// Rate conditions of order `k >= 1`.
pub fn check_rate_conditions(rc: &RateConstants, k: usize) -> RateCheck {
    assert!(k >= 1, "rate conditions need order k >= 1");
    let bad: Vec<Violation> = rate_inequalities(rc, k)
        .into_iter()
        .filter(|(_, lhs, rhs)| !(lhs < rhs))
        .map(|(inequality, lhs, rhs)| Violation { inequality, lhs, rhs })
        .collect();
    if bad.is_empty() {
        RateCheck::Pass
    } else {
        RateCheck::Fail(bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::CenterCoord;
    use interval_core::Interval;
    use jets::parse_dag;

    fn decoupled() -> (ExprDag, DomainSpec) {
        let f = parse_dag(&["l", "x", "y"], &["0", "x", "(neg y)"]).unwrap();
        let d = DomainSpec {
            center: vec![CenterCoord::interval(0, Interval::new(0.0, 1.0))],
            unstable: vec![1],
            stable: vec![2],
            radius: 0.1,
            stable_radius: 0.1,
            chart_radius: 1.0,
            slope: 0.5,
            block_partition: vec![1, 1, 1],
        };
        (f, d)
    }

    #[test]
    fn decoupled_linear_constants() {
        let (f, d) = decoupled();
        let rc = rate_constants(&f, &d).unwrap();
        assert!(rc.mu_s1 <= -1.0 + 1e-12 && rc.mu_s1 >= -1.0);
        assert!(rc.xi_u1 >= 1.0 - 1e-12 && rc.xi_u1 <= 1.0);
        assert!(rc.mu_cs1.abs() < 1e-12);
        assert!(rc.xi_cu1.abs() < 1e-12);
        assert!(check_rate_conditions(&rc, 2).passed());
    }

    #[test]
    fn reversed_field_swaps_roles() {
        let (f, d) = decoupled();
        let rc = rate_constants(&f, &d).unwrap();
        let mut r = d.clone();
        r.unstable = d.stable.clone();
        r.stable = d.unstable.clone();
        let back = rate_constants(&f.negated(), &r).unwrap();
        assert!((rc.xi_u1 + back.mu_s1).abs() < 1e-12);
        assert!((rc.mu_s1 + back.xi_u1).abs() < 1e-12);
    }

    #[test]
    fn positive_stable_rate_fails() {
        let rc = RateConstants {
            mu_s1: 0.1,
            mu_s2: -1.0,
            xi_u1: 1.0,
            xi_u1p: 1.0,
            mu_cs1: 0.0,
            mu_cs2: 0.0,
            xi_cu1: 0.0,
            xi_cu1p: 0.0,
        };
        match check_rate_conditions(&rc, 2) {
            RateCheck::Fail(v) => {
                assert!(v.iter().any(|x| x.inequality == "mu_s1 < 0"));
                assert!(v.iter().all(|x| x.margin() <= 0.0));
            }
            RateCheck::Pass => panic!("must fail"),
        }
    }

    #[test]
    fn order_adds_inequalities() {
        let (f, d) = decoupled();
        let rc = rate_constants(&f, &d).unwrap();
        assert_eq!(rate_inequalities(&rc, 3).len(), rate_inequalities(&rc, 1).len() + 2);
    }
}
