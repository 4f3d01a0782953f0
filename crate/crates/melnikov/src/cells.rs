use integrator::StepControl;
use interval_core::Interval;
use rayon::prelude::*;

use crate::certificate::{verify_direct, verify_theorem_main, CellMode, TransversalityCertificate};
use crate::delta::{delta_bounds, ChartPair, DeltaBounds};
use crate::MelnikovError;

/// `tau` settings shared by all cells.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TauParams {
    pub tau1: f64,
    pub tau2: f64,
    /// Subintervals of `[tau1, tau2]` for the mixed-derivative clause.
    pub subdivisions: usize,
    /// `tau` window of direct cells.
    pub window: [f64; 2],
    /// Subintervals of the window for the `d_tau` clause of direct cells.
    pub window_subdivisions: usize,
}

impl TauParams {
    pub fn validate(&self) -> Result<(), MelnikovError> {
        if !(self.tau1 < self.tau2) || !(self.window[0] < self.window[1]) || self.subdivisions == 0 || self.window_subdivisions == 0 {
            return Err(MelnikovError::Precondition(format!("need ordered tau ranges and positive subdivisions, got {self:?}")));
        }
        Ok(())
    }
}

/// Enclosures behind one cell's certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct CellBounds {
    pub at_tau1: DeltaBounds,
    pub at_tau2: DeltaBounds,
    /// Mixed-derivative pieces (Melnikov) or `d_tau` pieces (direct).
    pub pieces: Vec<DeltaBounds>,
}

impl CellBounds {
    pub fn all(&self) -> impl Iterator<Item = &DeltaBounds> {
        [&self.at_tau1, &self.at_tau2].into_iter().chain(self.pieces.iter())
    }
}

fn bounds(pair: &ChartPair, eps: Interval, (t1, t2): (f64, f64), n: usize, with_delta: bool, ctrl: &StepControl) -> Result<CellBounds, MelnikovError> {
    let mut taus = vec![Interval::point(t1), Interval::point(t2)];
    taus.extend(Interval::new(t1, t2).split(n));
    let mut all = taus
        .par_iter()
        .map(|&tau| delta_bounds(pair, eps, tau, ctrl, with_delta))
        .collect::<Result<Vec<_>, _>>()?;
    let pieces = all.split_off(2);
    let at_tau2 = all.pop().expect("two endpoints");
    let at_tau1 = all.pop().expect("two endpoints");
    Ok(CellBounds { at_tau1, at_tau2, pieces })
}

/// `d_eps` at `tau1`, `tau2` and the mixed derivative on `subdivisions`
/// pieces of `[tau1, tau2]`, over `eps`.
pub fn melnikov_bounds(pair: &ChartPair, eps: Interval, p: &TauParams, ctrl: &StepControl) -> Result<CellBounds, MelnikovError> {
    p.validate()?;
    bounds(pair, eps, (p.tau1, p.tau2), p.subdivisions, false, ctrl)
}

/// `delta` at the window ends and `d_tau` on `window_subdivisions` pieces
/// of the window.
pub fn direct_bounds(pair: &ChartPair, band: Interval, p: &TauParams, ctrl: &StepControl) -> Result<CellBounds, MelnikovError> {
    p.validate()?;
    bounds(pair, band, (p.window[0], p.window[1]), p.window_subdivisions, true, ctrl)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellSpec {
    pub eps: Interval,
    pub mode: CellMode,
}

/// One Melnikov cell `[0, eps_melnikov]` followed by `n_direct` direct cells
/// of equal width up to `eps_total`. Neighboring cells share endpoints.
pub fn schedule(eps_melnikov: f64, eps_total: f64, n_direct: usize) -> Vec<CellSpec> {
    let mut cells = vec![CellSpec {
        eps: Interval::new(0.0, eps_melnikov),
        mode: CellMode::Melnikov,
    }];
    let w = (eps_total - eps_melnikov) / n_direct as f64;
    let edge = |i: usize| if i == n_direct { eps_total } else { eps_melnikov + i as f64 * w };
    cells.extend((0..n_direct).map(|i| CellSpec {
        eps: Interval::new(edge(i), edge(i + 1)),
        mode: CellMode::Direct,
    }));
    cells
}

#[derive(Clone, Debug)]
pub struct CellResult {
    pub index: usize,
    pub spec: CellSpec,
    /// Enclosures, when they could be computed.
    pub bounds: Option<CellBounds>,
    pub outcome: Result<TransversalityCertificate, MelnikovError>,
}

impl CellResult {
    pub fn passed(&self) -> bool {
        matches!(&self.outcome, Ok(c) if c.valid())
    }
}

#[derive(Clone, Debug)]
pub struct ContinuationReport {
    pub target: Interval,
    pub cells: Vec<CellResult>,
    /// Parts of `target \ {0}` not covered by any cell.
    pub gaps: Vec<Interval>,
}

impl ContinuationReport {
    pub fn covered(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.covered() && self.cells.iter().all(CellResult::passed)
    }

    pub fn failures(&self) -> Vec<(usize, Interval, String)> {
        self.cells
            .iter()
            .filter(|c| !c.passed())
            .map(|c| {
                let why = match &c.outcome {
                    Ok(_) => "certificate has a failing clause".to_string(),
                    Err(e) => e.to_string(),
                };
                (c.index, c.spec.eps, why)
            })
            .collect()
    }
}

/// Parts of `target` not covered by `ranges`, ignoring the single point 0.
pub fn coverage_gaps(ranges: &[Interval], target: Interval) -> Vec<Interval> {
    let mut r: Vec<Interval> = ranges.to_vec();
    r.sort_by(|a, b| a.lo().total_cmp(&b.lo()));
    let mut gaps = Vec::new();
    let mut reach = target.lo();
    for x in r {
        if x.lo() > reach {
            gaps.push(Interval::new(reach, x.lo().min(target.hi())));
        }
        reach = reach.max(x.hi());
        if reach >= target.hi() {
            break;
        }
    }
    if reach < target.hi() {
        gaps.push(Interval::new(reach, target.hi()));
    }
    gaps.retain(|g| !(g.lo() == 0.0 && g.hi() == 0.0) && g.hi() > target.lo() && g.lo() < target.hi());
    gaps
}

/// Runs every cell independently; `charts` supplies the certified chart pair
/// for a cell's parameter range. Results are in schedule order.
pub fn continuation<F>(cells: &[CellSpec], target: Interval, charts: F, p: &TauParams, ctrl: &StepControl) -> ContinuationReport
where
    F: Fn(Interval) -> Result<ChartPair, MelnikovError> + Sync,
{
    let results = cells
        .par_iter()
        .enumerate()
        .map(|(index, &spec)| {
            let computed = charts(spec.eps).and_then(|pair| match spec.mode {
                CellMode::Melnikov => melnikov_bounds(&pair, spec.eps, p, ctrl),
                CellMode::Direct => direct_bounds(&pair, spec.eps, p, ctrl),
            });
            let (bounds, outcome) = match computed {
                Ok(b) => {
                    let outcome = match spec.mode {
                        CellMode::Melnikov => verify_theorem_main(&b.at_tau1, &b.at_tau2, &b.pieces, spec.eps),
                        CellMode::Direct => verify_direct(&b.at_tau1, &b.at_tau2, &b.pieces, spec.eps),
                    };
                    (Some(b), outcome)
                }
                Err(e) => (None, Err(e)),
            };
            CellResult { index, spec, bounds, outcome }
        })
        .collect::<Vec<_>>();
    let ranges: Vec<Interval> = cells.iter().map(|c| c.eps).collect();
    ContinuationReport {
        target,
        gaps: coverage_gaps(&ranges, target),
        cells: results,
    }
}
