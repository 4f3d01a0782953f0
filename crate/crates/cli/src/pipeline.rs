use std::time::Instant;

use example_problem::{load_problem, BranchSpec, ExampleError, ProblemSpec};
use interval_core::Interval;
use melnikov::{
    continuation, delta_bounds, manifold_local_chart, Branch, BranchGeometry, BranchTerms, CellMode, CellResult, ChartPair, ContinuationReport, DeltaBounds, LocalLayout, MelnikovError, Sign, SignPattern,
};
use nhim_verifier::{check_isolating_block, rate_inequalities, verify_nhim, BlockCheck, NhimOptions, NhimReport, RateCheck, IMPLIED_CLAUSES};
use serde::Serialize;

use crate::config::{config_hash, LoadedConfig};
use crate::record::{endpoints, CellRecord, Clause, Coverage, Hex, NhimStage, ProofCertificate, SignName, Verdict, WallClock, FORMAT};
use crate::CliError;

/// Coordinate measuring the gap between the manifold traces on the section.
pub const GAP_COORD: usize = 0;

/// Command-line overrides of the configuration.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<std::path::PathBuf>,
    pub threads: Option<usize>,
    pub subdivisions: Option<usize>,
    pub order: Option<usize>,
}

/// Everything a run needs, resolved from the configuration and overrides.
pub struct Run {
    pub loaded: LoadedConfig,
    pub problem: ProblemSpec,
    pub fixture_text: String,
    pub overrides: Overrides,
}

impl Run {
    pub fn prepare(config: &std::path::Path, overrides: Overrides) -> Result<Run, CliError> {
        let loaded = LoadedConfig::load(config)?;
        let path = loaded.problem_path();
        let problem = load_problem(&path).map_err(|e| match e {
            ExampleError::Io { .. } => CliError::Io(e.to_string()),
            other => CliError::Problem(format!("{}: {other}", path.display())),
        })?;
        let fixture_text = std::fs::read_to_string(&path).map_err(|e| CliError::Io(e.to_string()))?;
        if let Some(t) = overrides.threads {
            if t == 0 {
                return Err(CliError::Config("--threads must be positive".into()));
            }
        }
        if overrides.subdivisions == Some(0) {
            return Err(CliError::Config("--subdivisions must be positive".into()));
        }
        if overrides.order == Some(0) {
            return Err(CliError::Config("--order must be positive".into()));
        }
        Ok(Run {
            loaded,
            problem,
            fixture_text,
            overrides,
        })
    }

    pub fn threads(&self) -> usize {
        self.overrides.threads.unwrap_or(self.loaded.config.threads)
    }

    pub fn out_dir(&self) -> std::path::PathBuf {
        self.overrides.out.clone().unwrap_or_else(|| self.loaded.config.out_dir.clone())
    }

    pub fn order(&self) -> usize {
        self.overrides.order.unwrap_or(self.loaded.config.nhim.order)
    }

    pub fn radius(&self) -> f64 {
        self.loaded.config.radius.unwrap_or(self.problem.template.radius)
    }

    pub fn nhim_ranges(&self) -> Vec<Interval> {
        let r = &self.loaded.config.nhim.ranges;
        if r.is_empty() {
            vec![self.problem.template.eps_range()]
        } else {
            r.iter().map(|v| Interval::new(v[0], v[1])).collect()
        }
    }

    pub fn config_hash(&self) -> String {
        config_hash(&self.loaded.text, &self.fixture_text)
    }

    fn template(&self, eps: Interval) -> nhim_verifier::DomainSpec {
        let t = &self.problem.template;
        let mut partition = t.partition.clone();
        if let Some(n) = self.overrides.subdivisions.or(self.loaded.config.nhim.subdivisions) {
            partition[t.fiber] = n;
        }
        let mut t = t.with_eps(eps).with_partition(partition);
        t.radius = self.radius();
        t.domain()
    }

    pub fn geometry(&self, b: &BranchSpec) -> Result<BranchGeometry, CliError> {
        let t = &self.problem.template;
        let layout = LocalLayout {
            fiber: t.fiber,
            eps: t.eps_coord,
            time: t.time_coord,
            normal: t.normal,
        };
        BranchGeometry::new(b.linear.clone(), b.psi.clone(), b.local_field.clone(), b.chart_map(), b.flow_field.clone(), b.section, layout, self.loaded.config.integrator.t_max)
            .map_err(|e| CliError::Problem(e.to_string()))
    }
}

/// NHIM verification of one branch over one parameter range.
pub struct NhimOutcome {
    pub branch: Branch,
    pub eps: Interval,
    pub report: Option<NhimReport>,
    pub stage: NhimStage,
}

fn less(name: impl Into<String>, lhs: f64, rhs: f64) -> Clause {
    Clause::Less {
        name: name.into(),
        lhs: Hex(lhs),
        rhs: Hex(rhs),
    }
}

fn record(name: impl Into<String>, value: f64) -> Clause {
    Clause::Record { name: name.into(), value: Hex(value) }
}

fn nhim_clauses(rep: &NhimReport) -> Vec<Clause> {
    let mut c: Vec<Clause> = rep.rates.as_pairs().iter().map(|(n, v)| record(*n, *v)).collect();
    c.extend(rate_inequalities(&rep.rates, rep.order).into_iter().map(|(n, l, r)| less(format!("rate condition {n}"), l, r)));
    match rep.isolating {
        BlockCheck::Pass { unstable_min, stable_max, .. } => {
            c.push(less("isolating block: 0 < (f_x | x) on the unstable boundary", 0.0, unstable_min));
            c.push(less("isolating block: (f_y | y) < 0 on the stable boundary", stable_max, 0.0));
        }
        BlockCheck::Fail { .. } => {}
    }
    let s = &rep.slope;
    c.push(less(format!("graph slope {:e}: mu1 < xi", s.m), s.rates.mu1, s.rates.xi));
    let sd = &rep.second;
    c.push(less("second derivatives: mu2 < 2 xi", sd.mu2, (2.0 * sd.xi).next_down()));
    c.push(record("L", rep.first_deriv_bound()));
    c.push(record("M", sd.m_bound));
    c.push(record("2M", rep.second_deriv_bound()));
    c
}

fn first_failure(rep: &NhimReport) -> Option<String> {
    if let BlockCheck::Fail { face, product, .. } = &rep.isolating {
        return Some(format!("isolating block fails on the {} face of coordinate {} (sign {}): product {product:?}", if face.unstable { "unstable" } else { "stable" }, face.var, face.sign));
    }
    if let RateCheck::Fail(v) = &rep.rate_check {
        if let Some(v) = v.first() {
            return Some(format!("rate condition {v}"));
        }
    }
    (!rep.slope.passed).then(|| format!("graph slope {:e}: mu1 < xi fails", rep.slope.m))
}

pub fn verify_branch(run: &Run, branch: Branch, eps: Interval) -> Result<NhimOutcome, CliError> {
    let b = run.problem.branch(branch == Branch::Stable);
    let d = run.template(eps);
    let opts = NhimOptions {
        order: run.order(),
        l_max: run.loaded.config.nhim.l_max,
    };
    let mut stage = NhimStage {
        branch: branch.label().into(),
        eps: endpoints(eps),
        radius: Hex(d.radius),
        order: opts.order,
        passed: false,
        error: None,
        clauses: Vec::new(),
        implied_clauses: IMPLIED_CLAUSES.iter().map(|s| s.to_string()).collect(),
    };
    match verify_nhim(&b.local_field, &d, opts) {
        Ok(rep) => {
            stage.passed = rep.passed();
            stage.error = first_failure(&rep);
            stage.clauses = nhim_clauses(&rep);
            Ok(NhimOutcome { branch, eps, report: Some(rep), stage })
        }
        Err(e) => {
            // report the isolating block on the initial domain when no slope
            // can be certified
            let block = check_isolating_block(&b.local_field, &d).map_err(|e| CliError::Problem(e.to_string()))?;
            stage.error = Some(match block {
                BlockCheck::Fail { face, product, .. } => format!(
                    "isolating block fails on the {} face of coordinate {} (sign {}): product {product:?}; {e}",
                    if face.unstable { "unstable" } else { "stable" },
                    face.var,
                    face.sign
                ),
                BlockCheck::Pass { .. } => e.to_string(),
            });
            Ok(NhimOutcome { branch, eps, report: None, stage })
        }
    }
}

pub fn verify_all(run: &Run) -> Result<Vec<NhimOutcome>, CliError> {
    let mut v = Vec::new();
    for eps in run.nhim_ranges() {
        for b in [Branch::Unstable, Branch::Stable] {
            v.push(verify_branch(run, b, eps)?);
        }
    }
    Ok(v)
}

/// Certified chart pairs for parameter ranges, from the first NHIM range
/// covering each.
pub struct ChartSource {
    unstable: BranchGeometry,
    stable: BranchGeometry,
    radius: f64,
    reports: Vec<(Interval, Option<NhimReport>, Option<NhimReport>)>,
}

impl ChartSource {
    pub fn new(run: &Run, outcomes: &[NhimOutcome]) -> Result<Self, CliError> {
        let mut reports: Vec<(Interval, Option<NhimReport>, Option<NhimReport>)> = Vec::new();
        for o in outcomes {
            let i = match reports.iter().position(|r| r.0 == o.eps) {
                Some(i) => i,
                None => {
                    reports.push((o.eps, None, None));
                    reports.len() - 1
                }
            };
            match o.branch {
                Branch::Unstable => reports[i].1 = o.report.clone(),
                Branch::Stable => reports[i].2 = o.report.clone(),
            }
        }
        Ok(ChartSource {
            unstable: run.geometry(&run.problem.unstable)?,
            stable: run.geometry(&run.problem.stable)?,
            radius: run.radius(),
            reports,
        })
    }

    pub fn pair(&self, eps: Interval) -> Result<ChartPair, MelnikovError> {
        let (_, ru, rs) = self
            .reports
            .iter()
            .find(|(r, _, _)| eps.subset(r))
            .ok_or_else(|| MelnikovError::CertificateMissing(format!("no NHIM range covers eps in {eps:?}")))?;
        let u = manifold_local_chart(Branch::Unstable, &self.unstable, ru.as_ref(), eps, self.radius)?;
        let s = manifold_local_chart(Branch::Stable, &self.stable, rs.as_ref(), eps, self.radius)?;
        Ok(ChartPair::new(u, s, GAP_COORD))
    }
}

fn sign_name(s: Sign) -> SignName {
    match s {
        Sign::Positive => SignName::Positive,
        Sign::Negative => SignName::Negative,
    }
}

fn kappa_clauses(b: &DeltaBounds, t: &BranchTerms, out: &mut Vec<Clause>) {
    let at = format!("{} at tau [{}, {}]", t.branch.label(), b.tau.lo(), b.tau.hi());
    out.push(Clause::Inside {
        name: format!("kappa^{at} inside its bracket"),
        inner: endpoints(t.kappa),
        outer: endpoints(t.bracket),
    });
    out.push(Clause::Sign {
        name: format!("d kappa^{at} / d tau"),
        sign: SignName::Positive,
        enclosure: endpoints(t.kappa_derivatives.d_tau),
    });
    for (k, r) in ["d/deps", "d/dtau", "d2/deps dtau"].iter().zip(t.residuals) {
        out.push(Clause::ContainsZero {
            name: format!("implicit relation {k} for kappa^{at}"),
            enclosure: endpoints(r),
        });
    }
}

pub fn mode_name(m: CellMode) -> &'static str {
    match m {
        CellMode::Melnikov => "melnikov",
        CellMode::Direct => "direct",
    }
}

pub fn cell_record(c: &CellResult) -> CellRecord {
    let mut kappa = Vec::new();
    if let Some(b) = &c.bounds {
        for d in b.all() {
            kappa_clauses(d, &d.unstable, &mut kappa);
            kappa_clauses(d, &d.stable, &mut kappa);
        }
    }
    let (passed, error, pattern, statement, subdivisions, clauses, implied) = match &c.outcome {
        Ok(cert) => (
            cert.valid(),
            None,
            Some(match cert.sign_pattern {
                SignPattern::Reference => "reference",
                SignPattern::Mirrored => "mirrored",
            }),
            Some(cert.statement()),
            cert.subdivisions,
            cert.clauses
                .iter()
                .map(|cl| Clause::Sign {
                    name: cl.name.clone(),
                    sign: sign_name(cl.sign),
                    enclosure: endpoints(cl.enclosure),
                })
                .collect(),
            cert.implied_clauses.clone(),
        ),
        Err(e) => (false, Some(e.to_string()), None, None, 0, Vec::new(), Vec::new()),
    };
    CellRecord {
        index: c.index,
        mode: mode_name(c.spec.mode).into(),
        eps: endpoints(c.spec.eps),
        passed,
        error,
        sign_pattern: pattern.map(String::from),
        statement,
        subdivisions,
        clauses,
        kappa,
        implied_clauses: implied,
    }
}

/// One CSV row: an enclosure of `quantity` over `tau x eps`.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct PlotRow {
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub quantity: String,
    pub lower: f64,
    pub upper: f64,
    pub branch: String,
    pub eps_lo: f64,
    pub eps_hi: f64,
}

pub fn plot_rows(b: &DeltaBounds, out: &mut Vec<PlotRow>) {
    let mut push = |q: &str, x: Interval, branch: &str| {
        out.push(PlotRow {
            tau_lo: b.tau.lo(),
            tau_hi: b.tau.hi(),
            quantity: q.into(),
            lower: x.lo(),
            upper: x.hi(),
            branch: branch.into(),
            eps_lo: b.eps.lo(),
            eps_hi: b.eps.hi(),
        })
    };
    push("d_eps", b.d_eps, "delta");
    push("d2_tau_eps", b.d2_tau_eps, "delta");
    if let Some(d) = b.delta {
        push("delta", d, "delta");
    }
    if let Some(d) = b.d_tau {
        push("d_tau", d, "delta");
    }
    for t in [&b.unstable, &b.stable] {
        let l = t.branch.label();
        push("gap_coordinate", t.value, l);
        push("d_eps", t.d_eps, l);
        push("d2_tau_eps", t.d2_tau_eps, l);
        push("d_tau", t.d_tau, l);
        push("kappa", t.kappa, l);
    }
}

pub fn write_csv(path: &std::path::Path, rows: &[PlotRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_certificate(path: &std::path::Path, c: &ProofCertificate) -> Result<(), CliError> {
    std::fs::write(path, c.to_json()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn base_certificate(run: &Run, command: &str, nhim: Vec<NhimStage>) -> ProofCertificate {
    ProofCertificate {
        format: FORMAT.into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        config_hash: run.config_hash(),
        problem: run.problem.name.clone(),
        nhim,
        cells: Vec::new(),
        coverage: None,
        verdict: Verdict {
            passed: false,
            statement: String::new(),
        },
        digest: String::new(),
        wall_clock: WallClock::default(),
    }
}

/// The NHIM stage alone.
pub fn nhim_certificate(run: &Run) -> Result<(ProofCertificate, Vec<NhimOutcome>), CliError> {
    let start = Instant::now();
    let outcomes = verify_all(run)?;
    let mut c = base_certificate(run, "verify-nhim", outcomes.iter().map(|o| o.stage.clone()).collect());
    c.verdict.passed = outcomes.iter().all(|o| o.stage.passed);
    c.verdict.statement = if c.verdict.passed {
        format!("normally hyperbolic invariant manifold with certified slope and curvature bounds for both branches over {} parameter range(s)", run.nhim_ranges().len())
    } else {
        "NHIM verification failed".into()
    };
    c = c.seal();
    let t = start.elapsed().as_secs_f64();
    c.wall_clock.total_seconds = t;
    c.wall_clock.stages.insert("nhim".into(), t);
    Ok((c, outcomes))
}

/// Outputs of a full proof run.
pub struct ProveOutput {
    pub certificate: ProofCertificate,
    pub report: ContinuationReport,
    pub rows: Vec<PlotRow>,
    pub scan: Vec<PlotRow>,
}

pub fn prove(run: &Run) -> Result<ProveOutput, CliError> {
    let start = Instant::now();
    let (nhim_cert, outcomes) = nhim_certificate(run)?;
    let t_nhim = start.elapsed().as_secs_f64();
    let cfg = &run.loaded.config;
    let cells = cfg.schedule.cells()?;
    let target = cfg.schedule.target()?;
    let params = cfg.tau.params();
    let ctrl = cfg.integrator.control();
    let source = ChartSource::new(run, &outcomes)?;
    let report = continuation(&cells, target, |e| source.pair(e), &params, &ctrl);
    let t_cells = start.elapsed().as_secs_f64() - t_nhim;

    let mut rows = Vec::new();
    for c in &report.cells {
        if let Some(b) = &c.bounds {
            for d in b.all() {
                plot_rows(d, &mut rows);
            }
        }
    }
    let mut scan = Vec::new();
    if let Some(p) = &cfg.plot {
        use rayon::prelude::*;
        let taus = Interval::new(p.tau[0], p.tau[1]).split(p.points.max(1));
        for e in &p.eps {
            let eps = Interval::new(e[0], e[1]);
            let pair = source.pair(eps).map_err(|e| CliError::Problem(e.to_string()))?;
            let computed: Vec<Result<DeltaBounds, MelnikovError>> = taus.par_iter().map(|&t| delta_bounds(&pair, eps, t, &ctrl, !eps.contains(0.0))).collect();
            for (t, b) in taus.iter().zip(computed) {
                match b {
                    Ok(b) => plot_rows(&b, &mut scan),
                    Err(e) => eprintln!("plot scan at eps {eps:?}, tau {t:?}: {e}"),
                }
            }
        }
    }
    let t_plot = start.elapsed().as_secs_f64() - t_nhim - t_cells;

    let mut c = base_certificate(run, "prove", nhim_cert.nhim.clone());
    c.cells = report.cells.iter().map(cell_record).collect();
    let covered = report.covered();
    c.coverage = Some(Coverage {
        target: endpoints(target),
        gaps: report.gaps.iter().map(|g| endpoints(*g)).collect(),
        warning: (!covered).then(|| {
            let gaps: Vec<String> = report.gaps.iter().map(|g| format!("[{:e}, {:e}]", g.lo(), g.hi())).collect();
            format!("schedule does not cover the target; uncovered: {}", gaps.join(", "))
        }),
    });
    c.verdict.passed = nhim_cert.verdict.passed && c.cells.iter().all(|r| r.passed);
    let lo = cells.first().map(|c| c.eps.lo()).unwrap_or(0.0);
    let hi = cells.last().map(|c| c.eps.hi()).unwrap_or(0.0);
    c.verdict.statement = if c.verdict.passed {
        format!("the unstable and stable manifolds intersect transversally for every eps in [{lo:e}, {hi:e}] \\ {{0}}")
    } else {
        let failed: Vec<String> = report.failures().iter().map(|(i, e, _)| format!("{i} [{:e}, {:e}]", e.lo(), e.hi())).collect();
        if failed.is_empty() {
            "NHIM verification failed".into()
        } else {
            format!("cells failed: {}", failed.join(", "))
        }
    };
    c = c.seal();
    c.wall_clock.total_seconds = start.elapsed().as_secs_f64();
    c.wall_clock.stages.insert("nhim".into(), t_nhim);
    c.wall_clock.stages.insert("cells".into(), t_cells);
    c.wall_clock.stages.insert("plot".into(), t_plot);
    Ok(ProveOutput { certificate: c, report, rows, scan })
}
