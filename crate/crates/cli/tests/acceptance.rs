//! Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::path::{Path, PathBuf};
use std::time::Instant;

use cli::record::Clause;
use cli::{execute_prove, nhim_certificate, Overrides, ProofCertificate, ProveOutput, Run};
use integrator::{advance, integrate, prepare_step, FlowJet, StepControl};
use interval_core::{Interval, IntervalMatrix, IntervalVector};
use jets::{DagBuilder, ExprDag, Jet2};
use lognorm::{lognorm_upper, ml_lower};
use melnikov::{CellMode, Sign, SignPattern};
use nalgebra::DMatrix;
use num::{BigInt, BigRational, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// tolerances
const L_REF: f64 = 6.278276608e-6;
const M_REF: f64 = 1.1271e-3;
const CONSTANT_FACTOR: f64 = 5.0;
const NHIM_SECONDS: f64 = 120.0;
const MELNIKOV_SECONDS: f64 = 600.0;
const TOTAL_SECONDS: f64 = 1800.0;
const DIRECT_CELLS: usize = 90;
const LINEAR_CASES: usize = 50;
const LOGNORM_CASES: usize = 1000;
const LOGNORM_H: f64 = 0.01;
const LOGNORM_SLACK: f64 = 1e-9;
const ENERGY_BOUND: f64 = 1e-4;
const ENERGY_TIME: f64 = 8.0;
const RESIDUAL_FACTOR: f64 = 10.0;

struct Report {
    lines: Vec<(usize, bool, String)>,
}

impl Report {
    fn add(&mut self, n: usize, ok: bool, detail: String) {
        println!("criterion {n}: {} - {detail}", if ok { "PASS" } else { "FAIL" });
        self.lines.push((n, ok, detail));
    }
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../example-problem/fixtures/example.toml")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, format!("problem = {:?}\n{body}", fixture().display().to_string())).unwrap();
    p
}

const FULL: &str = "
[nhim]
order = 2
ranges = [[0.0, 1e-3], [0.0, 1e-2]]
[tau]
tau1 = 4.6
tau2 = 4.8
subdivisions = 16
window_subdivisions = 2
[schedule]
target = [0.0, 1e-2]
melnikov = [0.0, 1e-3]
direct = [1e-3, 1e-2]
direct_cells = 90
";

const MELNIKOV: &str = "
[tau]
tau1 = 4.6
tau2 = 4.8
subdivisions = 16
[schedule]
target = [0.0, 1e-3]
melnikov = [0.0, 1e-3]
";

fn run(cfg: &Path, threads: usize) -> Run {
    Run::prepare(cfg, Overrides { threads: Some(threads), ..Default::default() }).unwrap()
}

fn record(c: &ProofCertificate, stage: usize, name: &str) -> Option<f64> {
    c.nhim.get(stage)?.clauses.iter().find_map(|cl| match cl {
        Clause::Record { name: n, value } if n == name => Some(value.0),
        _ => None,
    })
}

fn within_factor(x: f64, reference: f64) -> bool {
    x > reference / CONSTANT_FACTOR && x < reference * CONSTANT_FACTOR
}

fn criterion_1(r: &mut Report, cfg: &Path) -> ProofCertificate {
    let t = Instant::now();
    let (c, _) = nhim_certificate(&run(cfg, 1)).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let mut ok = secs <= NHIM_SECONDS && c.nhim.len() >= 2;
    let mut detail = format!("{secs:.1}s");
    for (i, s) in c.nhim.iter().enumerate().take(2) {
        let e = (s.eps[0].0, s.eps[1].0);
        let (l, m) = (record(&c, i, "L").unwrap_or(f64::NAN), record(&c, i, "M").unwrap_or(f64::NAN));
        let rates = s.clauses.iter().filter(|cl| matches!(cl, Clause::Less { name, .. } if name.starts_with("rate condition"))).all(Clause::holds);
        let block = s.clauses.iter().filter(|cl| matches!(cl, Clause::Less { name, .. } if name.starts_with("isolating block"))).count() == 2;
        ok &= e == (0.0, 1e-3) && s.passed && s.order == 2 && rates && block && within_factor(l, L_REF) && within_factor(m, M_REF);
        detail += &format!("; {}: L = {l:.4e} (ref {L_REF:e}), M = {m:.4e} (ref {M_REF:e})", s.branch);
    }
    r.add(1, ok, detail);
    c
}

fn criterion_2(r: &mut Report, cfg: &Path) {
    let t = Instant::now();
    let o = execute_prove(&run(cfg, 1)).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let cell = &o.report.cells[0];
    let detail;
    let ok = match (&cell.outcome, &cell.bounds) {
        (Ok(cert), Some(b)) => {
            let mixed_neg = b.pieces.iter().all(|p| Sign::of(p.d2_tau_eps) == Some(Sign::Negative));
            let mixed = b.pieces.iter().fold(b.pieces[0].d2_tau_eps, |acc, p| acc.hull(&p.d2_tau_eps));
            detail = format!(
                "{secs:.1}s; d_eps(4.6) = [{:.4e}, {:.4e}], d_eps(4.8) = [{:.4e}, {:.4e}], mixed in [{:.4e}, {:.4e}] over {} pieces, pattern {:?}",
                b.at_tau1.d_eps.lo(),
                b.at_tau1.d_eps.hi(),
                b.at_tau2.d_eps.lo(),
                b.at_tau2.d_eps.hi(),
                mixed.lo(),
                mixed.hi(),
                b.pieces.len(),
                cert.sign_pattern
            );
            cert.valid()
                && cert.mode == CellMode::Melnikov
                && cert.sign_pattern == SignPattern::Mirrored
                && Sign::of(b.at_tau1.d_eps) == Some(Sign::Positive)
                && Sign::of(b.at_tau2.d_eps) == Some(Sign::Negative)
                && mixed_neg
                && o.certificate.verdict.passed
                && secs <= MELNIKOV_SECONDS
        }
        (Err(e), _) => {
            detail = format!("{secs:.1}s; {e}");
            false
        }
        _ => {
            detail = "no bounds".into();
            false
        }
    };
    r.add(2, ok, detail);
}

fn criterion_3(r: &mut Report, o: &ProveOutput, secs: f64) {
    let direct: Vec<_> = o.report.cells.iter().filter(|c| c.spec.mode == CellMode::Direct).collect();
    let passed = direct.iter().filter(|c| c.passed()).count();
    let mut ok = direct.len() == DIRECT_CELLS && passed == DIRECT_CELLS && o.report.covered() && o.certificate.verdict.passed && secs <= TOTAL_SECONDS;
    for c in &direct {
        if let Some(b) = &c.bounds {
            let (a, z) = (b.at_tau1.delta.unwrap(), b.at_tau2.delta.unwrap());
            let changes = Sign::of(a).is_some() && Sign::of(z).is_some() && Sign::of(a) != Sign::of(z);
            let monotone = b.pieces.iter().all(|p| p.d_tau.and_then(Sign::of).is_some_and(|s| Some(s) == Sign::of(z)));
            ok &= changes && monotone;
        }
    }
    let first = direct.iter().filter_map(|c| c.outcome.as_ref().err()).next().map(|e| format!("; first failure: {e}")).unwrap_or_default();
    r.add(3, ok, format!("{passed}/{} direct cells over [1e-3, 1e-2] certified, coverage complete: {}, total {secs:.1}s{first}", direct.len(), o.report.covered()));
}

fn linear_field(a: &DMatrix<f64>) -> ExprDag {
    let n = a.nrows();
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let mut b = DagBuilder::new(&names);
    let vars: Vec<_> = (0..n).map(|i| b.var(i)).collect();
    let rows: Vec<_> = (0..n)
        .map(|i| {
            let terms: Vec<_> = (0..n)
                .map(|j| {
                    let c = b.num(a[(i, j)]);
                    b.mul(c, vars[j])
                })
                .collect();
            b.sum(&terms)
        })
        .collect();
    b.finish(&rows)
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

/// `e^A` as a truncated Taylor series in exact rational arithmetic, with a
/// bound on the truncation error of every entry.
fn exact_exponential(a: &DMatrix<f64>) -> (Vec<Vec<BigRational>>, f64) {
    let n = a.nrows();
    let ar: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| rational(a[(i, j)])).collect()).collect();
    let mut term: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect();
    let mut sum = term.clone();
    let terms = 60;
    for k in 1..terms {
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for l in 0..n {
                    s += &term[i][l] * &ar[l][j];
                }
                next[i][j] = s / BigRational::from_integer(BigInt::from(k));
            }
        }
        term = next;
        for i in 0..n {
            for j in 0..n {
                sum[i][j] += &term[i][j];
            }
        }
    }
    // |tail| <= a^N / N! e^a with a = max row sum
    let norm = (0..n).map(|i| (0..n).map(|j| a[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut tail = norm.exp();
    for k in 1..=terms {
        tail *= norm / k as f64;
    }
    (sum, tail)
}

fn encloses(x: Interval, v: &BigRational, tail: f64) -> bool {
    let t = rational(tail);
    rational(x.lo()) <= v - &t && v + &t <= rational(x.hi())
}

fn criterion_4(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut passed = 0;
    let mut worst_width = 0.0f64;
    for _ in 0..LINEAR_CASES {
        let n = rng.gen_range(1..=4);
        let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let fj = integrate(&linear_field(&a), &Jet2::identity(&IntervalVector::from_points(&x0)), 1.0, &StepControl::default()).unwrap();
        let (e, tail) = exact_exponential(&a);
        let xr: Vec<BigRational> = x0.iter().map(|&v| rational(v)).collect();
        let mut ok = true;
        for i in 0..n {
            let mut ex = BigRational::zero();
            for j in 0..n {
                ex += &e[i][j] * &xr[j];
                ok &= encloses(fj.dphi.get(i, j), &e[i][j], tail);
                worst_width = worst_width.max(fj.dphi.get(i, j).width());
            }
            ok &= encloses(fj.state[i], &ex, tail * n as f64);
            worst_width = worst_width.max(fj.state[i].width());
        }
        passed += ok as usize;
    }
    r.add(4, passed == LINEAR_CASES, format!("{passed}/{LINEAR_CASES} linear systems enclose the exact exponential (widest enclosure {worst_width:.2e})"));
}

fn criterion_5(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut norm_ok, mut min_ok, mut dual_ok) = (0, 0, 0);
    for _ in 0..LOGNORM_CASES {
        let n = rng.gen_range(1..=4);
        let data: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let a = IntervalMatrix::from_points(n, n, &data);
        let (l, ml) = (lognorm_upper(&a), ml_lower(&a));
        let e = (DMatrix::from_row_slice(n, n, &data) * LOGNORM_H).exp();
        let s = e.svd(false, false).singular_values;
        norm_ok += (s.max() <= (l * LOGNORM_H).exp() + LOGNORM_SLACK) as usize;
        min_ok += (s.min() >= (ml * LOGNORM_H).exp() - LOGNORM_SLACK) as usize;
        let dual = -lognorm_upper(&a.neg());
        dual_ok += (ml == dual || ml.next_up() == dual || ml.next_down() == dual) as usize;
    }
    let ok = norm_ok == LOGNORM_CASES && min_ok == LOGNORM_CASES && dual_ok == LOGNORM_CASES;
    r.add(5, ok, format!("norm bound {norm_ok}/{LOGNORM_CASES}, minimum bound {min_ok}/{LOGNORM_CASES}, m_l(A) = -l(-A) within 1 ulp {dual_ok}/{LOGNORM_CASES}"));
}

fn energy(x: Interval, y: Interval) -> Interval {
    Interval::point(0.5) * (y.sqr() - x.sqr()) + (x.sqr() * x).div(&Interval::point(3.0)).unwrap()
}

/// Mean-value enclosure of `H = y^2/2 - x^2/2 + x^3/3` over a box.
fn energy_mv(x: Interval, y: Interval) -> Interval {
    let (cx, cy) = (Interval::point(x.mid()), Interval::point(y.mid()));
    energy(cx, cy) + (x.sqr() - x) * (x - cx) + y * (y - cy)
}

fn criterion_6(r: &mut Report) {
    let f = example_problem::example_ambient();
    let ctrl = StepControl::default();
    let mut fj = FlowJet::identity(&IntervalVector::from_points(&[1.5, 0.0, 0.0, 0.0]), 0.0);
    let mut worst = 0.0f64;
    let mut contains = true;
    while fj.time.lo() < ENERGY_TIME {
        let s = prepare_step(&f, &fj, &ctrl, ENERGY_TIME).unwrap();
        let tube = advance(&fj, &s.step, Interval::new(0.0, s.dt.hi()), None).unwrap();
        contains &= energy_mv(tube.state[0], tube.state[3]).contains(0.0);
        fj = advance(&fj, &s.step, s.dt, Some(s.t_next)).unwrap();
        let h = energy_mv(fj.state[0], fj.state[3]);
        contains &= h.contains(0.0);
        worst = worst.max(h.mag());
    }
    r.add(
        6,
        contains && worst <= ENERGY_BOUND,
        format!("|H| <= {worst:.3e} at every step on [0, {ENERGY_TIME}] from the apex (3/2, 0) at eps = 0, step tubes contain H = 0: {contains}"),
    );
}

fn criterion_7(r: &mut Report, o: &ProveOutput) {
    let (mut count, mut bad) = (0, 0);
    let mut worst_ratio = 0.0f64;
    for c in &o.report.cells {
        let Some(b) = &c.bounds else { continue };
        for d in b.all() {
            for t in [&d.unstable, &d.stable] {
                count += 1;
                let w: f64 = t.residuals.iter().map(Interval::width).sum();
                let ratio = w / t.residual_input_width;
                worst_ratio = worst_ratio.max(ratio);
                if !(t.residuals.iter().all(|x| x.contains(0.0)) && w <= RESIDUAL_FACTOR * t.residual_input_width) {
                    bad += 1;
                }
            }
        }
    }
    r.add(7, count > 0 && bad == 0, format!("{} of {count} residual triples contain 0 within {RESIDUAL_FACTOR}x input width (worst ratio {worst_ratio:.3})", count - bad));
}

fn criterion_8(r: &mut Report, nhim1: &ProofCertificate, full1: &ProveOutput, mel_cfg: &Path, full_cfg: &Path) {
    let (nhim8, _) = nhim_certificate(&run(full_cfg, 8)).unwrap();
    let mel1 = execute_prove(&run(mel_cfg, 1)).unwrap();
    let mel8 = execute_prove(&run(mel_cfg, 8)).unwrap();
    let full8 = execute_prove(&run(full_cfg, 8)).unwrap();
    let same = |a: &ProofCertificate, b: &ProofCertificate| a.without_timing().to_json() == b.without_timing().to_json();
    let checks = [
        ("NHIM", same(nhim1, &nhim8)),
        ("Melnikov", same(&mel1.certificate, &mel8.certificate)),
        ("continuation", same(&full1.certificate, &full8.certificate)),
    ];
    let detail: Vec<String> = checks.iter().map(|(n, s)| format!("{n} {}", if *s { "identical" } else { "differs" })).collect();
    r.add(8, checks.iter().all(|c| c.1), format!("1 vs 8 threads: {}", detail.join(", ")));
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let full_cfg = write_config(dir.path(), "full.toml", FULL);
    let mel_cfg = write_config(dir.path(), "melnikov.toml", MELNIKOV);
    let mut r = Report { lines: Vec::new() };

    let nhim = criterion_1(&mut r, &full_cfg);
    criterion_2(&mut r, &mel_cfg);
    let t = Instant::now();
    let full = execute_prove(&run(&full_cfg, 1)).unwrap();
    criterion_3(&mut r, &full, t.elapsed().as_secs_f64());
    criterion_4(&mut r);
    criterion_5(&mut r);
    criterion_6(&mut r);
    criterion_7(&mut r, &full);
    criterion_8(&mut r, &nhim, &full, &mel_cfg, &full_cfg);

    let failed: Vec<usize> = r.lines.iter().filter(|l| !l.1).map(|l| l.0).collect();
    if failed.is_empty() {
        println!("acceptance: all 8 criteria pass");
    } else {
        println!("acceptance: criteria failed: {failed:?}");
        std::process::exit(1);
    }
}
