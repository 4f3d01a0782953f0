use interval_core::Interval;

use crate::delta::DeltaBounds;
use crate::MelnikovError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    /// The sign of every point of `x`, if it has one.
    pub fn of(x: Interval) -> Option<Sign> {
        if x.lo() > 0.0 {
            Some(Sign::Positive)
        } else if x.hi() < 0.0 {
            Some(Sign::Negative)
        } else {
            None
        }
    }

    pub fn holds(&self, x: Interval) -> bool {
        Sign::of(x) == Some(*self)
    }

    pub fn flipped(&self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Sign::Positive => "> 0",
            Sign::Negative => "< 0",
        }
    }
}

/// One verified inequality: `quantity` over `eps x tau` has `sign`, with the
/// enclosure that shows it.
#[derive(Clone, Debug, PartialEq)]
pub struct Clause {
    pub name: String,
    pub sign: Sign,
    pub enclosure: Interval,
    pub eps: Interval,
    pub tau: Interval,
}

impl Clause {
    pub fn holds(&self) -> bool {
        self.sign.holds(self.enclosure)
    }
}

/// Which orientation of the sign conditions holds. For the Melnikov mode the
/// reference pattern is `d_eps(tau1) < 0 < d_eps(tau2)` with a positive mixed
/// derivative; for the direct mode it is a decreasing `tau -> delta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SignPattern {
    Reference,
    Mirrored,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellMode {
    Melnikov,
    Direct,
}

/// Transversal intersection of the manifolds for every parameter in
/// `eps_range` (except zero) at a unique `tau*` in `(tau1, tau2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransversalityCertificate {
    pub mode: CellMode,
    pub eps_range: Interval,
    pub tau1: f64,
    pub tau2: f64,
    pub sign_pattern: SignPattern,
    pub clauses: Vec<Clause>,
    pub implied_clauses: Vec<String>,
    /// Number of `tau`-subintervals used for the derivative clause.
    pub subdivisions: usize,
}

impl TransversalityCertificate {
    pub fn valid(&self) -> bool {
        !self.clauses.is_empty() && self.clauses.iter().all(Clause::holds)
    }

    pub fn statement(&self) -> String {
        format!(
            "for every eps in [{:e}, {:e}] \\ {{0}} the unstable and stable manifolds intersect transversally at a unique tau* in ({}, {})",
            self.eps_range.lo(),
            self.eps_range.hi(),
            self.tau1,
            self.tau2
        )
    }
}

fn clause(name: String, x: Interval, expected: Sign, b: &DeltaBounds) -> Result<Clause, MelnikovError> {
    match Sign::of(x) {
        None => Err(MelnikovError::SignIndefinite { clause: format!("{name}: {x:?}") }),
        Some(s) if s != expected => Err(MelnikovError::PatternMismatch { clause: format!("{name}: {x:?} expected {}", expected.symbol()) }),
        Some(_) => Ok(Clause {
            name,
            sign: expected,
            enclosure: x,
            eps: b.eps,
            tau: b.tau,
        }),
    }
}

/// Checks that the `tau`-intervals of `pieces` cover `[lo, hi]` without gaps.
fn covers(pieces: &[&DeltaBounds], lo: f64, hi: f64) -> bool {
    let mut reach = lo;
    for p in pieces {
        if p.tau.lo() > reach {
            return false;
        }
        reach = reach.max(p.tau.hi());
    }
    reach >= hi
}

fn sorted_by_tau(v: &[DeltaBounds]) -> Vec<&DeltaBounds> {
    let mut s: Vec<&DeltaBounds> = v.iter().collect();
    s.sort_by(|a, b| a.tau.lo().total_cmp(&b.tau.lo()));
    s
}

fn check_eps(b: &DeltaBounds, eps: Interval, what: &str) -> Result<(), MelnikovError> {
    if eps.subset(&b.eps) {
        Ok(())
    } else {
        Err(MelnikovError::Coverage(format!("{what} computed over eps {:?}, not covering {eps:?}", b.eps)))
    }
}

/// The sign conditions near zero parameter: `d_eps` sign-definite with
/// opposite signs at `tau1` and `tau2`, and the mixed derivative
/// sign-definite on `[tau1, tau2]` with the sign of `d_eps(tau2)`.
pub fn verify_theorem_main(at_tau1: &DeltaBounds, at_tau2: &DeltaBounds, mixed: &[DeltaBounds], eps: Interval) -> Result<TransversalityCertificate, MelnikovError> {
    if !eps.contains(0.0) {
        return Err(MelnikovError::Precondition(format!("eps range {eps:?} must contain 0")));
    }
    let (t1, t2) = (at_tau1.tau.mid(), at_tau2.tau.mid());
    if !(at_tau1.tau.is_point() && at_tau2.tau.is_point() && t1 < t2) {
        return Err(MelnikovError::Precondition("tau1 < tau2 must be points".into()));
    }
    check_eps(at_tau1, eps, "d_eps at tau1")?;
    check_eps(at_tau2, eps, "d_eps at tau2")?;
    let pieces = sorted_by_tau(mixed);
    for p in &pieces {
        check_eps(p, eps, "mixed derivative")?;
    }
    if !covers(&pieces, t1, t2) {
        return Err(MelnikovError::Coverage(format!("mixed-derivative intervals do not cover [{t1}, {t2}]")));
    }
    let first = Sign::of(at_tau1.d_eps).ok_or_else(|| MelnikovError::SignIndefinite { clause: format!("d_eps at tau1 = {t1}: {:?}", at_tau1.d_eps) })?;
    let pattern = if first == Sign::Negative { SignPattern::Reference } else { SignPattern::Mirrored };
    let mut clauses = vec![
        clause(format!("d_eps delta at tau1 = {t1}"), at_tau1.d_eps, first, at_tau1)?,
        clause(format!("d_eps delta at tau2 = {t2}"), at_tau2.d_eps, first.flipped(), at_tau2)?,
    ];
    for p in &pieces {
        clauses.push(clause(
            format!("d2_tau_eps delta on [{}, {}]", p.tau.lo(), p.tau.hi()),
            p.d2_tau_eps,
            first.flipped(),
            p,
        )?);
    }
    Ok(TransversalityCertificate {
        mode: CellMode::Melnikov,
        eps_range: eps,
        tau1: t1,
        tau2: t2,
        sign_pattern: pattern,
        clauses,
        implied_clauses: vec![
            "delta(0, tau) = 0 for all tau: the manifolds coincide at eps = 0".into(),
            "delta(eps, tau1) and delta(eps, tau2) have opposite signs for eps != 0: mean value in eps".into(),
            "d_tau delta(eps, .) is sign-definite on [tau1, tau2] for eps != 0: mean value of the mixed derivative".into(),
        ],
        subdivisions: pieces.len(),
    })
}

/// Direct check on a band away from zero: `delta` has opposite signs at the
/// window ends and `d_tau delta` is sign-definite on the window.
pub fn verify_direct(at_lo: &DeltaBounds, at_hi: &DeltaBounds, slopes: &[DeltaBounds], band: Interval) -> Result<TransversalityCertificate, MelnikovError> {
    if band.contains(0.0) {
        return Err(MelnikovError::Precondition(format!("band {band:?} must exclude 0")));
    }
    let (a, b) = (at_lo.tau.mid(), at_hi.tau.mid());
    if !(at_lo.tau.is_point() && at_hi.tau.is_point() && a < b) {
        return Err(MelnikovError::Precondition("window ends must be points with lo < hi".into()));
    }
    check_eps(at_lo, band, "delta at the window start")?;
    check_eps(at_hi, band, "delta at the window end")?;
    let pieces = sorted_by_tau(slopes);
    for p in &pieces {
        check_eps(p, band, "d_tau delta")?;
    }
    if !covers(&pieces, a, b) {
        return Err(MelnikovError::Coverage(format!("d_tau intervals do not cover [{a}, {b}]")));
    }
    let missing = |what: &str| MelnikovError::Precondition(format!("{what} not computed"));
    let dl = at_lo.delta.ok_or_else(|| missing("delta at the window start"))?;
    let dh = at_hi.delta.ok_or_else(|| missing("delta at the window end"))?;
    let sl = Sign::of(dl).ok_or_else(|| MelnikovError::SignIndefinite { clause: format!("delta at tau = {a}: {dl:?}") })?;
    let sh = Sign::of(dh).ok_or_else(|| MelnikovError::SignIndefinite { clause: format!("delta at tau = {b}: {dh:?}") })?;
    if sl == sh {
        return Err(MelnikovError::SignIndefinite { clause: format!("delta does not change sign on [{a}, {b}]: {dl:?}, {dh:?}") });
    }
    let pattern = if sl == Sign::Positive { SignPattern::Reference } else { SignPattern::Mirrored };
    let mut clauses = vec![clause(format!("delta at tau = {a}"), dl, sl, at_lo)?, clause(format!("delta at tau = {b}"), dh, sh, at_hi)?];
    for p in &pieces {
        let d = p.d_tau.ok_or_else(|| missing("d_tau delta"))?;
        clauses.push(clause(format!("d_tau delta on [{}, {}]", p.tau.lo(), p.tau.hi()), d, sh, p)?);
    }
    Ok(TransversalityCertificate {
        mode: CellMode::Direct,
        eps_range: band,
        tau1: a,
        tau2: b,
        sign_pattern: pattern,
        clauses,
        implied_clauses: vec!["unique zero of delta(eps, .) in the window: sign change plus strict monotonicity".into()],
        subdivisions: pieces.len(),
    })
}
