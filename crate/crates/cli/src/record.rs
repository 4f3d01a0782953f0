use std::collections::BTreeMap;

use interval_core::Interval;
use jets::{format_hex, parse_hex};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

pub const FORMAT: &str = "transversality-certificate/1";

/// A float stored as a bit-exact hexadecimal literal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hex(pub f64);

impl Serialize for Hex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_hex(self.0))
    }
}

impl<'de> Deserialize<'de> for Hex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_hex(&s).map(Hex).ok_or_else(|| serde::de::Error::custom(format!("not a hexadecimal float: {s}")))
    }
}

/// Interval endpoints `[lo, hi]`.
pub type Endpoints = [Hex; 2];

pub fn endpoints(x: Interval) -> Endpoints {
    [Hex(x.lo()), Hex(x.hi())]
}

pub fn interval_of(e: &Endpoints) -> Option<Interval> {
    (e[0].0 <= e[1].0).then(|| Interval::new(e[0].0, e[1].0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignName {
    Positive,
    Negative,
}

/// One stored inequality. Each kind is re-checked by comparing its stored
/// endpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Clause {
    /// `lhs < rhs`.
    Less { name: String, lhs: Hex, rhs: Hex },
    /// Every point of `enclosure` has `sign`.
    Sign { name: String, sign: SignName, enclosure: Endpoints },
    /// `inner` lies in the interior of `outer`.
    Inside { name: String, inner: Endpoints, outer: Endpoints },
    /// `enclosure` contains zero.
    ContainsZero { name: String, enclosure: Endpoints },
    /// A reported constant; holds when finite.
    Record { name: String, value: Hex },
}

impl Clause {
    pub fn name(&self) -> &str {
        match self {
            Clause::Less { name, .. } | Clause::Sign { name, .. } | Clause::Inside { name, .. } | Clause::ContainsZero { name, .. } | Clause::Record { name, .. } => name,
        }
    }

    pub fn holds(&self) -> bool {
        match self {
            Clause::Less { lhs, rhs, .. } => lhs.0 < rhs.0,
            Clause::Sign { sign, enclosure, .. } => match interval_of(enclosure) {
                Some(x) => match sign {
                    SignName::Positive => x.lo() > 0.0,
                    SignName::Negative => x.hi() < 0.0,
                },
                None => false,
            },
            Clause::Inside { inner, outer, .. } => match (interval_of(inner), interval_of(outer)) {
                (Some(i), Some(o)) => o.lo() < i.lo() && i.hi() < o.hi(),
                _ => false,
            },
            Clause::ContainsZero { enclosure, .. } => interval_of(enclosure).is_some_and(|x| x.contains(0.0)),
            Clause::Record { value, .. } => value.0.is_finite(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NhimStage {
    pub branch: String,
    pub eps: Endpoints,
    pub radius: Hex,
    pub order: usize,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub clauses: Vec<Clause>,
    pub implied_clauses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellRecord {
    pub index: usize,
    pub mode: String,
    pub eps: Endpoints,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign_pattern: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statement: Option<String>,
    pub subdivisions: usize,
    /// The sign conditions.
    pub clauses: Vec<Clause>,
    /// `kappa` brackets and implicit-derivative residuals behind them.
    pub kappa: Vec<Clause>,
    pub implied_clauses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coverage {
    pub target: Endpoints,
    pub gaps: Vec<Endpoints>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verdict {
    pub passed: bool,
    pub statement: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallClock {
    pub total_seconds: f64,
    pub stages: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofCertificate {
    pub format: String,
    pub tool_version: String,
    pub command: String,
    pub config_hash: String,
    pub problem: String,
    pub nhim: Vec<NhimStage>,
    pub cells: Vec<CellRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage: Option<Coverage>,
    pub verdict: Verdict,
    /// SHA-256 of the certificate with this field empty and no wall clock.
    pub digest: String,
    pub wall_clock: WallClock,
}

impl ProofCertificate {
    pub fn compute_digest(&self) -> String {
        let mut c = self.clone();
        c.digest = String::new();
        c.wall_clock = WallClock::default();
        hex::encode(Sha256::digest(serde_json::to_vec(&c).expect("certificate serializes")))
    }

    pub fn seal(mut self) -> Self {
        self.digest = self.compute_digest();
        self
    }

    /// The certificate without timing fields, for comparing runs.
    pub fn without_timing(&self) -> ProofCertificate {
        ProofCertificate {
            wall_clock: WallClock::default(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Outcome of re-checking a stored certificate.
#[derive(Clone, Debug, PartialEq)]
pub enum CheckOutcome {
    Valid,
    /// Stored clauses or flags that do not hold, by location.
    Invalid(Vec<String>),
}

/// Re-validates every stored inequality and the consistency of the
/// pass flags, then the digest.
pub fn check_certificate(c: &ProofCertificate) -> CheckOutcome {
    let mut bad = Vec::new();
    if c.format != FORMAT {
        bad.push(format!("format {:?} is not {FORMAT:?}", c.format));
    }
    for (i, s) in c.nhim.iter().enumerate() {
        if s.passed {
            if s.clauses.is_empty() {
                bad.push(format!("nhim[{i}] ({}): passed without clauses", s.branch));
            }
            for cl in s.clauses.iter().filter(|cl| !cl.holds()) {
                bad.push(format!("nhim[{i}] ({}): clause {:?} fails", s.branch, cl.name()));
            }
        }
    }
    for cell in &c.cells {
        if cell.passed {
            if cell.clauses.is_empty() {
                bad.push(format!("cell {}: passed without clauses", cell.index));
            }
            for cl in cell.clauses.iter().chain(&cell.kappa).filter(|cl| !cl.holds()) {
                bad.push(format!("cell {}: clause {:?} fails", cell.index, cl.name()));
            }
        }
    }
    if c.verdict.passed {
        if c.nhim.is_empty() || c.nhim.iter().any(|s| !s.passed) {
            bad.push("verdict passed with a failed or missing NHIM stage".into());
        }
        if c.cells.iter().any(|s| !s.passed) {
            bad.push("verdict passed with a failed cell".into());
        }
    }
    if let Some(cov) = &c.coverage {
        if cov.gaps.is_empty() != cov.warning.is_none() {
            bad.push("coverage warning does not match the gaps".into());
        }
    }
    if bad.is_empty() && c.digest != c.compute_digest() {
        bad.push("digest does not match the certificate contents".into());
    }
    if bad.is_empty() {
        CheckOutcome::Valid
    } else {
        CheckOutcome::Invalid(bad)
    }
}
