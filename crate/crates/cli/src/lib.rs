//! Batch proof runner: loads a problem fixture and a run configuration,
//! verifies the NHIM, runs the Melnikov and direct cells, and writes a
//! re-checkable certificate plus CSV bounds for plotting.

pub mod config;
pub mod pipeline;
pub mod record;

use std::path::Path;

use thiserror::Error;

pub use config::{config_hash, LoadedConfig, RunConfig};
pub use pipeline::{nhim_certificate, prove, Overrides, PlotRow, ProveOutput, Run};
pub use record::{check_certificate, CheckOutcome, Clause, ProofCertificate};

/// Exit status for a completed run whose verification failed.
pub const EXIT_FAILED: i32 = 1;
/// Exit status for unreadable or malformed inputs.
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("problem: {0}")]
    Problem(String),
    #[error("certificate schema: {0}")]
    Schema(String),
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_INPUT
    }
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

/// The full proof on the run's thread pool, without writing files.
pub fn execute_prove(run: &Run) -> Result<ProveOutput, CliError> {
    pool(run.threads())?.install(|| prove(run))
}

/// Runs the NHIM stage; writes `nhim-certificate.json` and returns the exit
/// status.
pub fn cmd_verify_nhim(config: &Path, overrides: Overrides) -> Result<i32, CliError> {
    let run = Run::prepare(config, overrides)?;
    let out = run.out_dir();
    prepare_out(&out)?;
    let (cert, _) = pool(run.threads())?.install(|| nhim_certificate(&run))?;
    pipeline::write_certificate(&out.join("nhim-certificate.json"), &cert)?;
    for s in &cert.nhim {
        let get = |n: &str| {
            s.clauses.iter().find_map(|c| match c {
                Clause::Record { name, value } if name == n => Some(value.0),
                _ => None,
            })
        };
        let status = if s.passed { "PASS" } else { "FAIL" };
        match (get("L"), get("M")) {
            (Some(l), Some(m)) => println!("branch {} eps [{:e}, {:e}]: {status} L = {l:e} M = {m:e}", s.branch, s.eps[0].0, s.eps[1].0),
            _ => println!("branch {} eps [{:e}, {:e}]: {status}", s.branch, s.eps[0].0, s.eps[1].0),
        }
        if let Some(e) = &s.error {
            println!("{}", serde_json::json!({ "failed_clause": e, "stage": "nhim", "branch": s.branch }));
        }
    }
    Ok(if cert.verdict.passed { 0 } else { EXIT_FAILED })
}

/// Runs the full proof; writes `certificate.json`, `bounds.csv` and, when a
/// plot grid is configured, `scan.csv`.
pub fn cmd_prove(config: &Path, overrides: Overrides) -> Result<i32, CliError> {
    let run = Run::prepare(config, overrides)?;
    let out = run.out_dir();
    prepare_out(&out)?;
    let o = execute_prove(&run)?;
    pipeline::write_certificate(&out.join("certificate.json"), &o.certificate)?;
    pipeline::write_csv(&out.join("bounds.csv"), &o.rows)?;
    if run.loaded.config.plot.is_some() {
        pipeline::write_csv(&out.join("scan.csv"), &o.scan)?;
    }
    let c = &o.certificate;
    let passed = c.cells.iter().filter(|r| r.passed).count();
    println!("cells: {passed}/{} passed", c.cells.len());
    for r in c.cells.iter().filter(|r| !r.passed) {
        println!("{}", serde_json::json!({ "failed_cell": r.index, "eps": [r.eps[0].0, r.eps[1].0], "error": r.error }));
    }
    if let Some(w) = c.coverage.as_ref().and_then(|c| c.warning.as_ref()) {
        println!("warning: {w}");
    }
    println!("{}", c.verdict.statement);
    Ok(if c.verdict.passed { 0 } else { EXIT_FAILED })
}

pub fn load_certificate(path: &Path) -> Result<ProofCertificate, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

/// Re-checks a stored certificate by comparisons alone.
pub fn cmd_check_certificate(path: &Path) -> Result<i32, CliError> {
    let c = load_certificate(path)?;
    match check_certificate(&c) {
        CheckOutcome::Valid => {
            let n: usize = c.nhim.iter().map(|s| s.clauses.len()).sum::<usize>() + c.cells.iter().map(|r| r.clauses.len() + r.kappa.len()).sum::<usize>();
            println!("valid: {n} clauses hold; verdict {}", if c.verdict.passed { "pass" } else { "fail" });
            Ok(0)
        }
        CheckOutcome::Invalid(v) => {
            for m in v {
                println!("invalid: {m}");
            }
            Ok(EXIT_FAILED)
        }
    }
}
