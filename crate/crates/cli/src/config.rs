use std::path::{Path, PathBuf};

use integrator::StepControl;
use interval_core::Interval;
use melnikov::{CellMode, CellSpec, TauParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// A run configuration, read from TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Problem fixture; relative paths are resolved against the config file.
    pub problem: PathBuf,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    #[serde(default = "default_threads")]
    pub threads: usize,
    /// Fiber coordinate `r` of the manifold charts; defaults to the
    /// fixture's radius.
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub nhim: NhimConfig,
    pub tau: TauConfig,
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub plot: Option<PlotConfig>,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_threads() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NhimConfig {
    /// Order `k` of the rate conditions.
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default = "default_l_max")]
    pub l_max: f64,
    /// Cells along the unstable fiber coordinate; defaults to the fixture's.
    #[serde(default)]
    pub subdivisions: Option<usize>,
    /// Parameter ranges to certify; each cell uses the first one covering it.
    /// Empty means the fixture's range.
    #[serde(default)]
    pub ranges: Vec<[f64; 2]>,
}

fn default_order() -> usize {
    2
}

fn default_l_max() -> f64 {
    0.5
}

impl Default for NhimConfig {
    fn default() -> Self {
        NhimConfig {
            order: default_order(),
            l_max: default_l_max(),
            subdivisions: None,
            ranges: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauConfig {
    pub tau1: f64,
    pub tau2: f64,
    #[serde(default = "default_subdivisions")]
    pub subdivisions: usize,
    /// Window of the direct cells; defaults to `[tau1, tau2]`.
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    #[serde(default = "default_window_subdivisions")]
    pub window_subdivisions: usize,
}

fn default_subdivisions() -> usize {
    16
}

fn default_window_subdivisions() -> usize {
    2
}

impl TauConfig {
    pub fn params(&self) -> TauParams {
        TauParams {
            tau1: self.tau1,
            tau2: self.tau2,
            subdivisions: self.subdivisions,
            window: self.window.unwrap_or([self.tau1, self.tau2]),
            window_subdivisions: self.window_subdivisions,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Melnikov,
    Direct,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellConfig {
    pub eps: [f64; 2],
    pub mode: ModeName,
}

/// Either an explicit cell list or one Melnikov cell plus equal direct
/// cells; `target` is the range the proof is meant to cover.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub target: [f64; 2],
    #[serde(default)]
    pub melnikov: Option<[f64; 2]>,
    #[serde(default)]
    pub direct: Option<[f64; 2]>,
    #[serde(default)]
    pub direct_cells: usize,
    #[serde(default)]
    pub cells: Vec<CellConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    #[serde(default = "default_taylor_order")]
    pub order: usize,
    #[serde(default = "default_h_min")]
    pub h_min: f64,
    #[serde(default = "default_h_max")]
    pub h_max: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Longest flight time searched for a section crossing.
    #[serde(default = "default_t_max")]
    pub t_max: f64,
}

fn default_taylor_order() -> usize {
    StepControl::default().order
}
fn default_h_min() -> f64 {
    StepControl::default().h_min
}
fn default_h_max() -> f64 {
    StepControl::default().h_max
}
fn default_tolerance() -> f64 {
    StepControl::default().tolerance
}
fn default_t_max() -> f64 {
    20.0
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            order: default_taylor_order(),
            h_min: default_h_min(),
            h_max: default_h_max(),
            tolerance: default_tolerance(),
            t_max: default_t_max(),
        }
    }
}

impl IntegratorConfig {
    pub fn control(&self) -> StepControl {
        StepControl {
            order: self.order,
            h_min: self.h_min,
            h_max: self.h_max,
            tolerance: self.tolerance,
        }
    }
}

/// Bounds over a `tau` grid for plotting, independent of the proof.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotConfig {
    pub tau: [f64; 2],
    pub points: usize,
    pub eps: Vec<[f64; 2]>,
}

fn interval(what: &str, v: [f64; 2]) -> Result<Interval, CliError> {
    if v[0].is_finite() && v[1].is_finite() && v[0] <= v[1] {
        Ok(Interval::new(v[0], v[1]))
    } else {
        Err(CliError::Config(format!("{what}: [{}, {}] is not an interval", v[0], v[1])))
    }
}

impl ScheduleConfig {
    pub fn target(&self) -> Result<Interval, CliError> {
        interval("schedule.target", self.target)
    }

    /// The cells in increasing order of the parameter.
    pub fn cells(&self) -> Result<Vec<CellSpec>, CliError> {
        let mut cells = Vec::new();
        if let Some(m) = self.melnikov {
            cells.push(CellSpec {
                eps: interval("schedule.melnikov", m)?,
                mode: CellMode::Melnikov,
            });
        }
        if let Some(d) = self.direct {
            let d = interval("schedule.direct", d)?;
            if self.direct_cells == 0 {
                return Err(CliError::Config("schedule.direct needs direct_cells > 0".into()));
            }
            let w = d.width() / self.direct_cells as f64;
            let n = self.direct_cells;
            let edge = |i: usize| if i == n { d.hi() } else { d.lo() + i as f64 * w };
            cells.extend((0..n).map(|i| CellSpec {
                eps: Interval::new(edge(i), edge(i + 1)),
                mode: CellMode::Direct,
            }));
        }
        for (i, c) in self.cells.iter().enumerate() {
            cells.push(CellSpec {
                eps: interval(&format!("schedule.cells[{i}]"), c.eps)?,
                mode: match c.mode {
                    ModeName::Melnikov => CellMode::Melnikov,
                    ModeName::Direct => CellMode::Direct,
                },
            });
        }
        if cells.is_empty() {
            return Err(CliError::Config("schedule has no cells".into()));
        }
        cells.sort_by(|a, b| a.eps.lo().total_cmp(&b.eps.lo()));
        for w in cells.windows(2) {
            if w[1].eps.lo() < w[0].eps.hi() {
                return Err(CliError::Config(format!("schedule cells {:?} and {:?} overlap", w[0].eps, w[1].eps)));
            }
            if w[1].eps.lo() > w[0].eps.hi() {
                return Err(CliError::Config(format!("schedule is not connected between {} and {}", w[0].eps.hi(), w[1].eps.lo())));
            }
        }
        for c in &cells {
            match c.mode {
                CellMode::Melnikov if !c.eps.contains(0.0) => return Err(CliError::Config(format!("Melnikov cell {:?} must contain 0", c.eps))),
                CellMode::Direct if c.eps.contains(0.0) => return Err(CliError::Config(format!("direct cell {:?} must exclude 0", c.eps))),
                _ => {}
            }
        }
        Ok(cells)
    }
}

/// A configuration together with its source text and location.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub text: String,
    pub path: PathBuf,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let config: RunConfig = toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if config.threads == 0 {
            return Err(CliError::Config("threads must be positive".into()));
        }
        config.schedule.cells()?;
        config.schedule.target()?;
        for (i, r) in config.nhim.ranges.iter().enumerate() {
            interval(&format!("nhim.ranges[{i}]"), *r)?;
        }
        config.integrator.control().validate().map_err(|e| CliError::Config(e.to_string()))?;
        config.tau.params().validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(LoadedConfig {
            config,
            text,
            path: path.to_path_buf(),
        })
    }

    pub fn problem_path(&self) -> PathBuf {
        let p = &self.config.problem;
        if p.is_absolute() {
            p.clone()
        } else {
            self.path.parent().unwrap_or(Path::new(".")).join(p)
        }
    }
}

/// SHA-256 over the configuration and the fixture text.
pub fn config_hash(config_text: &str, fixture_text: &str) -> String {
    let mut h = Sha256::new();
    h.update(config_text.as_bytes());
    h.update([0u8]);
    h.update(fixture_text.as_bytes());
    hex::encode(h.finalize())
}
