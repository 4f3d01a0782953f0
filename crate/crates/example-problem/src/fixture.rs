use std::path::Path;

use interval_core::{Interval, IntervalMatrix, Matrix};
use jets::{format_dag, parse_dag, ExprDag};
use poincare::Section;
use serde::{Deserialize, Serialize};

use crate::problem::{build_example, BranchSpec, DomainTemplate, ProblemSpec, Published};
use crate::symmetry::Involution;
use crate::ExampleError;

/// Location of the shipped example fixture, relative to the workspace root.
pub const FIXTURE_PATH: &str = "crates/example-problem/fixtures/example.toml";

#[derive(Serialize, Deserialize)]
struct ProblemFile {
    name: String,
    variables: Vec<String>,
    local_variables: Vec<String>,
    seed_order: usize,
    ambient: Vec<String>,
    unstable: BranchFile,
    stable: BranchFile,
    domain: DomainTemplate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    symmetry: Option<Involution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    published: Option<Published>,
}

#[derive(Serialize, Deserialize)]
struct BranchFile {
    /// Integrate the negated ambient field.
    reversed: bool,
    section_coord: usize,
    section_level: f64,
    /// Sign of the section coordinate's velocity at the crossing.
    section_direction: i8,
    linear: Vec<Vec<f64>>,
    psi: Vec<String>,
    psi_inv: Vec<String>,
    local_field: Vec<String>,
}

fn malformed(msg: impl Into<String>) -> ExampleError {
    ExampleError::Malformed(msg.into())
}

fn branch_file(b: &BranchSpec) -> BranchFile {
    BranchFile {
        reversed: b.reversed,
        section_coord: b.section.coord,
        section_level: b.section.level,
        section_direction: b.section.direction,
        linear: (0..b.linear.rows()).map(|i| (0..b.linear.cols()).map(|j| b.linear.get(i, j)).collect()).collect(),
        psi: format_dag(&b.psi),
        psi_inv: format_dag(&b.psi_inv),
        local_field: format_dag(&b.local_field),
    }
}

fn dag(what: &str, vars: &[String], exprs: &[String], outputs: usize) -> Result<ExprDag, ExampleError> {
    let d = parse_dag(vars, exprs).map_err(|e| malformed(format!("{what}: {e}")))?;
    if d.output_count() != outputs {
        return Err(malformed(format!("{what}: expected {outputs} components, found {}", d.output_count())));
    }
    Ok(d)
}

fn branch_spec(name: &str, f: &BranchFile, ambient: &ExprDag, vars: &[String], local: &[String]) -> Result<BranchSpec, ExampleError> {
    let n = vars.len();
    if f.linear.len() != n || f.linear.iter().any(|r| r.len() != n) {
        return Err(malformed(format!("{name}.linear must be {n}x{n}")));
    }
    let linear = Matrix::from_rows(&f.linear);
    if IntervalMatrix::from_matrix(&linear).inverse().is_err() {
        return Err(malformed(format!("{name}.linear is not invertible")));
    }
    if f.section_direction != 1 && f.section_direction != -1 {
        return Err(malformed(format!("{name}.section_direction must be 1 or -1")));
    }
    if f.section_coord >= n || !f.section_level.is_finite() {
        return Err(malformed(format!("{name}: bad section")));
    }
    Ok(BranchSpec {
        linear,
        psi: dag(&format!("{name}.psi"), local, &f.psi, n)?,
        psi_inv: dag(&format!("{name}.psi_inv"), local, &f.psi_inv, n)?,
        local_field: dag(&format!("{name}.local_field"), local, &f.local_field, n)?,
        flow_field: if f.reversed { ambient.negated() } else { ambient.clone() },
        reversed: f.reversed,
        section: Section::new(f.section_coord, f.section_level, f.section_direction),
    })
}

/// Serializes a problem to fixture text.
pub fn write_problem(p: &ProblemSpec) -> String {
    let file = ProblemFile {
        name: p.name.clone(),
        variables: p.ambient.var_names().to_vec(),
        local_variables: p.unstable.local_field.var_names().to_vec(),
        seed_order: p.seed_order,
        ambient: format_dag(&p.ambient),
        unstable: branch_file(&p.unstable),
        stable: branch_file(&p.stable),
        domain: p.template.clone(),
        symmetry: p.symmetry.clone(),
        published: p.published.clone(),
    };
    toml::to_string(&file).expect("problem serializes")
}

/// Parses fixture text into a problem, validating shapes.
pub fn parse_problem(text: &str) -> Result<ProblemSpec, ExampleError> {
    let f: ProblemFile = toml::from_str(text).map_err(|e| malformed(e.to_string()))?;
    let n = f.variables.len();
    if n == 0 || f.local_variables.len() != n {
        return Err(malformed("variables and local_variables must have equal, nonzero length"));
    }
    let ambient = dag("ambient", &f.variables, &f.ambient, n)?;
    let unstable = branch_spec("unstable", &f.unstable, &ambient, &f.variables, &f.local_variables)?;
    let stable = branch_spec("stable", &f.stable, &ambient, &f.variables, &f.local_variables)?;
    let d = &f.domain;
    if !(d.eps[0] <= d.eps[1]) || !(d.radius > 0.0) || !(d.slope > 0.0) || !(d.chart_radius > 0.0) {
        return Err(malformed("domain: eps must be ordered and radius, slope, chart_radius positive"));
    }
    if d.partition.len() != n || d.partition.contains(&0) {
        return Err(malformed(format!("domain.partition must have {n} positive entries")));
    }
    let coords = [d.fiber, d.eps_coord, d.time_coord, d.normal];
    if coords.iter().any(|&c| c >= n) {
        return Err(malformed("domain coordinate index out of range"));
    }
    if let Some(s) = &f.symmetry {
        if s.signs.len() != n || s.signs.iter().any(|v| v.abs() != 1.0) {
            return Err(malformed("symmetry signs must be +-1, one per variable"));
        }
    }
    Ok(ProblemSpec {
        name: f.name,
        ambient,
        unstable,
        stable,
        template: f.domain,
        symmetry: f.symmetry,
        seed_order: f.seed_order,
        published: f.published,
    })
}

/// Reads and parses a fixture file.
pub fn load_problem(path: &Path) -> Result<ProblemSpec, ExampleError> {
    let text = std::fs::read_to_string(path).map_err(|e| ExampleError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_problem(&text)
}

/// Fixture text of the reference problem over `E = [0, 1e-3]`, `r = 2e-4`.
pub fn example_fixture() -> String {
    write_problem(&build_example(Interval::new(0.0, 1e-3), 2e-4).expect("reference problem builds"))
}
