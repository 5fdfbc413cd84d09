//! Scenario files: a system, a grid, boundary data and an ordered task list.

use crate::error::{CliError, CliResult};
use crate::explain::CHECKS;
use crate::inputs::{load_field, FieldSource, SystemSpec};
use psg_core::elliptic::EllipticSystem;
use psg_core::fields::{BoundaryField, FieldPreset, GridSpec};
use psg_core::generator::{has_conjugate_route, has_spectral_route, GeneratorRoute};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "schema_version")]
    pub version: u32,
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub system: SystemSpec,
    /// Shared grid for tasks that sample boundary data; a task may override it.
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default = "default_field")]
    pub field: Vec<FieldSource>,
    #[serde(default)]
    pub tasks: Vec<Task>,
    /// Overrides keyed by check name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_field() -> Vec<FieldSource> {
    vec![FieldSource::Gaussian { sigma: 1.0 }]
}

/// Route names as written in scenarios and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteName {
    Pv,
    Spectral,
    Quotient,
    #[serde(alias = "conjugate_pv")]
    Conjugate,
}

impl RouteName {
    pub const ALL: [RouteName; 4] = [Self::Pv, Self::Spectral, Self::Quotient, Self::Conjugate];

    pub fn route(self) -> GeneratorRoute {
        match self {
            Self::Pv => GeneratorRoute::Pv,
            Self::Spectral => GeneratorRoute::Spectral,
            Self::Quotient => GeneratorRoute::Quotient,
            Self::Conjugate => GeneratorRoute::ConjugatePv,
        }
    }

    pub fn available(self, system: &EllipticSystem) -> bool {
        match self {
            Self::Spectral => has_spectral_route(system),
            Self::Conjugate => has_conjugate_route(system),
            Self::Pv | Self::Quotient => true,
        }
    }
}

fn all_routes() -> Vec<RouteName> {
    RouteName::ALL.to_vec()
}

fn first_power() -> Vec<u32> {
    vec![1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    KernelVerify {},
    Solve {
        t: Vec<f64>,
        #[serde(default)]
        grid: Option<GridSpec>,
    },
    Dtn {
        #[serde(default = "all_routes")]
        routes: Vec<RouteName>,
        #[serde(default = "first_power")]
        powers: Vec<u32>,
        /// Quotient and trace ladder; defaults to `{32h, 16h, 8h, 4h}`.
        #[serde(default)]
        ladder: Option<Vec<f64>>,
        #[serde(default)]
        grid: Option<GridSpec>,
    },
    SemigroupCheck {
        t1: f64,
        t2: f64,
        #[serde(default)]
        grid: Option<GridSpec>,
    },
    ConormalAudit {},
    SymbolAudit {},
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Self::KernelVerify {} => "kernel_verify",
            Self::Solve { .. } => "solve",
            Self::Dtn { .. } => "dtn",
            Self::SemigroupCheck { .. } => "semigroup_check",
            Self::ConormalAudit {} => "conormal_audit",
            Self::SymbolAudit {} => "symbol_audit",
        }
    }

    fn grid_override(&self) -> Option<GridSpec> {
        match self {
            Self::Solve { grid, .. } | Self::Dtn { grid, .. } | Self::SemigroupCheck { grid, .. } => *grid,
            _ => None,
        }
    }

    fn needs_grid(&self) -> bool {
        matches!(self, Self::Solve { .. } | Self::Dtn { .. } | Self::SemigroupCheck { .. })
    }
}

/// A scenario whose system resolves and whose tasks passed every precondition.
#[derive(Debug, Clone)]
pub struct Validated {
    pub scenario: Scenario,
    pub system: EllipticSystem,
}

impl Validated {
    /// The grid a task runs on.
    pub fn grid_for(&self, task: &Task) -> Option<GridSpec> {
        task.grid_override().or(self.scenario.grid)
    }

    pub fn field_on(&self, grid: GridSpec) -> CliResult<BoundaryField> {
        load_field(&self.scenario.field, grid, self.system.m())
    }

    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.scenario.tolerances.get(check).copied().unwrap_or(default)
    }
}

impl Scenario {
    /// Strict JSON parse; errors carry the line and column.
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Every precondition that can be checked without running a task.
    pub fn validate(self) -> CliResult<Validated> {
        if self.version != SCHEMA_VERSION {
            return Err(CliError::invalid("version", format!("unsupported version {}", self.version)));
        }
        let system = self.system.resolve()?;
        let n = system.n();
        let m = system.m();
        if self.field.is_empty() {
            return Err(CliError::invalid("field", "at least one source is required"));
        }
        let file_field = self.field.iter().any(FieldSource::is_file);
        for source in &self.field {
            validate_source(source)?;
        }
        for (key, value) in &self.tolerances {
            if !CHECKS.iter().any(|c| c.name == key) {
                return Err(CliError::UnknownCheck(
                    key.clone(),
                    CHECKS.iter().map(|c| c.name).collect::<Vec<_>>().join(", "),
                ));
            }
            if !(value.is_finite() && *value > 0.0) {
                return Err(CliError::invalid(format!("tolerances.{key}"), "must be positive and finite"));
            }
        }
        if let Some(grid) = &self.grid {
            check_grid(grid, n, "grid")?;
        }
        for (i, task) in self.tasks.iter().enumerate() {
            let field = |name: &str| format!("tasks[{i}].{}.{name}", task.name());
            if let Some(grid) = task.grid_override() {
                check_grid(&grid, n, &field("grid"))?;
                if file_field {
                    return Err(CliError::invalid(field("grid"), "a field file fixes the grid; remove the override"));
                }
            }
            let grid = match (task.needs_grid(), task.grid_override().or(self.grid)) {
                (true, None) => return Err(CliError::invalid(field("grid"), "no grid given for this task")),
                (_, g) => g,
            };
            let min_t = grid.map(|g| 4.0 * g.h()).unwrap_or(0.0);
            let check_time = |name: &str, t: f64| -> CliResult<()> {
                if !(t.is_finite() && t > 0.0) {
                    return Err(CliError::invalid(field(name), format!("time {t} must be positive")));
                }
                if t < min_t {
                    return Err(CliError::invalid(field(name), format!("time {t} is below 4h = {min_t}")));
                }
                Ok(())
            };
            match task {
                Task::Solve { t, .. } => {
                    if t.is_empty() {
                        return Err(CliError::invalid(field("t"), "empty time list"));
                    }
                    t.iter().try_for_each(|&t| check_time("t", t))?;
                }
                Task::SemigroupCheck { t1, t2, .. } => {
                    check_time("t1", *t1)?;
                    check_time("t2", *t2)?;
                }
                Task::Dtn { routes, powers, ladder, .. } => {
                    if routes.is_empty() {
                        return Err(CliError::invalid(field("routes"), "empty route list"));
                    }
                    if let Some(r) = routes.iter().find(|r| !r.available(&system)) {
                        return Err(CliError::invalid(
                            field("routes"),
                            format!("route {r:?} is not available for {}", self.system.describe()),
                        ));
                    }
                    if let Some(k) = powers.iter().find(|k| !(1..=4).contains(*k)) {
                        return Err(CliError::invalid(field("powers"), format!("power {k} outside 1..=4")));
                    }
                    if let Some(ladder) = ladder {
                        validate_ladder(ladder, min_t).map_err(|msg| CliError::invalid(field("ladder"), msg))?;
                    }
                }
                Task::KernelVerify {} | Task::ConormalAudit {} | Task::SymbolAudit {} => {}
            }
            if let Some(grid) = grid {
                if task.needs_grid() && !file_field {
                    load_field(&self.field, grid, m)?;
                }
            }
        }
        if file_field {
            match self.grid {
                Some(grid) => {
                    load_field(&self.field, grid, m)?;
                }
                None => return Err(CliError::invalid("grid", "a field file needs the scenario grid")),
            }
        }
        Ok(Validated { scenario: self, system })
    }
}

fn check_grid(grid: &GridSpec, n: usize, field: &str) -> CliResult<()> {
    grid.validate().map_err(|e| CliError::invalid(field, e.to_string()))?;
    if grid.d != n - 1 {
        return Err(CliError::invalid(field, format!("d = {} but the system has n = {n}", grid.d)));
    }
    Ok(())
}

fn validate_source(source: &FieldSource) -> CliResult<()> {
    let Some(preset) = source.preset() else { return Ok(()) };
    let params_ok = match preset {
        FieldPreset::Gaussian { sigma } => sigma > 0.0,
        FieldPreset::WindowedCos { width, xi } => width > 0.0 && xi.is_finite(),
        FieldPreset::Cauchy { t0 } => t0 > 0.0,
        FieldPreset::Bump { r } => r > 0.0,
    };
    if params_ok {
        Ok(())
    } else {
        Err(CliError::invalid("field", format!("bad parameters in {source:?}")))
    }
}

fn validate_ladder(ladder: &[f64], min_t: f64) -> Result<(), String> {
    if ladder.len() < 2 {
        return Err("needs at least two rungs".into());
    }
    if ladder.windows(2).any(|w| !(w[1] > 0.0 && w[1] < w[0])) {
        return Err(format!("{ladder:?} is not strictly decreasing and positive"));
    }
    let smallest = ladder[ladder.len() - 1];
    if smallest < min_t {
        return Err(format!("smallest rung {smallest} is below 4h = {min_t}"));
    }
    Ok(())
}

/// Scenarios compiled into the binary.
pub fn preset(name: &str) -> CliResult<Scenario> {
    let grid = |r: f64, n: usize| GridSpec { d: 1, half_width: r, points: n };
    match name {
        "laplacian-n2-quickstart" => Ok(Scenario {
            version: SCHEMA_VERSION,
            name: name.into(),
            seed: 0,
            system: SystemSpec::Preset("laplacian:2".into()),
            grid: Some(grid(12.8, 1024)),
            field: default_field(),
            tasks: vec![
                Task::KernelVerify {},
                Task::SemigroupCheck { t1: 1.0, t2: 1.0, grid: Some(grid(512.0, 8192)) },
                Task::Dtn { routes: all_routes(), powers: vec![1, 2], ladder: None, grid: None },
                Task::ConormalAudit {},
                Task::SymbolAudit {},
            ],
            tolerances: BTreeMap::new(),
            output_dir: None,
        }),
        _ => Err(CliError::UnknownPreset(name.into(), PRESETS.join(", "))),
    }
}

pub const PRESETS: &[&str] = &["laplacian-n2-quickstart"];

#[cfg(test)]
mod tests {
    use super::*;

    fn base(tasks: &str) -> String {
        format!(
            r#"{{"name": "t", "system": "laplacian:2", "grid": {{"d": 1, "R": 12.8, "N": 1024}}, "tasks": {tasks}}}"#
        )
    }

    #[test]
    fn quickstart_is_valid_and_roundtrips() {
        let s = preset("laplacian-n2-quickstart").unwrap();
        assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s);
        s.validate().unwrap();
        assert!(matches!(preset("nope"), Err(CliError::UnknownPreset(..))));
    }

    #[test]
    fn unknown_keys_report_position() {
        let text = "{\n  \"name\": \"t\",\n  \"system\": \"laplacian\",\n  \"gird\": 1\n}";
        match Scenario::from_json(text) {
            Err(CliError::Config { line, message, .. }) => {
                assert_eq!(line, 4);
                assert!(message.contains("gird"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_times_fail_validation() {
        let s = Scenario::from_json(&base(r#"[{"solve": {"t": [0.05]}}]"#)).unwrap();
        assert!(matches!(s.validate(), Err(CliError::Invalid { .. })));
        let s = Scenario::from_json(&base(r#"[{"solve": {"t": [0.5, 1.0]}}]"#)).unwrap();
        s.validate().unwrap();
    }

    #[test]
    fn unavailable_routes_and_powers_fail_validation() {
        let scalar = r#"{"name": "t", "system": "scalar:1,0.3,0.3,2", "grid": {"d": 1, "R": 12.8, "N": 1024},
            "tasks": [{"dtn": {"routes": ["spectral"]}}]}"#;
        assert!(Scenario::from_json(scalar).unwrap().validate().is_err());
        let s = Scenario::from_json(&base(r#"[{"dtn": {"powers": [5]}}]"#)).unwrap();
        assert!(s.validate().is_err());
        let s = Scenario::from_json(&base(r#"[{"dtn": {"ladder": [0.4, 0.2, 0.05]}}]"#)).unwrap();
        assert!(s.validate().is_err());
    }

    #[test]
    fn tolerance_keys_must_name_checks() {
        let mut s = Scenario::from_json(&base("[]")).unwrap();
        s.tolerances.insert("semigroup".into(), 1e-4);
        s.clone().validate().unwrap();
        s.tolerances.insert("semigroop".into(), 1e-4);
        assert!(matches!(s.validate(), Err(CliError::UnknownCheck(..))));
    }

    #[test]
    fn grid_dimension_must_match_system() {
        let text = r#"{"name": "t", "system": "laplacian:3", "grid": {"d": 1, "R": 8, "N": 256}}"#;
        assert!(Scenario::from_json(text).unwrap().validate().is_err());
    }
}
