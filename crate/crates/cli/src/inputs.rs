//! Systems, grids and boundary data as given on the command line or in a scenario.

use crate::error::{CliError, CliResult};
use psg_core::elliptic::{CoefficientTensor, EllipticSystem};
use psg_core::fields::{read_field, BoundaryField, FieldPreset, GridSpec};
use psg_core::linalg::CMat;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

/// A preset string such as `lame:1:1:3`, an inline tensor, or a tensor file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemSpec {
    Preset(String),
    Tensor { tensor: serde_json::Value },
    File { tensor_file: PathBuf },
}

impl SystemSpec {
    pub fn resolve(&self) -> CliResult<EllipticSystem> {
        let system = match self {
            Self::Preset(s) => {
                EllipticSystem::from_preset(s, 2).map_err(|e| CliError::invalid("system", e.to_string()))?
            }
            Self::Tensor { tensor } => EllipticSystem::new(
                CoefficientTensor::from_json(tensor).map_err(|e| CliError::invalid("system.tensor", e.to_string()))?,
            )?,
            Self::File { tensor_file } => {
                let file = File::open(tensor_file).map_err(|e| CliError::io(tensor_file.display().to_string(), e))?;
                let value: serde_json::Value = serde_json::from_reader(BufReader::new(file))
                    .map_err(|e| CliError::invalid("system.tensor_file", e.to_string()))?;
                EllipticSystem::new(
                    CoefficientTensor::from_json(&value)
                        .map_err(|e| CliError::invalid("system.tensor_file", e.to_string()))?,
                )?
            }
        };
        if !(2..=3).contains(&system.n()) {
            return Err(CliError::invalid("system", format!("n = {} is outside {{2, 3}}", system.n())));
        }
        Ok(system)
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Preset(s) => s.clone(),
            Self::Tensor { .. } => "inline tensor".into(),
            Self::File { tensor_file } => tensor_file.display().to_string(),
        }
    }
}

/// One component of boundary data, or a field file holding all components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSource {
    Gaussian { sigma: f64 },
    WindowedCos { xi: f64, width: f64 },
    Cauchy { t0: f64 },
    Bump { r: f64 },
    File(PathBuf),
}

impl FieldSource {
    pub(crate) fn preset(&self) -> Option<FieldPreset> {
        Some(match *self {
            Self::Gaussian { sigma } => FieldPreset::Gaussian { sigma },
            Self::WindowedCos { xi, width } => FieldPreset::WindowedCos { xi, width },
            Self::Cauchy { t0 } => FieldPreset::Cauchy { t0 },
            Self::Bump { r } => FieldPreset::Bump { r },
            Self::File(_) => return None,
        })
    }

    /// `gaussian:<sigma>`, `windowed_cos:<xi>:<width>`, `cauchy:<t0>`, `bump:<r>`, or a path.
    pub fn parse(s: &str) -> CliResult<Self> {
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default();
        let nums: Vec<f64> = match head {
            "gaussian" | "windowed_cos" | "cauchy" | "bump" => parts
                .map(|p| p.parse::<f64>().map_err(|_| CliError::invalid("field", format!("bad number `{p}` in `{s}`"))))
                .collect::<CliResult<_>>()?,
            _ => return Ok(Self::File(PathBuf::from(s))),
        };
        match (head, nums.as_slice()) {
            ("gaussian", [sigma]) => Ok(Self::Gaussian { sigma: *sigma }),
            ("windowed_cos", [xi, width]) => Ok(Self::WindowedCos { xi: *xi, width: *width }),
            ("cauchy", [t0]) => Ok(Self::Cauchy { t0: *t0 }),
            ("bump", [r]) => Ok(Self::Bump { r: *r }),
            _ => Err(CliError::invalid("field", format!("wrong number of parameters in `{s}`"))),
        }
    }

    pub fn is_file(&self) -> bool {
        matches!(self, Self::File(_))
    }
}

/// Boundary data with `m` components on `grid`: one source per component, or
/// a single source used for every component.
pub fn load_field(sources: &[FieldSource], grid: GridSpec, m: usize) -> CliResult<BoundaryField> {
    if let [FieldSource::File(path)] = sources {
        let file = File::open(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
        let field = read_field(BufReader::new(file))?;
        if *field.grid() != grid || field.m() != m {
            return Err(CliError::invalid(
                "field",
                format!(
                    "{} holds {} components on {:?}; expected {m} on {grid:?}",
                    path.display(),
                    field.m(),
                    field.grid()
                ),
            ));
        }
        return Ok(field);
    }
    if sources.len() != 1 && sources.len() != m {
        return Err(CliError::invalid("field", format!("{} sources for {m} components", sources.len())));
    }
    let components = (0..m)
        .map(|k| {
            let source = &sources[k.min(sources.len() - 1)];
            let preset =
                source.preset().ok_or_else(|| CliError::invalid("field", "a field file must be the only source"))?;
            Ok(preset.sample(grid, 1, 0)?)
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(BoundaryField::from_components(components)?)
}

/// `R,N` on the boundary of `R^n_+`.
pub fn parse_grid(s: &str, n: usize) -> CliResult<GridSpec> {
    let parts: Vec<&str> = s.split(',').collect();
    let [r, points] = parts.as_slice() else {
        return Err(CliError::invalid("grid", format!("expected `R,N`, got `{s}`")));
    };
    let r: f64 = r.trim().parse().map_err(|_| CliError::invalid("grid", format!("bad half width `{r}`")))?;
    let points: usize =
        points.trim().parse().map_err(|_| CliError::invalid("grid", format!("bad point count `{points}`")))?;
    GridSpec::new(n - 1, r, points).map_err(|e| CliError::invalid("grid", e.to_string()))
}

pub fn parse_list(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| CliError::invalid(what, format!("bad number `{p}`"))))
        .collect()
}

/// Row-major `[[[re, im], ...], ...]`.
pub fn matrix_json(m: &CMat) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> =
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    serde_json::json!(rows)
}

pub fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))
}
