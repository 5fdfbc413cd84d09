//! Sampled boundary fields on square grids in `R^d`, `d = n - 1 in {1, 2}`.

mod convolve;
mod gradient;
mod io;
mod ntmax;
mod pv;
mod spectral;

pub use convolve::{convolve, convolve_with, ConvolutionRoute};
pub use gradient::{gradient, GradientRoute};
pub use io::{read_field, write_field, FieldHeader};
pub use ntmax::{nt_max_sampled, ConeSpec};
pub use pv::{pv_apply, PvKernel};
pub use spectral::{fourier_multiplier, frequencies, riesz, spectral_tail_fraction, ALIASING_GATE};

use crate::error::{Error, Result};
use crate::linalg::{c, CMat, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `points^d` nodes `x_i = -R + i h`, `h = 2R / points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub d: usize,
    #[serde(rename = "R")]
    pub half_width: f64,
    #[serde(rename = "N")]
    pub points: usize,
}

impl GridSpec {
    pub fn new(d: usize, half_width: f64, points: usize) -> Result<Self> {
        let g = Self { d, half_width, points };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.d) {
            return Err(Error::BadGrid(format!("d = {} (expected 1 or 2)", self.d)));
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(Error::BadGrid(format!("R = {}", self.half_width)));
        }
        if self.points < 64 || !self.points.is_power_of_two() {
            return Err(Error::BadGrid(format!("N = {} (expected a power of two >= 64)", self.points)));
        }
        if self.h() > 0.25 {
            return Err(Error::BadGrid(format!("h = {} exceeds 0.25", self.h())));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h()
    }

    /// Per-axis indices of a flat (row-major) index.
    pub fn multi_index(&self, idx: usize) -> Vec<usize> {
        match self.d {
            1 => vec![idx],
            _ => vec![idx / self.points, idx % self.points],
        }
    }

    pub fn node(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx).into_iter().map(|i| self.coord(i)).collect()
    }

    pub fn nodes(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|i| self.node(i))
    }

    pub fn on_outer_layer(&self, idx: usize) -> bool {
        self.multi_index(idx).iter().any(|&i| i == 0 || i == self.points - 1)
    }

    /// Nodes with `|x| <= fraction * R`.
    pub fn interior_mask(&self, fraction: f64) -> Vec<bool> {
        let lim = fraction * self.half_width;
        self.nodes().map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt() <= lim + 1e-12).collect()
    }

    /// Same node indices with every coordinate multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.d, self.half_width * factor, self.points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayClass {
    Compact,
    SchwartzLike,
    /// Output of a spectral operation; makes no decay claim.
    Periodic,
}

/// `M` complex components per node, stored component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryField {
    grid: GridSpec,
    m: usize,
    values: Vec<C64>,
    decay: DecayClass,
}

impl BoundaryField {
    pub fn new(grid: GridSpec, m: usize, values: Vec<C64>, decay: DecayClass) -> Result<Self> {
        if values.len() != m * grid.len() {
            return Err(Error::Shape(format!("{} values for {m} components on {} nodes", values.len(), grid.len())));
        }
        if let Some(v) = values.iter().find(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Shape(format!("non-finite value {v}")));
        }
        let f = Self { grid, m, values, decay };
        if decay == DecayClass::Compact {
            let edge = f.outer_layer_max();
            if edge != 0.0 {
                return Err(Error::BoundaryLeak(edge));
            }
        }
        Ok(f)
    }

    pub fn zeros(grid: GridSpec, m: usize, decay: DecayClass) -> Self {
        Self { grid, m, values: vec![C64::default(); m * grid.len()], decay }
    }

    /// Sample `f(x)` (one entry per component) at every node.
    pub fn from_fn(grid: GridSpec, m: usize, decay: DecayClass, f: impl Fn(&[f64]) -> Vec<C64>) -> Result<Self> {
        let mut values = vec![C64::default(); m * grid.len()];
        for (idx, x) in grid.nodes().enumerate() {
            let v = f(&x);
            if v.len() != m {
                return Err(Error::Shape(format!("{} components, expected {m}", v.len())));
            }
            for (k, z) in v.into_iter().enumerate() {
                values[k * grid.len() + idx] = z;
            }
        }
        Self::new(grid, m, values, decay)
    }

    /// Single-component real field.
    pub fn scalar(grid: GridSpec, decay: DecayClass, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::from_fn(grid, 1, decay, |x| vec![c(f(x))])
    }

    pub fn from_components(components: Vec<BoundaryField>) -> Result<Self> {
        let first = components.first().ok_or_else(|| Error::Shape("no components".into()))?;
        let (grid, decay) = (first.grid, first.decay);
        let mut values = Vec::new();
        for f in &components {
            if f.grid != grid {
                return Err(Error::Shape("components on different grids".into()));
            }
            values.extend_from_slice(&f.values);
        }
        let m = values.len() / grid.len();
        Self::new(grid, m, values, decay)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn decay(&self) -> DecayClass {
        self.decay
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn component(&self, k: usize) -> &[C64] {
        let len = self.grid.len();
        &self.values[k * len..(k + 1) * len]
    }

    pub fn component_field(&self, k: usize) -> Self {
        Self { grid: self.grid, m: 1, values: self.component(k).to_vec(), decay: self.decay }
    }

    pub fn with_decay(mut self, decay: DecayClass) -> Self {
        self.decay = decay;
        self
    }

    pub(crate) fn from_parts(grid: GridSpec, m: usize, values: Vec<C64>, decay: DecayClass) -> Self {
        debug_assert_eq!(values.len(), m * grid.len());
        Self { grid, m, values, decay }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { values: self.values.iter().map(|&v| f(v)).collect(), ..self.clone() }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|v| v * s)
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(&x, &y)| a * x + b * y).collect(),
            decay: weaker(self.decay, other.decay),
            ..self.clone()
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.lin_comb(c(1.0), other, c(1.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.lin_comb(c(1.0), other, c(-1.0))
    }

    /// `(a f)(x) = a f(x)` for a constant `M_out x M` matrix.
    pub fn apply_matrix(&self, a: &CMat) -> Result<Self> {
        if a.ncols() != self.m {
            return Err(Error::Shape(format!("{}x{} matrix on {} components", a.nrows(), a.ncols(), self.m)));
        }
        let len = self.grid.len();
        let mut values = vec![C64::default(); a.nrows() * len];
        for r in 0..a.nrows() {
            for k in 0..self.m {
                let w = a[(r, k)];
                if w == C64::default() {
                    continue;
                }
                for (out, v) in values[r * len..(r + 1) * len].iter_mut().zip(self.component(k)) {
                    *out += w * v;
                }
            }
        }
        Ok(Self { m: a.nrows(), values, ..self.clone() })
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.m != other.m {
            return Err(Error::Shape("fields live on different grids".into()));
        }
        Ok(())
    }

    /// Discrete `L^2` norm `(h^d sum |f|^2)^{1/2}` over the masked nodes.
    pub fn l2_on(&self, mask: Option<&[bool]>) -> f64 {
        let len = self.grid.len();
        let sum: f64 = self
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| mask.is_none_or(|m| m[i % len]))
            .map(|(_, v)| v.norm_sqr())
            .sum();
        (sum * self.grid.h().powi(self.grid.d as i32)).sqrt()
    }

    pub fn l2(&self) -> f64 {
        self.l2_on(None)
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn outer_layer_max(&self) -> f64 {
        let len = self.grid.len();
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.on_outer_layer(i % len))
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// Per-component discrete integral `h^d sum f`.
    pub fn integral(&self) -> Vec<C64> {
        let w = self.grid.h().powi(self.grid.d as i32);
        (0..self.m).map(|k| self.component(k).iter().sum::<C64>() * w).collect()
    }

    /// Value at the node nearest to `x`, per component.
    pub fn value_near(&self, x: &[f64]) -> Vec<C64> {
        let g = &self.grid;
        let idx = x.iter().fold(0, |acc, &v| {
            let i = ((v + g.half_width) / g.h()).round().clamp(0.0, (g.points - 1) as f64) as usize;
            acc * g.points + i
        });
        (0..self.m).map(|k| self.component(k)[idx]).collect()
    }
}

fn weaker(a: DecayClass, b: DecayClass) -> DecayClass {
    use DecayClass::*;
    match (a, b) {
        (Periodic, _) | (_, Periodic) => Periodic,
        (SchwartzLike, _) | (_, SchwartzLike) => SchwartzLike,
        _ => Compact,
    }
}

/// `||a - b|| / ||b||` in discrete `L^2` over the masked nodes.
pub fn rel_l2_gap(a: &BoundaryField, b: &BoundaryField, mask: Option<&[bool]>) -> Result<f64> {
    let diff = a.sub(b)?;
    let denom = b.l2_on(mask);
    Ok(if denom == 0.0 { diff.l2_on(mask) } else { diff.l2_on(mask) / denom })
}

/// Named boundary data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldPreset {
    /// `exp(-|x|^2 / (2 sigma^2))`.
    Gaussian { sigma: f64 },
    /// `cos(xi x_1) exp(-|x|^2 / (2 width^2))`.
    WindowedCos { xi: f64, width: f64 },
    /// Harmonic Poisson kernel profile `P_{t0}` in `R^{d+1}_+`.
    Cauchy { t0: f64 },
    /// `(1 - |x|^2 / r^2)^4` inside the ball of radius `r`, zero outside.
    Bump { r: f64 },
}

impl FieldPreset {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match *self {
            Self::Gaussian { sigma } => (-r2 / (2.0 * sigma * sigma)).exp(),
            Self::WindowedCos { xi, width } => (xi * x[0]).cos() * (-r2 / (2.0 * width * width)).exp(),
            Self::Cauchy { t0 } => {
                let d = x.len() as f64;
                let omega = crate::linalg::sphere_area(x.len() + 1);
                2.0 / omega * t0 / (t0 * t0 + r2).powf((d + 1.0) / 2.0)
            }
            Self::Bump { r } => {
                let s = 1.0 - r2 / (r * r);
                if s > 0.0 {
                    s.powi(4)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn decay(&self) -> DecayClass {
        match self {
            Self::Bump { .. } => DecayClass::Compact,
            _ => DecayClass::SchwartzLike,
        }
    }

    /// Sample on `grid`; `component` selects the active entry of an `M`-vector.
    pub fn sample(&self, grid: GridSpec, m: usize, component: usize) -> Result<BoundaryField> {
        if component >= m {
            return Err(Error::Shape(format!("component {component} of {m}")));
        }
        BoundaryField::from_fn(grid, m, self.decay(), |x| {
            let mut v = vec![C64::default(); m];
            v[component] = c(self.eval(x));
            v
        })
    }
}

/// `2 pi k / (L h)` for DFT index `k` of a length-`L` axis.
pub(crate) fn angular_frequency(k: usize, len: usize, h: f64) -> f64 {
    let signed = if k < len / 2 { k as f64 } else { k as f64 - len as f64 };
    2.0 * PI * signed / (len as f64 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rules() {
        assert!(GridSpec::new(1, 12.8, 1024).is_ok());
        assert!(matches!(GridSpec::new(1, 12.8, 1000), Err(Error::BadGrid(_))));
        assert!(matches!(GridSpec::new(1, 12.8, 32), Err(Error::BadGrid(_))));
        assert!(matches!(GridSpec::new(1, 100.0, 64), Err(Error::BadGrid(_))));
        assert!(matches!(GridSpec::new(3, 1.0, 64), Err(Error::BadGrid(_))));
        let g = GridSpec::new(2, 8.0, 64).unwrap();
        assert_eq!(g.len(), 4096);
        assert_eq!(g.node(64 * 32 + 32), vec![0.0, 0.0]);
        assert!(g.on_outer_layer(5) && !g.on_outer_layer(64 * 3 + 3));
    }

    #[test]
    fn compact_class_rejects_edge_values() {
        let g = GridSpec::new(1, 8.0, 64).unwrap();
        assert!(BoundaryField::scalar(g, DecayClass::Compact, |_| 1.0).is_err());
        let b = FieldPreset::Bump { r: 3.0 }.sample(g, 2, 1).unwrap();
        assert_eq!(b.component(0).iter().map(|v| v.norm()).sum::<f64>(), 0.0);
        assert_eq!(b.value_near(&[0.0])[1], c(1.0));
    }

    #[test]
    fn norms_and_gaps() {
        let g = GridSpec::new(1, 16.0, 1024).unwrap();
        let f = BoundaryField::scalar(g, DecayClass::SchwartzLike, |x| (-x[0] * x[0]).exp()).unwrap();
        // int exp(-2x^2) = sqrt(pi/2)
        assert!((f.l2().powi(2) - (PI / 2.0).sqrt()).abs() < 1e-12);
        assert!((f.integral()[0].re - PI.sqrt()).abs() < 1e-12);
        assert_eq!(rel_l2_gap(&f, &f, None).unwrap(), 0.0);
        let twice = f.scale(c(2.0));
        assert!((rel_l2_gap(&twice, &f, None).unwrap() - 1.0).abs() < 1e-15);
    }
}
