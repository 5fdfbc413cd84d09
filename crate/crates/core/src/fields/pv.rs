//! Principal-value convolution with odd kernels homogeneous of degree `-d`.

use super::convolve::{fft_apply, tabulate};
use super::BoundaryField;
use crate::error::{Error, Result};
use crate::linalg::{sphere_area, CMat, C64};
use crate::quadrature::sphere_points;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

type Eval = dyn Fn(&[f64]) -> CMat + Send + Sync;

/// Matrix kernel `k(x) in C^{rows x cols}` on `R^d \ {0}`; odd and
/// homogeneous of degree `-d`.
#[derive(Clone)]
pub struct PvKernel {
    d: usize,
    rows: usize,
    cols: usize,
    eval: Arc<Eval>,
}

impl fmt::Debug for PvKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PvKernel")
            .field("d", &self.d)
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .finish_non_exhaustive()
    }
}

/// Relative defect tolerated by the oddness and homogeneity checks.
const KERNEL_GATE: f64 = 1e-8;

impl PvKernel {
    pub fn new(d: usize, rows: usize, cols: usize, eval: impl Fn(&[f64]) -> CMat + Send + Sync + 'static) -> Self {
        Self { d, rows, cols, eval: Arc::new(eval) }
    }

    /// Riesz kernel `(2 / omega_d) x_s / |x|^{d+1}` (zero-based `s`).
    pub fn riesz(d: usize, s: usize) -> Self {
        let cd = 2.0 / sphere_area(d + 1);
        Self::new(d, 1, 1, move |x| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            CMat::from_element(1, 1, C64::new(cd * x[s] / r.powi(d as i32 + 1), 0.0))
        })
    }

    /// Homogeneous extension `|x|^{-d} p(x / |x|)` of an angular profile.
    ///
    /// For `d = 2` the profile is tabulated on `angles` equispaced directions
    /// over a half turn, extended by oddness and interpolated with periodic
    /// four-point Lagrange weights.
    pub fn from_profile(
        d: usize,
        rows: usize,
        cols: usize,
        angles: usize,
        profile: impl Fn(&[f64]) -> Result<CMat>,
    ) -> Result<Self> {
        if d == 1 {
            let plus = profile(&[1.0])?;
            let minus = profile(&[-1.0])?;
            return Ok(Self::new(1, rows, cols, move |x| {
                if x[0] > 0.0 {
                    &plus * C64::new(1.0 / x[0], 0.0)
                } else {
                    &minus * C64::new(-1.0 / x[0], 0.0)
                }
            }));
        }
        let half: Vec<CMat> = (0..angles)
            .map(|j| {
                let th = PI * j as f64 / angles as f64;
                profile(&[th.cos(), th.sin()])
            })
            .collect::<Result<_>>()?;
        let table: Vec<CMat> = half.iter().cloned().chain(half.iter().map(|m| -m)).collect();
        let count = table.len();
        let step = 2.0 * PI / count as f64;
        Ok(Self::new(2, rows, cols, move |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            let th = x[1].atan2(x[0]).rem_euclid(2.0 * PI) / step;
            let j = th.floor();
            let u = th - j;
            let base = j as i64;
            // Lagrange weights on nodes -1, 0, 1, 2
            let w = [
                -u * (u - 1.0) * (u - 2.0) / 6.0,
                (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0,
                -(u + 1.0) * u * (u - 2.0) / 2.0,
                (u + 1.0) * u * (u - 1.0) / 6.0,
            ];
            let mut acc = CMat::zeros(rows, cols);
            for (k, wk) in w.iter().enumerate() {
                let idx = (base - 1 + k as i64).rem_euclid(count as i64) as usize;
                acc += &table[idx] * C64::new(*wk, 0.0);
            }
            acc * C64::new(1.0 / r2, 0.0)
        }))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn eval(&self, x: &[f64]) -> CMat {
        (self.eval)(x)
    }

    /// `lambda k`.
    pub fn scaled(&self, lambda: C64) -> Self {
        let inner = self.eval.clone();
        Self::new(self.d, self.rows, self.cols, move |x| inner(x) * lambda)
    }

    /// Sampled oddness and degree `-d` homogeneity defects.
    pub fn check(&self) -> Result<()> {
        let dirs: Vec<Vec<f64>> = if self.d == 1 { vec![vec![1.0], vec![-1.0]] } else { sphere_points(2, 64, 5) };
        let size = |m: &CMat| m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let scale = dirs.iter().map(|u| size(&self.eval(u))).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let (mut odd, mut homog): (f64, f64) = (0.0, 0.0);
        for dir in &dirs {
            for rad in [0.37, 1.0, 4.2] {
                let x: Vec<f64> = dir.iter().map(|v| v * rad).collect();
                let neg: Vec<f64> = x.iter().map(|v| -v).collect();
                let kx = self.eval(&x);
                let unit = rad.powi(self.d as i32) / scale;
                odd = odd.max(size(&(&kx + self.eval(&neg))) * unit);
                for lambda in [0.5, 3.0] {
                    let y: Vec<f64> = x.iter().map(|v| v * lambda).collect();
                    let scaled = self.eval(&y) * C64::new(lambda.powi(self.d as i32), 0.0);
                    homog = homog.max(size(&(scaled - &kx)) * unit);
                }
            }
        }
        if odd > KERNEL_GATE {
            return Err(Error::KernelNotOdd(odd));
        }
        if homog > KERNEL_GATE {
            return Err(Error::KernelNotHomogeneous { degree: self.d, defect: homog });
        }
        Ok(())
    }
}

/// `T g(x) = lim_{eps -> 0} int_{|x - y| > eps} k(x - y) g(y) dy`.
///
/// The punctured lattice sum over offsets `o != 0` pairs `y` with its mirror
/// `2x - y`, so constant parts of `g` cancel exactly. Its error expands in odd
/// powers of the spacing; sums on the sublattices of spacing `h`, `2h`, `4h`
/// are combined to remove the `h` and `h^3` terms.
pub fn pv_apply(k: &PvKernel, g: &BoundaryField) -> Result<BoundaryField> {
    k.check()?;
    let grid = *g.grid();
    if grid.d != k.d || g.m() != k.cols {
        return Err(Error::Shape(format!(
            "kernel acts on d = {}, {} components; field has d = {}, {}",
            k.d,
            k.cols,
            grid.d,
            g.m()
        )));
    }
    let d = grid.d as i32;
    let weight = move |o: &[i64]| -> f64 {
        if o.iter().all(|&v| v == 0) {
            return 0.0;
        }
        [(1_i64, 16.0 / 7.0), (2, -10.0 / 7.0), (4, 1.0 / 7.0)]
            .iter()
            .filter(|(p, _)| o.iter().all(|v| v % p == 0))
            .map(|(p, w)| w * (*p as f64).powi(d))
            .sum()
    };
    let eval = |x: &[f64]| Ok(k.eval(x));
    let tables = tabulate(&eval, grid.points, grid.d, grid.h(), k.rows, k.cols, &weight)?;
    Ok(fft_apply(g, tables, k.rows))
}
