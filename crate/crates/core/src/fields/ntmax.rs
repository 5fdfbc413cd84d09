//! Sampled nontangential maximal function.

use super::{BoundaryField, DecayClass, GridSpec};
use crate::error::{Error, Result};
use crate::linalg::{c, C64};
use rayon::prelude::*;
use serde::Serialize;

/// Cone `{(y, t) : |y - x| < kappa t}` sampled at the given heights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeSpec {
    pub kappa: f64,
    pub heights: Vec<f64>,
}

impl ConeSpec {
    /// `count` heights `t_min (t_max / t_min)^{k / (count - 1)}`.
    pub fn geometric(kappa: f64, t_min: f64, t_max: f64, count: usize) -> Result<Self> {
        if !(kappa > 0.0 && t_min > 0.0 && t_max >= t_min && count >= 2) {
            return Err(Error::Shape(format!("cone kappa = {kappa}, heights [{t_min}, {t_max}] x {count}")));
        }
        let ratio = t_max / t_min;
        let heights = (0..count).map(|k| t_min * ratio.powf(k as f64 / (count - 1) as f64)).collect();
        Ok(Self { kappa, heights })
    }

    /// Heights `[h, 10 R]` for a grid.
    pub fn for_grid(kappa: f64, grid: &GridSpec, count: usize) -> Result<Self> {
        Self::geometric(kappa, grid.h(), 10.0 * grid.half_width, count)
    }

    /// Ladder with every gap halved; contains the current heights.
    pub fn refined(&self) -> Self {
        let mut heights = Vec::with_capacity(2 * self.heights.len());
        for w in self.heights.windows(2) {
            heights.push(w[0]);
            heights.push((w[0] * w[1]).sqrt());
        }
        heights.extend(self.heights.last());
        Self { kappa: self.kappa, heights }
    }
}

type Evaluator<'a> = dyn Fn(&[f64], f64) -> Result<Vec<C64>> + Sync + 'a;

/// `max |u(y, t)|` over sampled cone points with grid offsets `y`, per node.
pub fn nt_max_sampled(u: &Evaluator<'_>, cone: &ConeSpec, grid: &GridSpec) -> Result<BoundaryField> {
    let len = grid.len();
    let h = grid.h();
    let mut best = vec![0.0_f64; len];
    for &t in &cone.heights {
        let size: Vec<f64> = (0..len)
            .into_par_iter()
            .map(|j| Ok(u(&grid.node(j), t)?.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()))
            .collect::<Result<_>>()?;
        let reach = cone.kappa * t;
        let span = ((reach / h).ceil() as i64).min(grid.points as i64);
        let n = grid.points as i64;
        best.par_iter_mut().enumerate().for_each(|(i, b)| {
            let mi: Vec<i64> = grid.multi_index(i).iter().map(|&v| v as i64).collect();
            let inside = |k: i64| (0..n).contains(&k);
            if grid.d == 1 {
                for o in -span..=span {
                    let j = mi[0] + o;
                    if inside(j) && ((o as f64 * h).abs() < reach || o == 0) {
                        *b = b.max(size[j as usize]);
                    }
                }
            } else {
                for o0 in -span..=span {
                    for o1 in -span..=span {
                        let (j0, j1) = (mi[0] + o0, mi[1] + o1);
                        let dist = h * ((o0 * o0 + o1 * o1) as f64).sqrt();
                        if inside(j0) && inside(j1) && (dist < reach || (o0 == 0 && o1 == 0)) {
                            *b = b.max(size[(j0 * n + j1) as usize]);
                        }
                    }
                }
            }
        });
    }
    Ok(BoundaryField::from_parts(*grid, 1, best.into_iter().map(c).collect(), DecayClass::Periodic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::EllipticSystem;
    use crate::poisson::PoissonKernel;
    use std::f64::consts::PI;

    #[test]
    fn harmonic_kernel_on_axis() {
        let k = PoissonKernel::closed(&EllipticSystem::laplacian(2)).unwrap();
        let grid = GridSpec::new(1, 8.0, 64).unwrap();
        let cone = ConeSpec::for_grid(1.0, &grid, 12).unwrap();
        let u = |y: &[f64], t: f64| Ok(vec![k.eval_k(y, t)?[(0, 0)]]);
        let out = nt_max_sampled(&u, &cone, &grid).unwrap();
        let at0 = out.value_near(&[0.0])[0].re;
        assert!((at0 - 1.0 / (PI * grid.h())).abs() < 1e-12);
        let refined = nt_max_sampled(&u, &cone.refined(), &grid).unwrap();
        assert!(refined.values().iter().zip(out.values()).all(|(a, b)| a.re >= b.re));
    }

    #[test]
    fn bounded_input() {
        let grid = GridSpec::new(2, 4.0, 64).unwrap();
        let cone = ConeSpec::for_grid(0.5, &grid, 4).unwrap();
        let u = |y: &[f64], t: f64| Ok(vec![c((y[0] + t).sin()), c(0.0)]);
        let out = nt_max_sampled(&u, &cone, &grid).unwrap();
        assert!(out.sup() <= 1.0);
        assert!(cone.refined().heights.len() == 7);
    }
}
