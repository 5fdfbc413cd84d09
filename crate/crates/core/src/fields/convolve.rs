//! Trapezoid convolution `u(x) = h^d sum_y k(x - y) f(y)` on a grid.

use super::spectral::{extract, fft_nd};
use super::{BoundaryField, DecayClass};
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::poisson::PoissonKernel;
use rayon::prelude::*;
use rustfft::FftDirection;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvolutionRoute {
    /// Pairwise sum over the nonzero nodes of `f`, kernel evaluated per pair.
    Direct,
    /// Linear convolution through a `2N`-periodic DFT of the tabulated kernel.
    Fft,
}

type Kernel<'a> = dyn Fn(&[f64]) -> Result<CMat> + Sync + 'a;

/// Wrap-around offsets `(-N, N)` of a length-`2N` axis; slot `N` is unused.
fn offset(q: usize, n: usize) -> Option<i64> {
    match q.cmp(&n) {
        std::cmp::Ordering::Less => Some(q as i64),
        std::cmp::Ordering::Equal => None,
        std::cmp::Ordering::Greater => Some(q as i64 - 2 * n as i64),
    }
}

/// Kernel sampled at `h * offset` in wrap-around order, one array per matrix entry.
pub(crate) fn tabulate(
    kernel: &Kernel<'_>,
    n: usize,
    d: usize,
    h: f64,
    rows: usize,
    cols: usize,
    weight: &(dyn Fn(&[i64]) -> f64 + Sync),
) -> Result<Vec<Vec<C64>>> {
    let len = 2 * n;
    let total = len.pow(d as u32);
    let samples: Vec<Option<CMat>> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let qs: Vec<usize> = if d == 1 { vec![idx] } else { vec![idx / len, idx % len] };
            let Some(o) = qs.iter().map(|&q| offset(q, n)).collect::<Option<Vec<i64>>>() else {
                return Ok(None);
            };
            let w = weight(&o);
            if w == 0.0 {
                return Ok(None);
            }
            let x: Vec<f64> = o.iter().map(|&k| k as f64 * h).collect();
            Ok(Some(kernel(&x)? * C64::new(w, 0.0)))
        })
        .collect::<Result<_>>()?;
    let mut tables = vec![vec![C64::default(); total]; rows * cols];
    for (idx, s) in samples.into_iter().enumerate() {
        if let Some(s) = s {
            if s.nrows() != rows || s.ncols() != cols {
                return Err(Error::Shape(format!("kernel is {}x{}, expected {rows}x{cols}", s.nrows(), s.ncols())));
            }
            for r in 0..rows {
                for k in 0..cols {
                    tables[r * cols + k][idx] = s[(r, k)];
                }
            }
        }
    }
    Ok(tables)
}

/// `h^d sum_j table(i - j) f(j)` for tabulated kernels, by DFT.
pub(crate) fn fft_apply(f: &BoundaryField, mut tables: Vec<Vec<C64>>, rows: usize) -> BoundaryField {
    let g = *f.grid();
    let (n, d, m) = (g.points, g.d, f.m());
    let len = 2 * n;
    let w = g.h().powi(d as i32);
    tables.par_iter_mut().for_each(|t| fft_nd(t, len, d, FftDirection::Forward));
    let spectra: Vec<Vec<C64>> = (0..m)
        .into_par_iter()
        .map(|k| {
            let mut buf = super::spectral::embed(f, k, len);
            fft_nd(&mut buf, len, d, FftDirection::Forward);
            buf
        })
        .collect();
    let outputs: Vec<Vec<C64>> = (0..rows)
        .into_par_iter()
        .map(|r| {
            let mut acc = vec![C64::default(); len.pow(d as u32)];
            for (k, spec) in spectra.iter().enumerate() {
                let tab = &tables[r * m + k];
                if tab.iter().all(|v| *v == C64::default()) {
                    continue;
                }
                for ((a, t), s) in acc.iter_mut().zip(tab).zip(spec) {
                    *a += t * s;
                }
            }
            fft_nd(&mut acc, len, d, FftDirection::Inverse);
            extract(&acc, n, len, d).into_iter().map(|v| v * w).collect()
        })
        .collect();
    BoundaryField::from_parts(g, rows, outputs.concat(), DecayClass::Periodic)
}

/// Convolution with an arbitrary matrix kernel `k(x) in C^{rows x M}`.
pub fn convolve_with(
    f: &BoundaryField,
    rows: usize,
    kernel: &Kernel<'_>,
    route: ConvolutionRoute,
) -> Result<BoundaryField> {
    let g = *f.grid();
    let (n, d, m) = (g.points, g.d, f.m());
    match route {
        ConvolutionRoute::Fft => {
            let tables = tabulate(kernel, n, d, g.h(), rows, m, &|_| 1.0)?;
            Ok(fft_apply(f, tables, rows))
        }
        ConvolutionRoute::Direct => {
            let len = g.len();
            let w = g.h().powi(d as i32);
            let support: Vec<(Vec<f64>, Vec<C64>)> = (0..len)
                .map(|j| (g.node(j), (0..m).map(|k| f.component(k)[j]).collect::<Vec<_>>()))
                .filter(|(_, v)| v.iter().any(|z| *z != C64::default()))
                .collect();
            let per_node: Vec<Vec<C64>> = (0..len)
                .into_par_iter()
                .map(|i| {
                    let x = g.node(i);
                    let mut acc = vec![C64::default(); rows];
                    let mut diff = vec![0.0; d];
                    for (y, v) in &support {
                        for a in 0..d {
                            diff[a] = x[a] - y[a];
                        }
                        let k = kernel(&diff)?;
                        for (r, slot) in acc.iter_mut().enumerate() {
                            for (c, vc) in v.iter().enumerate() {
                                *slot += k[(r, c)] * vc;
                            }
                        }
                    }
                    Ok(acc.into_iter().map(|z| z * w).collect())
                })
                .collect::<Result<_>>()?;
            let mut values = vec![C64::default(); rows * len];
            for (i, v) in per_node.into_iter().enumerate() {
                for (r, z) in v.into_iter().enumerate() {
                    values[r * len + i] = z;
                }
            }
            Ok(BoundaryField::from_parts(g, rows, values, DecayClass::Periodic))
        }
    }
}

/// `u(., t) = P_t * f`.
pub fn convolve(f: &BoundaryField, kernel: &PoissonKernel, t: f64, route: ConvolutionRoute) -> Result<BoundaryField> {
    if t <= 0.0 {
        return Err(Error::NonpositiveTime(t));
    }
    let g = f.grid();
    if g.d + 1 != kernel.n() || f.m() != kernel.m() {
        return Err(Error::Shape(format!(
            "field (d = {}, M = {}) does not match kernel (n = {}, M = {})",
            g.d,
            f.m(),
            kernel.n(),
            kernel.m()
        )));
    }
    if t < 4.0 * g.h() {
        return Err(Error::GridTooCoarse { t, min: 4.0 * g.h() });
    }
    convolve_with(f, kernel.m(), &|x| kernel.eval_k(x, t), route)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::EllipticSystem;
    use crate::fields::{rel_l2_gap, FieldPreset, GridSpec};
    use crate::linalg::c;

    #[test]
    fn direct_and_fft_agree() {
        let lap = PoissonKernel::closed(&EllipticSystem::laplacian(2)).unwrap();
        let g = GridSpec::new(1, 12.8, 1024).unwrap();
        let f = FieldPreset::Gaussian { sigma: 1.0 }.sample(g, 1, 0).unwrap();
        let a = convolve(&f, &lap, 0.3, ConvolutionRoute::Direct).unwrap();
        let b = convolve(&f, &lap, 0.3, ConvolutionRoute::Fft).unwrap();
        let mask = g.interior_mask(0.5);
        assert!(rel_l2_gap(&b, &a, Some(&mask)).unwrap() < 1e-12);
        assert!(matches!(convolve(&f, &lap, 0.05, ConvolutionRoute::Fft), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn cauchy_semigroup() {
        let lap = PoissonKernel::closed(&EllipticSystem::laplacian(2)).unwrap();
        let g = GridSpec::new(1, 200.0, 32768).unwrap();
        let f = FieldPreset::Cauchy { t0: 1.0 }.sample(g, 1, 0).unwrap();
        let u = convolve(&f, &lap, 1.0, ConvolutionRoute::Fft).unwrap();
        let exact = FieldPreset::Cauchy { t0: 2.0 }.sample(g, 1, 0).unwrap();
        let worst = g
            .nodes()
            .enumerate()
            .filter(|(_, x)| x[0].abs() <= 10.0)
            .map(|(i, _)| (u.values()[i] - exact.values()[i]).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-4, "{worst}");
    }

    #[test]
    fn inactive_components_stay_zero() {
        let g = GridSpec::new(1, 12.8, 256).unwrap();
        let f = FieldPreset::Gaussian { sigma: 1.0 }.sample(g, 2, 0).unwrap();
        let cauchy =
            |x: &[f64]| Ok(CMat::from_diagonal_element(2, 2, c(1.0 / (std::f64::consts::PI * (1.0 + x[0] * x[0])))));
        let u = convolve_with(&f, 2, &cauchy, ConvolutionRoute::Fft).unwrap();
        assert!(u.component(1).iter().all(|v| v.norm() == 0.0));
        assert!(u.value_near(&[0.0])[0].re > 0.1);
        let constant =
            BoundaryField::scalar(GridSpec::new(1, 200.0, 4096).unwrap(), DecayClass::Periodic, |_| 1.0).unwrap();
        let lap = PoissonKernel::closed(&EllipticSystem::laplacian(2)).unwrap();
        let v = convolve(&constant, &lap, 1.0, ConvolutionRoute::Fft).unwrap();
        assert!((v.value_near(&[0.0])[0] - c(1.0)).norm() < 1e-2);
    }
}
