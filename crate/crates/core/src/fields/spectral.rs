//! Fourier multipliers with the transform `f^(xi) = int e^{-i xi x} f(x) dx`.

use super::{angular_frequency, BoundaryField, DecayClass};
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64, I};
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};

/// Largest spectral energy fraction tolerated in the outer quarter band.
pub const ALIASING_GATE: f64 = 1e-10;

/// Largest outermost-layer value, relative to the sup, for non-periodic input.
const EDGE_GATE: f64 = 1e-10;

/// In-place `d`-dimensional DFT of a row-major `len^d` array; the inverse is normalized.
pub(crate) fn fft_nd(data: &mut [C64], len: usize, d: usize, direction: FftDirection) {
    let fft = FftPlanner::new().plan_fft(len, direction);
    let pass = |buf: &mut [C64]| {
        buf.par_chunks_mut(len).for_each_init(
            || vec![C64::default(); fft.get_inplace_scratch_len()],
            |scratch, row| fft.process_with_scratch(row, scratch),
        )
    };
    pass(data);
    if d == 2 {
        transpose(data, len);
        pass(data);
        transpose(data, len);
    }
    if direction == FftDirection::Inverse {
        let norm = 1.0 / (len as f64).powi(d as i32);
        data.par_iter_mut().for_each(|v| *v *= norm);
    }
}

fn transpose(data: &mut [C64], len: usize) {
    for i in 0..len {
        for j in i + 1..len {
            data.swap(i * len + j, j * len + i);
        }
    }
}

/// Copy component `k` into the corner of a zeroed `len^d` array.
pub(crate) fn embed(f: &BoundaryField, k: usize, len: usize) -> Vec<C64> {
    let g = f.grid();
    let n = g.points;
    let mut out = vec![C64::default(); len.pow(g.d as u32)];
    let src = f.component(k);
    match g.d {
        1 => out[..n].copy_from_slice(src),
        _ => {
            for i in 0..n {
                out[i * len..i * len + n].copy_from_slice(&src[i * n..(i + 1) * n]);
            }
        }
    }
    out
}

/// Inverse of [`embed`]: the `points^d` corner of a `len^d` array.
pub(crate) fn extract(buf: &[C64], n: usize, len: usize, d: usize) -> Vec<C64> {
    match d {
        1 => buf[..n].to_vec(),
        _ => (0..n).flat_map(|i| buf[i * len..i * len + n].iter().copied()).collect(),
    }
}

/// Angular frequencies of each axis of the `pad`-times enlarged grid.
pub fn frequencies(f: &BoundaryField, pad: usize) -> Vec<f64> {
    let len = pad * f.grid().points;
    (0..len).map(|k| angular_frequency(k, len, f.grid().h())).collect()
}

/// Fraction of spectral energy with some `|k| > 3N/8`.
pub fn spectral_tail_fraction(f: &BoundaryField) -> f64 {
    let g = f.grid();
    let n = g.points;
    let outer = |k: usize| k.min(n - k) > 3 * n / 8;
    let (mut total, mut tail) = (0.0, 0.0);
    for k in 0..f.m() {
        let mut buf = f.component(k).to_vec();
        fft_nd(&mut buf, n, g.d, FftDirection::Forward);
        for (idx, v) in buf.iter().enumerate() {
            let e = v.norm_sqr();
            total += e;
            let hit = match g.d {
                1 => outer(idx),
                _ => outer(idx / n) || outer(idx % n),
            };
            if hit {
                tail += e;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

fn check_spectral_input(f: &BoundaryField) -> Result<()> {
    if f.decay() != DecayClass::Periodic {
        let sup = f.sup();
        let edge = f.outer_layer_max();
        if sup > 0.0 && edge > EDGE_GATE * sup {
            return Err(Error::BoundaryLeak(edge / sup));
        }
    }
    let tail = spectral_tail_fraction(f);
    if tail > ALIASING_GATE {
        return Err(Error::AliasingRisk(tail));
    }
    Ok(())
}

/// `F^{-1}[m(xi) F f]` on a grid zero-padded `pad` times per axis.
///
/// `symbol` maps a frequency to an `M_out x M` matrix; its value at `xi = 0`
/// is used as given.
pub fn fourier_multiplier(
    f: &BoundaryField,
    symbol: &(dyn Fn(&[f64]) -> CMat + Sync),
    pad: usize,
) -> Result<BoundaryField> {
    check_spectral_input(f)?;
    let g = *f.grid();
    let (n, d, m) = (g.points, g.d, f.m());
    let len = pad.max(1) * n;
    let freqs = frequencies(f, pad.max(1));
    let spectra: Vec<Vec<C64>> = (0..m)
        .map(|k| {
            let mut buf = embed(f, k, len);
            fft_nd(&mut buf, len, d, FftDirection::Forward);
            buf
        })
        .collect();
    let xi_of = |idx: usize| -> Vec<f64> {
        match d {
            1 => vec![freqs[idx]],
            _ => vec![freqs[idx / len], freqs[idx % len]],
        }
    };
    let m_out = symbol(&vec![0.0; d]).nrows();
    let total = len.pow(d as u32);
    let mut out: Vec<Vec<C64>> = vec![vec![C64::default(); total]; m_out];
    let products: Vec<Vec<C64>> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let s = symbol(&xi_of(idx));
            (0..m_out).map(|r| (0..m).map(|k| s[(r, k)] * spectra[k][idx]).sum()).collect()
        })
        .collect();
    for (idx, p) in products.into_iter().enumerate() {
        for (r, v) in p.into_iter().enumerate() {
            out[r][idx] = v;
        }
    }
    let mut values = Vec::with_capacity(m_out * g.len());
    for mut buf in out {
        fft_nd(&mut buf, len, d, FftDirection::Inverse);
        values.extend(extract(&buf, n, len, d));
    }
    Ok(BoundaryField::from_parts(g, m_out, values, DecayClass::Periodic))
}

/// Riesz transform `R_s` (zero-based `s`), multiplier `-i xi_s / |xi|`, zero at `xi = 0`.
pub fn riesz(f: &BoundaryField, s: usize, pad: usize) -> Result<BoundaryField> {
    let d = f.grid().d;
    if s >= d {
        return Err(Error::Shape(format!("Riesz index {s} for d = {d}")));
    }
    let m = f.m();
    fourier_multiplier(
        f,
        &|xi: &[f64]| {
            let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            let v = if r == 0.0 { C64::default() } else { -I * xi[s] / r };
            CMat::from_diagonal_element(m, m, v)
        },
        pad,
    )
}
