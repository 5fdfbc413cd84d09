//! Tangential derivatives `d_s f`.

use super::spectral::fourier_multiplier;
use super::{BoundaryField, DecayClass};
use crate::error::Result;
use crate::linalg::{CMat, C64, I};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientRoute {
    /// Multiplier `i xi_s`.
    Spectral,
    /// Fourth-order differences, one-sided in the two outer layers.
    FiniteDifference,
}

/// `[d_1 f, ..., d_d f]`.
pub fn gradient(f: &BoundaryField, route: GradientRoute) -> Result<Vec<BoundaryField>> {
    let d = f.grid().d;
    let decay = match f.decay() {
        DecayClass::Compact => DecayClass::SchwartzLike,
        other => other,
    };
    (0..d)
        .map(|s| {
            let out = match route {
                GradientRoute::Spectral => {
                    let m = f.m();
                    fourier_multiplier(f, &|xi| CMat::from_diagonal_element(m, m, I * xi[s]), 1)?
                }
                GradientRoute::FiniteDifference => finite_difference(f, s),
            };
            Ok(out.with_decay(decay))
        })
        .collect()
}

fn finite_difference(f: &BoundaryField, s: usize) -> BoundaryField {
    let g = *f.grid();
    let n = g.points;
    let inv = 1.0 / (12.0 * g.h());
    let len = g.len();
    let stride = if g.d == 1 || s == 1 { 1 } else { n };
    let mut values = vec![C64::default(); f.values().len()];
    for k in 0..f.m() {
        let src = f.component(k);
        let dst = &mut values[k * len..(k + 1) * len];
        for (idx, out) in dst.iter_mut().enumerate() {
            let i = g.multi_index(idx)[s];
            let at = |o: i64| src[(idx as i64 + o * stride as i64) as usize];
            let v = if i >= 2 && i + 2 < n {
                at(-2) - at(-1) * 8.0 + at(1) * 8.0 - at(2)
            } else if i == 0 {
                at(0) * -25.0 + at(1) * 48.0 - at(2) * 36.0 + at(3) * 16.0 - at(4) * 3.0
            } else if i == 1 {
                at(-1) * -3.0 - at(0) * 10.0 + at(1) * 18.0 - at(2) * 6.0 + at(3)
            } else if i == n - 2 {
                -(at(1) * -3.0 - at(0) * 10.0 + at(-1) * 18.0 - at(-2) * 6.0 + at(-3))
            } else {
                -(at(0) * -25.0 + at(-1) * 48.0 - at(-2) * 36.0 + at(-3) * 16.0 - at(-4) * 3.0)
            };
            *out = v * inv;
        }
    }
    BoundaryField::from_parts(g, f.m(), values, f.decay())
}
