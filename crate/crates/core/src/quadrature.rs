//! Node sets on spheres and one-dimensional rules.

use gauss_quad::legendre::GaussLegendre;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;
use std::num::NonZeroUsize;

/// Weighted nodes of a one-dimensional rule.
#[derive(Debug, Clone, Default)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Gauss-Legendre rule with `k` nodes on `[a, b]`.
    pub fn gauss_legendre(k: usize, a: f64, b: f64) -> Self {
        let gl = GaussLegendre::new(NonZeroUsize::new(k.max(1)).expect("nonzero"));
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let (nodes, weights) = gl.nodes().zip(gl.weights()).map(|(x, w)| (mid + half * x, half * w)).unzip();
        Self { nodes, weights }
    }

    /// Composite Gauss-Legendre rule on `[a, b]` with panels refined geometrically
    /// towards both endpoints, for integrands with logarithmic endpoint singularities.
    pub fn graded(levels: usize, per_panel: usize, a: f64, b: f64) -> Self {
        let mut breaks = vec![0.0];
        for k in (1..=levels).rev() {
            breaks.push(0.5 * 0.5f64.powi(k as i32));
        }
        breaks.push(0.5);
        let mirrored: Vec<f64> = breaks.iter().rev().skip(1).map(|t| 1.0 - t).collect();
        breaks.extend(mirrored);
        let base = Self::gauss_legendre(per_panel, 0.0, 1.0);
        let mut out = Self::default();
        for pair in breaks.windows(2) {
            let (lo, hi) = (a + (b - a) * pair[0], a + (b - a) * pair[1]);
            for (x, w) in base.iter() {
                out.nodes.push(lo + (hi - lo) * x);
                out.weights.push((hi - lo) * w);
            }
        }
        out
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Deterministic quasi-uniform unit vectors in `R^n`.
///
/// Uniform angles on the circle, a Fibonacci lattice on `S^2`, seeded Gaussian
/// directions in higher dimensions.
pub fn sphere_points(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    match n {
        2 => (0..count)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / count as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        3 => fibonacci_sphere(count),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                    let r = crate::linalg::norm(&v);
                    v.into_iter().map(|x| x / r).collect()
                })
                .collect()
        }
    }
}

pub fn fibonacci_sphere(count: usize) -> Vec<Vec<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            vec![r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Two unit vectors completing `e` to a right-handed orthonormal frame in `R^3`.
pub fn orthonormal_frame(e: &[f64]) -> ([f64; 3], [f64; 3]) {
    let helper = if e[0].abs() < 0.6 {
        [1.0, 0.0, 0.0]
    } else if e[1].abs() < 0.6 {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let d = e[0] * helper[0] + e[1] * helper[1] + e[2] * helper[2];
    let mut u = [helper[0] - d * e[0], helper[1] - d * e[1], helper[2] - d * e[2]];
    let un = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    u.iter_mut().for_each(|x| *x /= un);
    let v = [e[1] * u[2] - e[2] * u[1], e[2] * u[0] - e[0] * u[2], e[0] * u[1] - e[1] * u[0]];
    (u, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_polynomial_exactness() {
        let r = Rule::gauss_legendre(5, -1.0, 2.0);
        let v = r.integrate(|x| x.powi(9));
        assert!((v - (2f64.powi(10) - 1.0) / 10.0).abs() < 1e-11);
    }

    #[test]
    fn graded_rule_handles_log_endpoints() {
        let r = Rule::graded(40, 12, 0.0, 1.0);
        // int_0^1 ln x + ln(1-x) dx = -2
        let v = r.integrate(|x| x.ln() + (1.0 - x).ln());
        assert!((v + 2.0).abs() < 1e-11, "{v}");
    }

    #[test]
    fn fibonacci_points_are_unit() {
        for p in fibonacci_sphere(100) {
            assert!((crate::linalg::norm(&p) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn frame_is_orthonormal() {
        let e = [0.6, 0.0, 0.8];
        let (u, v) = orthonormal_frame(&e);
        let dot = |a: &[f64], b: &[f64]| crate::linalg::dot(a, b);
        assert!(dot(&u, &e).abs() < 1e-15 && dot(&v, &e).abs() < 1e-15);
        assert!(dot(&u, &v).abs() < 1e-15);
        assert!((dot(&v, &v) - 1.0).abs() < 1e-15);
    }
}
