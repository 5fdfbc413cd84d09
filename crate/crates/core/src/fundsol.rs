//! Fundamental solutions `E` (with `L E = delta I`) and their gradients.
//!
//! Closed forms exist for scalar operators and for the Lamé system. Any other
//! system goes through the plane-wave representation: for `n = 3`
//! `E = -(1/16 pi^2) Lap_x int_{S^2} |x.xi| L(xi)^{-1}`, for `n = 2`
//! `E = (1/8 pi^2) Lap_x int_{S^1} (x.xi)^2 ln|x.xi| L(xi)^{-1}`, where
//! `L(xi) = xi_r xi_s a_{rs}`.

use crate::elliptic::{EllipticSystem, SystemKind};
use crate::error::{Error, Result};
use crate::linalg::{c, invert, max_abs, norm, sphere_area, CMat, C64};
use crate::quadrature::{orthonormal_frame, sphere_points, Rule};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FundsolRoute {
    ClosedScalar,
    ClosedLame,
    Quadrature,
}

/// How the outer Laplacian of the plane-wave integral is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterLaplacian {
    /// Exact distributional Laplacian under the integral: a great-circle
    /// integral for `n = 3`, a log-kernel integral for `n = 2`.
    Reduced,
    /// Seven-point (or five-point) second differences of the sphere integral.
    Stencil,
}

#[derive(Debug, Clone)]
enum Closed {
    Scalar { inv: CMat, sqrt_det: C64 },
    Lame { mu: f64, lambda: f64 },
    None,
}

#[derive(Debug, Clone)]
struct Rules {
    /// Polar-angle rule on `[0, pi/2]` (n = 3, stencil mode).
    polar: Rule,
    azimuth: usize,
    /// Half great circle trapezoid node count (n = 3, reduced mode).
    circle: usize,
    /// Graded rule on `[-pi/2, pi/2]` (n = 2).
    graded: Rule,
}

#[derive(Debug, Clone)]
pub struct FundamentalSolution {
    system: EllipticSystem,
    route: FundsolRoute,
    quadrature_nodes: usize,
    fd_step_scale: f64,
    outer: OuterLaplacian,
    omega: f64,
    closed: Closed,
    rules: Rules,
}

pub const DEFAULT_FD_STEP: f64 = 1e-3;

fn default_nodes(n: usize) -> usize {
    if n == 2 {
        4096
    } else {
        2048
    }
}

impl FundamentalSolution {
    /// Closed form when one exists, quadrature otherwise.
    pub fn for_system(system: &EllipticSystem) -> Result<Self> {
        let route = match system.kind {
            SystemKind::Scalar { .. } => FundsolRoute::ClosedScalar,
            SystemKind::Lame { .. } => FundsolRoute::ClosedLame,
            SystemKind::General => FundsolRoute::Quadrature,
        };
        Self::new(system, route)
    }

    pub fn new(system: &EllipticSystem, route: FundsolRoute) -> Result<Self> {
        let n = system.n();
        let closed = match (route, &system.kind) {
            (FundsolRoute::ClosedScalar, SystemKind::Scalar { sym, .. }) => {
                let inv = invert(sym).ok_or_else(|| Error::NotElliptic("singular A_sym".into()))?;
                Closed::Scalar { inv, sqrt_det: sym.determinant().sqrt() }
            }
            (FundsolRoute::ClosedLame, SystemKind::Lame { mu, lambda }) => Closed::Lame { mu: *mu, lambda: *lambda },
            (FundsolRoute::Quadrature, _) if n == 2 || n == 3 => Closed::None,
            (FundsolRoute::Quadrature, _) => {
                return Err(Error::UnsupportedRoute(format!("quadrature route needs n in {{2,3}}, got {n}")))
            }
            _ => return Err(Error::UnsupportedRoute(format!("{route:?} is not available for this system"))),
        };
        let mut fs = Self {
            system: system.clone(),
            route,
            quadrature_nodes: 0,
            fd_step_scale: DEFAULT_FD_STEP,
            outer: OuterLaplacian::Reduced,
            omega: sphere_area(n),
            closed,
            rules: Rules { polar: Rule::default(), azimuth: 0, circle: 0, graded: Rule::default() },
        };
        fs.set_nodes(default_nodes(n));
        Ok(fs)
    }

    /// Quadrature route for any supported system.
    pub fn quadrature(system: &EllipticSystem) -> Result<Self> {
        Self::new(system, FundsolRoute::Quadrature)
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.set_nodes(nodes);
        self
    }

    pub fn with_fd_step(mut self, scale: f64) -> Self {
        self.fd_step_scale = scale;
        self
    }

    pub fn with_outer(mut self, outer: OuterLaplacian) -> Self {
        self.outer = outer;
        self
    }

    fn set_nodes(&mut self, nodes: usize) {
        let nodes = nodes.max(64);
        self.quadrature_nodes = nodes;
        let n_polar = ((nodes as f64 / 8.0).sqrt().floor() as usize).max(2);
        self.rules.polar = Rule::gauss_legendre(n_polar, 0.0, PI / 2.0);
        self.rules.azimuth = nodes / (2 * n_polar);
        self.rules.circle = (nodes / 16).max(16);
        let per_panel = 16;
        let levels = (nodes / (4 * per_panel)).clamp(8, 60);
        self.rules.graded = Rule::graded(levels, per_panel, -PI / 2.0, PI / 2.0);
    }

    pub fn system(&self) -> &EllipticSystem {
        &self.system
    }

    pub fn route(&self) -> FundsolRoute {
        self.route
    }

    pub fn quadrature_nodes(&self) -> usize {
        self.quadrature_nodes
    }

    pub fn fd_step_scale(&self) -> f64 {
        self.fd_step_scale
    }

    pub fn outer(&self) -> OuterLaplacian {
        self.outer
    }

    /// Principal square root of `det A_sym` used by the closed scalar form.
    pub fn sqrt_det(&self) -> Option<C64> {
        match self.closed {
            Closed::Scalar { sqrt_det, .. } => Some(sqrt_det),
            _ => None,
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.system.n() {
            return Err(Error::Shape(format!("point has length {}, expected {}", x.len(), self.system.n())));
        }
        let r = norm(x);
        if r == 0.0 {
            return Err(Error::OriginSingularity);
        }
        Ok(r)
    }

    pub fn eval(&self, x: &[f64]) -> Result<CMat> {
        let r = self.check_point(x)?;
        let n = x.len();
        Ok(match &self.closed {
            Closed::Scalar { inv, sqrt_det } => {
                let q = scalar_quadratic(inv, x);
                let v = if n == 2 {
                    q.ln() / (4.0 * PI * sqrt_det)
                } else {
                    -q.powf((2.0 - n as f64) / 2.0) / ((n as f64 - 2.0) * self.omega * sqrt_det)
                };
                CMat::from_element(1, 1, v)
            }
            Closed::Lame { mu, lambda } => {
                let (mu, la) = (*mu, *lambda);
                let k = 1.0 / (2.0 * mu * (2.0 * mu + la) * self.omega);
                CMat::from_fn(n, n, |g, b| {
                    let d = if g == b { 1.0 } else { 0.0 };
                    let v = if n == 2 {
                        k * ((3.0 * mu + la) * d * r.ln() - (mu + la) * x[g] * x[b] / (r * r))
                    } else {
                        -k * ((3.0 * mu + la) / (n as f64 - 2.0) * d * r.powi(2 - n as i32)
                            + (mu + la) * x[g] * x[b] * r.powi(-(n as i32)))
                    };
                    c(v)
                })
            }
            Closed::None => match self.outer {
                OuterLaplacian::Reduced => self.reduced(x, r)?,
                OuterLaplacian::Stencil => {
                    let h = self.fd_step_scale * r;
                    let f0 = self.sphere_integral(x)?;
                    let mut lap = CMat::zeros(f0.nrows(), f0.ncols());
                    let mut y = x.to_vec();
                    for k in 0..n {
                        y[k] = x[k] + h;
                        lap += self.sphere_integral(&y)?;
                        y[k] = x[k] - h;
                        lap += self.sphere_integral(&y)?;
                        y[k] = x[k];
                        lap -= &f0 * c(2.0);
                    }
                    let pref = if n == 3 { -1.0 / (16.0 * PI * PI) } else { 1.0 / (8.0 * PI * PI) };
                    lap * c(pref / (h * h))
                }
            },
        })
    }

    /// `d_r E` for `r = 0..n`.
    pub fn grad(&self, x: &[f64]) -> Result<Vec<CMat>> {
        let r = self.check_point(x)?;
        let n = x.len();
        match &self.closed {
            Closed::Scalar { inv, sqrt_det } => {
                let q = scalar_quadratic(inv, x);
                let qn = q.powf(-(n as f64) / 2.0) / (self.omega * sqrt_det);
                Ok((0..n)
                    .map(|k| {
                        let ax: C64 = (0..n).map(|j| inv[(k, j)] * x[j]).sum();
                        CMat::from_element(1, 1, qn * ax)
                    })
                    .collect())
            }
            Closed::Lame { mu, lambda } => {
                let (mu, la) = (*mu, *lambda);
                let k = -1.0 / (2.0 * mu * (2.0 * mu + la) * self.omega);
                let rn = r.powi(-(n as i32));
                let rn2 = rn / (r * r);
                let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
                Ok((0..n)
                    .map(|rr| {
                        CMat::from_fn(n, n, |g, b| {
                            c(k * (-(3.0 * mu + la) * d(g, b) * x[rr] * rn
                                + (mu + la) * (d(rr, g) * x[b] + d(rr, b) * x[g]) * rn
                                - n as f64 * (mu + la) * x[g] * x[rr] * x[b] * rn2))
                        })
                    })
                    .collect())
            }
            Closed::None => self.grad_fd(x, self.fd_step_scale * r),
        }
    }

    /// Central differences of `E` with step `h`.
    pub fn grad_fd(&self, x: &[f64], h: f64) -> Result<Vec<CMat>> {
        let mut y = x.to_vec();
        (0..x.len())
            .map(|k| {
                y[k] = x[k] + h;
                let plus = self.eval(&y)?;
                y[k] = x[k] - h;
                let minus = self.eval(&y)?;
                y[k] = x[k];
                Ok((plus - minus) * c(0.5 / h))
            })
            .collect()
    }

    fn inverse_plane_symbol(&self, xi: &[f64]) -> Result<CMat> {
        invert(&self.system.tensor.contract(xi)).ok_or_else(|| Error::SingularSymbol(xi.to_vec()))
    }

    /// `E` with the outer Laplacian taken exactly under the integral.
    fn reduced(&self, x: &[f64], r: f64) -> Result<CMat> {
        let m = self.system.m();
        let mut acc = CMat::zeros(m, m);
        if x.len() == 3 {
            let e = [x[0] / r, x[1] / r, x[2] / r];
            let (u, v) = orthonormal_frame(&e);
            let k = self.rules.circle;
            for j in 0..k {
                let th = PI * j as f64 / k as f64;
                let (s, co) = th.sin_cos();
                let xi = [co * u[0] + s * v[0], co * u[1] + s * v[1], co * u[2] + s * v[2]];
                acc += self.inverse_plane_symbol(&xi)?;
            }
            // full circle = twice the half circle by evenness
            Ok(acc * c(-(2.0 * PI / k as f64) / (8.0 * PI * PI * r)))
        } else {
            let th0 = x[1].atan2(x[0]);
            for (phi, w) in self.rules.graded.iter() {
                let xi = [(th0 + phi).cos(), (th0 + phi).sin()];
                let t = (r * phi.cos()).abs();
                acc += self.inverse_plane_symbol(&xi)? * c(w * (2.0 * t.ln() + 3.0));
            }
            Ok(acc * c(2.0 / (8.0 * PI * PI)))
        }
    }

    /// The plane-wave integral before the outer Laplacian.
    fn sphere_integral(&self, x: &[f64]) -> Result<CMat> {
        let m = self.system.m();
        let r = norm(x);
        let mut acc = CMat::zeros(m, m);
        if x.len() == 3 {
            let e = [x[0] / r, x[1] / r, x[2] / r];
            let (u, v) = orthonormal_frame(&e);
            let k = self.rules.azimuth;
            let dphi = 2.0 * PI / k as f64;
            for (th, w) in self.rules.polar.iter() {
                let (st, ct) = th.sin_cos();
                let mut ring = CMat::zeros(m, m);
                for j in 0..k {
                    let (sp, cp) = (dphi * j as f64).sin_cos();
                    let xi = [
                        ct * e[0] + st * (cp * u[0] + sp * v[0]),
                        ct * e[1] + st * (cp * u[1] + sp * v[1]),
                        ct * e[2] + st * (cp * u[2] + sp * v[2]),
                    ];
                    ring += self.inverse_plane_symbol(&xi)?;
                }
                // |x.xi| = r cos(theta); both hemispheres agree by evenness
                acc += ring * c(2.0 * w * dphi * st * r * ct);
            }
        } else {
            let th0 = x[1].atan2(x[0]);
            for (phi, w) in self.rules.graded.iter() {
                let xi = [(th0 + phi).cos(), (th0 + phi).sin()];
                let t = r * phi.cos();
                acc += self.inverse_plane_symbol(&xi)? * c(2.0 * w * t * t * t.abs().ln());
            }
        }
        Ok(acc)
    }
}

/// `((A_sym)^{-1} x) . x`, asserting the positive real part that keeps the
/// principal branch away from its cut.
fn scalar_quadratic(inv: &CMat, x: &[f64]) -> C64 {
    let n = x.len();
    let q: C64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| inv[(i, j)] * x[i] * x[j]).sum();
    assert!(q.re > 0.0, "quadratic form left the right half-plane: {q}");
    q
}

/// `(sum a^{ab}_{rs} d_r d_s F_{b.})` by fourth-order central differences,
/// together with an entrywise Hessian size used to normalize it.
pub fn apply_operator_fd(
    system: &EllipticSystem,
    f: &dyn Fn(&[f64]) -> Result<CMat>,
    x: &[f64],
    h: f64,
) -> Result<(CMat, CMat)> {
    const SECOND: [(f64, f64); 5] = [(-2.0, -1.0), (-1.0, 16.0), (0.0, -30.0), (1.0, 16.0), (2.0, -1.0)];
    const FIRST: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
    let n = system.n();
    let f0 = f(x)?;
    let cols = f0.ncols();
    let m = system.m();
    let mut out = CMat::zeros(m, cols);
    let mut scale = CMat::zeros(m, cols);
    let amax = system.tensor.entries().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut y = x.to_vec();
    let mut at = |dr: &[(usize, f64)]| -> Result<CMat> {
        y.copy_from_slice(x);
        for (k, d) in dr {
            y[*k] += d;
        }
        f(&y)
    };
    for r in 0..n {
        for s in 0..n {
            let mut d2 = CMat::zeros(m, cols);
            if r == s {
                for (o, w) in SECOND {
                    d2 += at(&[(r, o * h)])? * c(w / (12.0 * h * h));
                }
            } else {
                for (o1, w1) in FIRST {
                    for (o2, w2) in FIRST {
                        d2 += at(&[(r, o1 * h), (s, o2 * h)])? * c(w1 * w2 / (144.0 * h * h));
                    }
                }
            }
            let a = system.tensor.block(r, s);
            out += &a * &d2;
            scale += d2.map(|z| c(z.norm() * amax));
        }
    }
    Ok((out, scale))
}

/// Worst relative residual of `L E = 0` at the given points.
pub fn pde_residual(fs: &FundamentalSolution, points: &[Vec<f64>], step_scale: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in points {
        let h = step_scale * norm(x);
        let (res, scale) = apply_operator_fd(fs.system(), &|y| fs.eval(y), x, h)?;
        worst = worst.max(max_abs(&res) / max_abs(&scale));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfcheckReport {
    pub compared_with: String,
    pub nodes: usize,
    pub outer: OuterLaplacian,
    /// Worst relative error against the closed form on `0.5 <= |x| <= 2`
    /// (after removing a best-fit constant per entry when `n = 2`).
    pub max_rel_error: Option<f64>,
    /// Worst relative residual of `L E = 0` on the same annulus.
    pub pde_residual: f64,
}

/// Sample points on the annulus `0.5 <= |x| <= 2`.
pub fn annulus_points(n: usize, per_shell: usize) -> Vec<Vec<f64>> {
    [0.5, 0.8, 1.0, 1.37, 2.0]
        .iter()
        .flat_map(|&rad| {
            sphere_points(n, per_shell, 7).into_iter().map(move |p| p.iter().map(|v| v * rad).collect::<Vec<_>>())
        })
        .collect()
}

/// Compare the quadrature route against the closed forms where available.
pub fn quadrature_selfcheck(fs: &FundamentalSolution) -> Result<SelfcheckReport> {
    let system = fs.system();
    let n = system.n();
    let points = annulus_points(n, if n == 2 { 16 } else { 12 });
    let closed = match system.kind {
        SystemKind::General => None,
        _ => Some(FundamentalSolution::for_system(system)?),
    };
    let max_rel_error = match &closed {
        None => None,
        Some(cl) => {
            let diffs: Vec<(CMat, CMat)> =
                points.iter().map(|x| Ok((fs.eval(x)?, cl.eval(x)?))).collect::<Result<_>>()?;
            let m = system.m();
            let offset = if n == 2 {
                let mut mean = CMat::zeros(m, m);
                for (q, e) in &diffs {
                    mean += q - e;
                }
                mean / c(diffs.len() as f64)
            } else {
                CMat::zeros(m, m)
            };
            let scale = diffs.iter().map(|(_, e)| max_abs(e)).fold(0.0, f64::max);
            let worst = diffs
                .iter()
                .map(|(q, e)| {
                    let denom = if n == 2 { scale } else { max_abs(e) };
                    max_abs(&(q - e - &offset)) / denom
                })
                .fold(0.0, f64::max);
            Some(worst)
        }
    };
    let pde = pde_residual(fs, &points[..points.len().min(24)], 1e-3)?;
    Ok(SelfcheckReport {
        compared_with: match &closed {
            Some(cl) => format!("{:?}", cl.route()),
            None => "pde_residual".into(),
        },
        nodes: fs.quadrature_nodes(),
        outer: fs.outer(),
        max_rel_error,
        pde_residual: pde,
    })
}
