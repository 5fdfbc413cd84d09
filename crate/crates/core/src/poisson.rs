//! Poisson kernels `P`, their extensions `K(x', t) = t^{1-n} P(x'/t)` and the
//! conjugate kernels `K_j`.

use crate::elliptic::{conormal_contraction, conormal_residual, EllipticSystem, SystemKind};
use crate::error::{Error, Result};
use crate::fundsol::{apply_operator_fd, FundamentalSolution, FundsolRoute};
use crate::linalg::{c, identity, invert, max_abs, norm, sphere_area, CMat, C64};
use crate::quadrature::sphere_points;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Largest conormal residual accepted before building a kernel from `E`.
pub const CONORMAL_GATE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelRoute {
    ClosedHarmonic,
    ClosedScalar,
    ClosedLame,
    FromFundsol,
}

#[derive(Debug, Clone)]
enum Form {
    Harmonic,
    Scalar { inv: CMat, sqrt_det: C64 },
    Lame { mu: f64, lambda: f64 },
    Fundsol(Box<FundamentalSolution>),
}

#[derive(Debug, Clone)]
pub struct PoissonKernel {
    system: EllipticSystem,
    route: KernelRoute,
    form: Form,
    omega: f64,
}

impl PoissonKernel {
    /// Closed form matching the system kind.
    pub fn closed(system: &EllipticSystem) -> Result<Self> {
        let route = match system.kind {
            _ if system.is_laplacian() => KernelRoute::ClosedHarmonic,
            SystemKind::Scalar { .. } => KernelRoute::ClosedScalar,
            SystemKind::Lame { .. } => KernelRoute::ClosedLame,
            SystemKind::General => KernelRoute::FromFundsol,
        };
        build_kernel(system, route)
    }

    pub fn system(&self) -> &EllipticSystem {
        &self.system
    }

    pub fn route(&self) -> KernelRoute {
        self.route
    }

    pub fn n(&self) -> usize {
        self.system.n()
    }

    pub fn m(&self) -> usize {
        self.system.m()
    }

    pub fn fundsol(&self) -> Option<&FundamentalSolution> {
        match &self.form {
            Form::Fundsol(fs) => Some(fs),
            _ => None,
        }
    }

    /// `P(x')`.
    pub fn eval_p(&self, xp: &[f64]) -> Result<CMat> {
        let n = self.n();
        if xp.len() + 1 != n {
            return Err(Error::Shape(format!("x' has length {}, expected {}", xp.len(), n - 1)));
        }
        let rho2: f64 = xp.iter().map(|v| v * v).sum();
        let w = 1.0 + rho2;
        Ok(match &self.form {
            Form::Harmonic => CMat::from_element(1, 1, c(2.0 / self.omega / w.powf(n as f64 / 2.0))),
            Form::Scalar { inv, sqrt_det } => {
                let mut x = xp.to_vec();
                x.push(1.0);
                let q: C64 =
                    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| inv[(i, j)] * x[i] * x[j]).sum();
                CMat::from_element(1, 1, c(2.0 / self.omega) / (sqrt_det * q.powf(n as f64 / 2.0)))
            }
            Form::Lame { mu, lambda } => {
                let (mu, la) = (*mu, *lambda);
                let mut x = xp.to_vec();
                x.push(1.0);
                let a = 4.0 * mu / (3.0 * mu + la) / self.omega / w.powf(n as f64 / 2.0);
                let b = (mu + la) / (3.0 * mu + la) * (2.0 * n as f64 / self.omega) / w.powf((n as f64 + 2.0) / 2.0);
                CMat::from_fn(n, n, |al, be| c(if al == be { a } else { 0.0 } + b * x[al] * x[be]))
            }
            Form::Fundsol(_) => {
                let mut x = xp.to_vec();
                x.push(1.0);
                self.conormal_of_gradient(&x)?
            }
        })
    }

    /// `2 a^{ba}_{rn} (d_r E_{gb})(x)`.
    fn conormal_of_gradient(&self, x: &[f64]) -> Result<CMat> {
        let Form::Fundsol(fs) = &self.form else {
            return Err(Error::UnsupportedRoute("kernel is not built from E".into()));
        };
        let grad =
            if fs.route() == FundsolRoute::Quadrature { fs.grad_fd(x, 1e-4 * norm(x).max(1.0))? } else { fs.grad(x)? };
        Ok(conormal_contraction(&self.system, &grad) * c(2.0))
    }

    /// `K(x', t) = t^{1-n} P(x'/t)`.
    pub fn eval_k(&self, xp: &[f64], t: f64) -> Result<CMat> {
        if t <= 0.0 {
            return Err(Error::NonpositiveTime(t));
        }
        let scaled: Vec<f64> = xp.iter().map(|v| v / t).collect();
        Ok(self.eval_p(&scaled)? * c(t.powi(1 - self.n() as i32)))
    }

    /// `2 a^{ba}_{rn} (d_r E_{gb})(x', t)` evaluated directly (kernels built from `E`).
    pub fn eval_k_direct(&self, xp: &[f64], t: f64) -> Result<CMat> {
        if t <= 0.0 {
            return Err(Error::NonpositiveTime(t));
        }
        let mut x = xp.to_vec();
        x.push(t);
        self.conormal_of_gradient(&x)
    }
}

pub fn build_kernel(system: &EllipticSystem, route: KernelRoute) -> Result<PoissonKernel> {
    let n = system.n();
    let form = match (route, &system.kind) {
        (KernelRoute::ClosedHarmonic, _) if system.is_laplacian() => Form::Harmonic,
        (KernelRoute::ClosedScalar, SystemKind::Scalar { sym, .. }) => Form::Scalar {
            inv: invert(sym).ok_or_else(|| Error::NotElliptic("singular A_sym".into()))?,
            sqrt_det: sym.determinant().sqrt(),
        },
        (KernelRoute::ClosedLame, SystemKind::Lame { mu, lambda }) => Form::Lame { mu: *mu, lambda: *lambda },
        (KernelRoute::FromFundsol, _) => {
            return from_fundsol(FundamentalSolution::for_system(system)?);
        }
        _ => return Err(Error::UnsupportedRoute(format!("{route:?} is not available for this system"))),
    };
    Ok(PoissonKernel { system: system.clone(), route, form, omega: sphere_area(n) })
}

/// Kernel `P = 2 a d E (., 1)` from a given fundamental solution, gated on
/// the conormal residual.
pub fn from_fundsol(fundsol: FundamentalSolution) -> Result<PoissonKernel> {
    let system = fundsol.system().clone();
    let n = system.n();
    let samples: Vec<Vec<f64>> = boundary_samples(n - 1, 16);
    let residual = conormal_residual(&system, &fundsol, &samples)?;
    if residual > CONORMAL_GATE {
        return Err(Error::ConormalViolated { residual, gate: CONORMAL_GATE });
    }
    Ok(PoissonKernel {
        omega: sphere_area(n),
        route: KernelRoute::FromFundsol,
        form: Form::Fundsol(Box::new(fundsol)),
        system,
    })
}

/// Points `x' != 0` at a few radii, for boundary diagnostics.
pub fn boundary_samples(d: usize, per_radius: usize) -> Vec<Vec<f64>> {
    let dirs: Vec<Vec<f64>> = if d == 1 { vec![vec![1.0], vec![-1.0]] } else { sphere_points(d, per_radius, 11) };
    [0.3, 1.0, 2.7].iter().flat_map(|&rad| dirs.iter().map(move |p| p.iter().map(|v| v * rad).collect())).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizationReport {
    /// Trapezoid integral over the box, row-major `M x M`, as `[re, im]`.
    pub box_integral: Vec<[f64; 2]>,
    /// Estimated contribution from outside the box.
    pub tail: Vec<[f64; 2]>,
    /// `|box + tail - I|` entrywise.
    pub deviation: Vec<f64>,
    /// Spread of the tail estimate between the fitted and raw decay profile.
    pub tail_uncertainty: f64,
    pub max_deviation: f64,
}

fn flat(m: &CMat) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

/// Trapezoid integral of `P` over `[-R, R]^{n-1}` plus a fitted tail; summed
/// in a fixed order so repeated runs agree bit for bit.
pub fn verify_normalization(kernel: &PoissonKernel, r_box: f64, h: f64) -> Result<NormalizationReport> {
    let n = kernel.n();
    let d = n - 1;
    let m = kernel.m();
    let k = (2.0 * r_box / h).round() as usize;
    let coord = |i: usize| -r_box + 2.0 * r_box * i as f64 / k as f64;
    let step = 2.0 * r_box / k as f64;
    let weight = |i: usize| if i == 0 || i == k { 0.5 } else { 1.0 };
    let box_integral = if d == 1 {
        (0..=k)
            .into_par_iter()
            .map(|i| Ok(kernel.eval_p(&[coord(i)])? * c(weight(i) * step)))
            .collect::<Result<Vec<CMat>>>()?
            .into_iter()
            .fold(CMat::zeros(m, m), |a, b| a + b)
    } else {
        (0..=k)
            .into_par_iter()
            .map(|i| {
                let mut row = CMat::zeros(m, m);
                for j in 0..=k {
                    row += kernel.eval_p(&[coord(i), coord(j)])? * c(weight(i) * weight(j));
                }
                Ok(row * c(step * step))
            })
            .collect::<Result<Vec<CMat>>>()?
            .into_iter()
            .fold(CMat::zeros(m, m), |a, b| a + b)
    };
    // angular profile of |x'|^n P(x') fitted on R/2 <= |x'| <= R; the leading
    // correction is O(|x'|^{-2}), removed by one Richardson step
    let profile = |dir: &[f64], rad: f64| -> Result<CMat> {
        let x: Vec<f64> = dir.iter().map(|v| v * rad).collect();
        Ok(kernel.eval_p(&x)? * c(rad.powi(n as i32)))
    };
    let mut tail = CMat::zeros(m, m);
    let mut raw_tail = CMat::zeros(m, m);
    if d == 1 {
        for dir in [[1.0], [-1.0]] {
            let g1 = profile(&dir, r_box)?;
            let g2 = profile(&dir, r_box / 2.0)?;
            let fitted = (&g1 * c(4.0) - g2) * c(1.0 / 3.0);
            // int_R^inf rho^{-n} d rho
            let radial = r_box.powi(1 - n as i32) / (n as f64 - 1.0);
            tail += fitted * c(radial);
            raw_tail += g1 * c(radial);
        }
    } else {
        let angles = 512;
        for a in 0..angles {
            let th = 2.0 * PI * (a as f64 + 0.5) / angles as f64;
            let dir = [th.cos(), th.sin()];
            let g1 = profile(&dir, r_box)?;
            let g2 = profile(&dir, r_box / 2.0)?;
            let fitted = (&g1 * c(4.0) - g2) * c(1.0 / 3.0);
            // outside the square along this ray starts at R / max(|cos|, |sin|)
            let start = r_box / th.cos().abs().max(th.sin().abs());
            let radial = 2.0 * PI / angles as f64 / start;
            tail += fitted * c(radial);
            raw_tail += g1 * c(radial);
        }
    }
    let total = &box_integral + &tail;
    let dev = total - identity(m);
    let deviation: Vec<f64> = flat(&dev).iter().map(|[re, im]| re.hypot(*im)).collect();
    Ok(NormalizationReport {
        box_integral: flat(&box_integral),
        tail: flat(&tail),
        max_deviation: deviation.iter().copied().fold(0.0, f64::max),
        deviation,
        tail_uncertainty: max_abs(&(tail - raw_tail)),
    })
}

/// Worst relative residual of `L K_{.b} = 0` at interior points `(x', t)`.
pub fn verify_annihilation(kernel: &PoissonKernel, points: &[Vec<f64>], step: f64) -> Result<f64> {
    points
        .par_iter()
        .map(|x| {
            let t = x[x.len() - 1];
            if t < 0.2 {
                return Err(Error::Shape(format!("interior point needs t >= 0.2, got {t}")));
            }
            let f = |y: &[f64]| {
                let (yp, s) = y.split_at(y.len() - 1);
                kernel.eval_k(yp, s[0])
            };
            let (res, scale) = apply_operator_fd(kernel.system(), &f, x, step)?;
            Ok(max_abs(&res) / max_abs(&scale))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// `sup ||P(x')|| (1 + |x'|^2)^{n/2}` over sampled `|x'| <= radius`.
pub fn decay_constant(kernel: &PoissonKernel, radius: f64, radial_samples: usize) -> Result<f64> {
    let n = kernel.n();
    let d = n - 1;
    let dirs: Vec<Vec<f64>> = if d == 1 { vec![vec![1.0], vec![-1.0]] } else { sphere_points(d, 64, 3) };
    let mut worst: f64 = kernel.eval_p(&vec![0.0; d]).map(|p| max_abs(&p))?;
    for i in 0..radial_samples {
        let rad = 1e-2 * (radius / 1e-2).powf(i as f64 / (radial_samples - 1).max(1) as f64);
        for dir in &dirs {
            let x: Vec<f64> = dir.iter().map(|v| v * rad).collect();
            let p = kernel.eval_p(&x)?;
            worst = worst.max(max_abs(&p) * (1.0 + rad * rad).powf(n as f64 / 2.0));
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone)]
enum ConjForm {
    Scalar { inv: CMat, sqrt_det: C64 },
    Lame { mu: f64, lambda: f64 },
}

/// `K_j` on `R^n \ {0}`: the odd extension of `x_j P` through the boundary.
#[derive(Debug, Clone)]
pub struct ConjugateKernel {
    j: usize,
    n: usize,
    omega: f64,
    form: ConjForm,
    base: PoissonKernel,
}

pub fn build_conjugate(kernel: &PoissonKernel, j: usize) -> Result<ConjugateKernel> {
    let system = kernel.system();
    let n = system.n();
    if j + 1 >= n {
        return Err(Error::Shape(format!("tangential index {j} out of range for n = {n}")));
    }
    let form = match &system.kind {
        SystemKind::Scalar { sym, .. } => ConjForm::Scalar {
            inv: invert(sym).ok_or_else(|| Error::NotElliptic("singular A_sym".into()))?,
            sqrt_det: sym.determinant().sqrt(),
        },
        SystemKind::Lame { mu, lambda } => ConjForm::Lame { mu: *mu, lambda: *lambda },
        SystemKind::General => {
            return Err(Error::UnsupportedRoute("no closed conjugate kernel for general systems".into()))
        }
    };
    Ok(ConjugateKernel { j, n, omega: sphere_area(n), form, base: kernel.clone() })
}

impl ConjugateKernel {
    pub fn index(&self) -> usize {
        self.j
    }

    pub fn eval(&self, x: &[f64]) -> Result<CMat> {
        let n = self.n;
        if x.len() != n {
            return Err(Error::Shape(format!("point has length {}, expected {n}", x.len())));
        }
        let r = norm(x);
        if r == 0.0 {
            return Err(Error::OriginSingularity);
        }
        let xj = x[self.j];
        Ok(match &self.form {
            ConjForm::Scalar { inv, sqrt_det } => {
                let q: C64 =
                    (0..n).flat_map(|i| (0..n).map(move |k| (i, k))).map(|(i, k)| inv[(i, k)] * x[i] * x[k]).sum();
                CMat::from_element(1, 1, c(2.0 * xj / self.omega) / (sqrt_det * q.powf(n as f64 / 2.0)))
            }
            ConjForm::Lame { mu, lambda } => {
                let (mu, la) = (*mu, *lambda);
                let a = 4.0 * mu / (3.0 * mu + la) * xj / (self.omega * r.powi(n as i32));
                let b = (mu + la) / (3.0 * mu + la) * (2.0 * n as f64 / self.omega) * xj / r.powi(n as i32 + 2);
                CMat::from_fn(n, n, |al, be| c(if al == be { a } else { 0.0 } + b * x[al] * x[be]))
            }
        })
    }

    /// `t^{1-n} (x_j / t) P(x'/t)` for `t > 0`.
    pub fn eval_from_base(&self, xp: &[f64], t: f64) -> Result<CMat> {
        Ok(self.base.eval_k(xp, t)? * c(xp[self.j] / t))
    }

    /// First-order coefficient paired with this kernel in the conjugate
    /// generator formula.
    pub fn first_order(&self) -> CMat {
        let n = self.n;
        match &self.form {
            ConjForm::Scalar { .. } => {
                let SystemKind::Scalar { sym, .. } = &self.base.system.kind else {
                    unreachable!("scalar form comes from a scalar system")
                };
                CMat::from_element(1, 1, sym[(n - 1, self.j)] / sym[(n - 1, n - 1)])
            }
            ConjForm::Lame { mu, lambda } => {
                let k = (mu + lambda) / (3.0 * mu + lambda);
                let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                CMat::from_fn(n, n, |g, a| c(k * (d(g, n - 1) * d(self.j, a) + d(n - 1, a) * d(g, self.j))))
            }
        }
    }
}
