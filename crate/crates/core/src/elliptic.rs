//! Coefficient tensors, symbols, ellipticity and conormal diagnostics.

use crate::error::{Error, Result};
use crate::fundsol::FundamentalSolution;
use crate::linalg::{c, identity, invert, max_abs, min_hermitian_eigenvalue, CMat, C64};
use crate::quadrature::sphere_points;
use serde::{Deserialize, Serialize};

/// Default number of sphere samples used when certifying ellipticity.
pub const DEFAULT_SPHERE_SAMPLES: usize = 2000;

/// Coefficients `a^{ab}_{rs}` of `L u_a = d_r (a^{ab}_{rs} d_s u_b)`, indices zero-based.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTensor {
    n: usize,
    m: usize,
    a: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorJson {
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    a: Vec<[f64; 2]>,
}

impl CoefficientTensor {
    pub fn zeros(n: usize, m: usize) -> Self {
        Self { n, m, a: vec![C64::default(); n * n * m * m] }
    }

    pub fn from_fn(n: usize, m: usize, mut f: impl FnMut(usize, usize, usize, usize) -> C64) -> Self {
        let mut t = Self::zeros(n, m);
        for r in 0..n {
            for s in 0..n {
                for al in 0..m {
                    for be in 0..m {
                        let k = t.index(r, s, al, be);
                        t.a[k] = f(r, s, al, be);
                    }
                }
            }
        }
        t
    }

    /// Flat entries in `(r, s, alpha, beta)` row-major order.
    pub fn from_flat(n: usize, m: usize, a: Vec<C64>) -> Result<Self> {
        if n < 2 || m < 1 || a.len() != n * n * m * m {
            return Err(Error::Shape(format!(
                "tensor with n = {n}, M = {m} needs {} entries, got {}",
                n * n * m * m,
                a.len()
            )));
        }
        Ok(Self { n, m, a })
    }

    fn index(&self, r: usize, s: usize, al: usize, be: usize) -> usize {
        ((r * self.n + s) * self.m + al) * self.m + be
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &[C64] {
        &self.a
    }

    pub fn get(&self, r: usize, s: usize, al: usize, be: usize) -> C64 {
        self.a[self.index(r, s, al, be)]
    }

    /// The `M x M` block `(a^{ab}_{rs})_{ab}` for fixed `r, s`.
    pub fn block(&self, r: usize, s: usize) -> CMat {
        CMat::from_fn(self.m, self.m, |al, be| self.get(r, s, al, be))
    }

    /// `(xi_r xi_s a^{ab}_{rs})_{ab}`.
    pub fn contract(&self, xi: &[f64]) -> CMat {
        let mut q = CMat::zeros(self.m, self.m);
        for r in 0..self.n {
            for s in 0..self.n {
                let w = xi[r] * xi[s];
                if w == 0.0 {
                    continue;
                }
                for al in 0..self.m {
                    for be in 0..self.m {
                        q[(al, be)] += self.get(r, s, al, be) * w;
                    }
                }
            }
        }
        q
    }

    /// `(sum_r xi_r a^{ab}_{rs})_{ab}` for fixed `s`.
    pub fn contract_first(&self, xi: &[f64], s: usize) -> CMat {
        let mut q = CMat::zeros(self.m, self.m);
        for (r, &x) in xi.iter().enumerate() {
            q += self.block(r, s) * c(x);
        }
        q
    }

    /// Tensor of the transposed operator: `a^{ba}_{sr}`.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, self.m, |r, s, al, be| self.get(s, r, be, al))
    }

    pub fn laplacian(n: usize) -> Self {
        Self::from_fn(n, 1, |r, s, _, _| c(if r == s { 1.0 } else { 0.0 }))
    }

    /// Scalar tensor `a^{11}_{rs} = A_{rs}`.
    pub fn scalar(a: &CMat) -> Self {
        Self::from_fn(a.nrows(), 1, |r, s, _, _| a[(r, s)])
    }

    /// Lamé tensor whose conormal derivative has the vanishing property.
    pub fn lame(mu: f64, lambda: f64, n: usize) -> Self {
        let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        let k1 = (lambda + mu) * (2.0 * mu + lambda) / (3.0 * mu + lambda);
        let k2 = mu * (lambda + mu) / (3.0 * mu + lambda);
        // entry a^{al be}_{rs}: swap roles in the beta-alpha form
        Self::from_fn(n, n, |r, s, al, be| {
            c(mu * d(r, s) * d(al, be) + k1 * d(r, al) * d(s, be) + k2 * d(r, be) * d(s, al))
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = TensorJson { n: self.n, m: self.m, a: self.a.iter().map(|z| [z.re, z.im]).collect() };
        serde_json::to_value(j).expect("tensor serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: TensorJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_flat(j.n, j.m, j.a.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

/// Which closed forms apply to a system.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemKind {
    General,
    /// Scalar operator `div A grad`; `sym` is `(A + A^T)/2`, `raw` the matrix as given.
    Scalar {
        raw: CMat,
        sym: CMat,
    },
    Lame {
        mu: f64,
        lambda: f64,
    },
}

/// Block structure `L = d_n^2 + L'` with tangential blocks `B_{rs}`, `r, s < n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSplit {
    tangential: Vec<CMat>,
    dim: usize,
    /// `b_{rs}` when every tangential block is a multiple of the identity.
    scalar: Option<Vec<C64>>,
}

impl BlockSplit {
    pub fn block(&self, r: usize, s: usize) -> &CMat {
        &self.tangential[r * self.dim + s]
    }

    pub fn scalar_coefficients(&self) -> Option<&[C64]> {
        self.scalar.as_deref()
    }

    /// `b(xi') = sum_{r,s} b_{rs} xi_r xi_s` for a scalar tangential symbol.
    pub fn scalar_symbol(&self, xi: &[f64]) -> Option<C64> {
        let b = self.scalar.as_ref()?;
        let mut acc = C64::default();
        for r in 0..self.dim {
            for s in 0..self.dim {
                acc += b[r * self.dim + s] * xi[r] * xi[s];
            }
        }
        Some(acc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticSystem {
    pub tensor: CoefficientTensor,
    pub kappa_lower: f64,
    pub block_split: Option<BlockSplit>,
    pub kind: SystemKind,
}

impl EllipticSystem {
    /// A general system, certified strongly elliptic on a sphere sample.
    pub fn new(tensor: CoefficientTensor) -> Result<Self> {
        Self::with_kind(tensor, SystemKind::General)
    }

    fn with_kind(tensor: CoefficientTensor, kind: SystemKind) -> Result<Self> {
        let block_split = detect_block_split(&tensor);
        let mut sys = Self { tensor, kappa_lower: 0.0, block_split, kind };
        sys.kappa_lower = ellipticity_constant(&sys, DEFAULT_SPHERE_SAMPLES)?;
        Ok(sys)
    }

    pub fn laplacian(n: usize) -> Self {
        make_scalar_system(&identity(n)).expect("the Laplacian is elliptic")
    }

    pub fn n(&self) -> usize {
        self.tensor.n()
    }

    pub fn m(&self) -> usize {
        self.tensor.m()
    }

    pub fn is_laplacian(&self) -> bool {
        self.tensor == CoefficientTensor::laplacian(self.n())
    }

    /// Same operator written with the raw (possibly non-symmetric) scalar matrix.
    pub fn with_raw_representative(&self) -> Self {
        match &self.kind {
            SystemKind::Scalar { raw, .. } => Self {
                tensor: CoefficientTensor::scalar(raw),
                block_split: detect_block_split(&CoefficientTensor::scalar(raw)),
                ..self.clone()
            },
            _ => self.clone(),
        }
    }

    /// Transposed operator `L^T`.
    pub fn transpose(&self) -> Result<Self> {
        let kind = match &self.kind {
            SystemKind::Scalar { raw, sym } => SystemKind::Scalar { raw: raw.transpose(), sym: sym.clone() },
            k => k.clone(),
        };
        Self::with_kind(self.tensor.transpose(), kind)
    }

    /// `B = (a^{st}_{nn})`.
    pub fn normal_block(&self) -> CMat {
        let n = self.n();
        self.tensor.block(n - 1, n - 1)
    }

    /// `B^{-1} (a^{ba}_{ns})_{ba}`, the coefficient of `d_s f` in the first-order part
    /// of the Dirichlet-to-Normal map.
    pub fn first_order_matrix(&self, s: usize) -> Result<CMat> {
        let n = self.n();
        let b_inv = invert(&self.normal_block()).ok_or_else(|| Error::SingularSymbol(unit(n, n - 1)))?;
        Ok(b_inv * self.tensor.block(n - 1, s))
    }

    /// Parse `laplacian`, `laplacian:<n>`, `scalar:<4 or 6 numbers>`,
    /// `lame:<mu>:<lambda>[:<n>]`; `n` is the fallback dimension.
    pub fn from_preset(spec: &str, n: usize) -> Result<Self> {
        let mut parts = spec.split(':');
        let head = parts.next().unwrap_or_default();
        let nums: Vec<f64> = parts
            .flat_map(|p| p.split(','))
            .filter(|p| !p.trim().is_empty())
            .map(|p| p.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{p}` in `{spec}`"))))
            .collect::<Result<_>>()?;
        match head {
            "laplacian" => match nums.as_slice() {
                [] => Ok(Self::laplacian(n)),
                [k] if *k >= 2.0 && k.fract() == 0.0 => Ok(Self::laplacian(*k as usize)),
                _ => Err(Error::Parse(format!("bad laplacian preset `{spec}`"))),
            },
            "scalar" => {
                let a = match nums.as_slice() {
                    [a11, a12, a21, a22] => CMat::from_row_slice(2, 2, &[c(*a11), c(*a12), c(*a21), c(*a22)]),
                    [a11, a12, a13, a22, a23, a33] => CMat::from_row_slice(
                        3,
                        3,
                        &[c(*a11), c(*a12), c(*a13), c(*a12), c(*a22), c(*a23), c(*a13), c(*a23), c(*a33)],
                    ),
                    _ => {
                        return Err(Error::Parse(format!(
                            "scalar preset needs 4 (2x2 row-major) or 6 (3x3 upper triangle) numbers: `{spec}`"
                        )))
                    }
                };
                make_scalar_system(&a)
            }
            "lame" => match nums.as_slice() {
                [mu, lambda] => make_lame_system(*mu, *lambda, n),
                [mu, lambda, k] if *k >= 2.0 && k.fract() == 0.0 => make_lame_system(*mu, *lambda, *k as usize),
                _ => Err(Error::Parse(format!("bad lame preset `{spec}`"))),
            },
            _ => Err(Error::Parse(format!("unknown system preset `{spec}`"))),
        }
    }
}

fn unit(n: usize, k: usize) -> Vec<f64> {
    (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect()
}

fn detect_block_split(t: &CoefficientTensor) -> Option<BlockSplit> {
    let (n, m) = (t.n(), t.m());
    let tol = 1e-14;
    if max_abs(&(t.block(n - 1, n - 1) - identity(m))) > tol {
        return None;
    }
    for r in 0..n - 1 {
        if max_abs(&t.block(r, n - 1)) > tol || max_abs(&t.block(n - 1, r)) > tol {
            return None;
        }
    }
    let dim = n - 1;
    let tangential: Vec<CMat> = (0..dim * dim).map(|k| t.block(k / dim, k % dim)).collect();
    let scalar = tangential
        .iter()
        .map(|b| {
            let z = b[(0, 0)];
            (max_abs(&(b - identity(m) * z)) <= tol).then_some(z)
        })
        .collect::<Option<Vec<_>>>();
    Some(BlockSplit { tangential, dim, scalar })
}

pub fn make_scalar_system(a: &CMat) -> Result<EllipticSystem> {
    let n = a.nrows();
    if n < 2 || a.ncols() != n {
        return Err(Error::Shape(format!("scalar matrix must be square with n >= 2, got {}x{}", a.nrows(), a.ncols())));
    }
    let sym = (a + a.transpose()) * c(0.5);
    for xi in sphere_points(n, DEFAULT_SPHERE_SAMPLES, 0) {
        let q: C64 = (0..n).flat_map(|r| (0..n).map(move |s| (r, s))).map(|(r, s)| a[(r, s)] * xi[r] * xi[s]).sum();
        if q.re <= 0.0 {
            return Err(Error::NotElliptic(format!("Re[a_rs xi_r xi_s] = {:.3e} at xi = {xi:?}", q.re)));
        }
    }
    EllipticSystem::with_kind(CoefficientTensor::scalar(&sym), SystemKind::Scalar { raw: a.clone(), sym })
}

pub fn make_lame_system(mu: f64, lambda: f64, n: usize) -> Result<EllipticSystem> {
    if !(mu > 0.0 && 2.0 * mu + lambda > 0.0) || n < 2 {
        return Err(Error::BadModuli { mu, lambda });
    }
    EllipticSystem::with_kind(CoefficientTensor::lame(mu, lambda, n), SystemKind::Lame { mu, lambda })
}

/// `Symb(xi) = -(xi_r xi_s a^{ab}_{rs})` together with its inverse.
#[derive(Debug, Clone)]
pub struct SymbolMatrix {
    pub xi: Vec<f64>,
    pub value: CMat,
    pub inverse: CMat,
}

pub fn symbol(system: &EllipticSystem, xi: &[f64]) -> Result<SymbolMatrix> {
    if xi.len() != system.n() {
        return Err(Error::Shape(format!("xi has length {}, expected {}", xi.len(), system.n())));
    }
    if xi.iter().all(|x| *x == 0.0) {
        return Err(Error::SingularSymbol(xi.to_vec()));
    }
    let value = -system.tensor.contract(xi);
    let inverse = invert(&value).ok_or_else(|| Error::SingularSymbol(xi.to_vec()))?;
    Ok(SymbolMatrix { xi: xi.to_vec(), value, inverse })
}

/// Minimum over the sample of the smallest eigenvalue of the Hermitian part of `-Symb`.
pub fn ellipticity_constant(system: &EllipticSystem, sphere_samples: usize) -> Result<f64> {
    let points = sphere_points(system.n(), sphere_samples.max(100), 0);
    ellipticity_constant_on(system, &points)
}

/// As [`ellipticity_constant`] on caller-supplied unit directions.
pub fn ellipticity_constant_on(system: &EllipticSystem, points: &[Vec<f64>]) -> Result<f64> {
    let kappa = points
        .iter()
        .map(|xi| {
            let q = system.tensor.contract(xi);
            min_hermitian_eigenvalue(&q) / crate::linalg::dot(xi, xi)
        })
        .fold(f64::INFINITY, f64::min);
    if kappa > 0.0 {
        Ok(kappa)
    } else {
        Err(Error::NotElliptic(format!("sampled ellipticity constant {kappa:.3e}")))
    }
}

/// `max |a^{ba}_{rn} (d_r E_{gb})(x', 0)| |x'|^{n-1}` over samples and `a, g`.
pub fn conormal_residual(system: &EllipticSystem, fundsol: &FundamentalSolution, samples: &[Vec<f64>]) -> Result<f64> {
    let n = system.n();
    let mut worst: f64 = 0.0;
    for xp in samples {
        let mut x = xp.clone();
        x.push(0.0);
        let grad = fundsol.grad(&x)?;
        let scale = crate::linalg::norm(xp).powi(n as i32 - 1);
        worst = worst.max(max_abs(&conormal_contraction(system, &grad)) * scale);
    }
    Ok(worst)
}

/// `(sum_{b,r} a^{ba}_{rn} G_r[g, b])_{g a}` for a gradient `G_r = d_r E`.
pub fn conormal_contraction(system: &EllipticSystem, grad: &[CMat]) -> CMat {
    let n = system.n();
    let mut out = CMat::zeros(system.m(), system.m());
    for (r, g) in grad.iter().enumerate() {
        out += g * system.tensor.block(r, n - 1);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SymbolConditionReport {
    /// Worst residual of the pointwise condition over the sphere sample.
    pub pointwise: f64,
    /// Worst residual of the circle-integral condition (`n = 2` only).
    pub circle: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Residuals of the sufficient symbol conditions for conormal vanishing.
pub fn check_symbol_conditions(
    system: &EllipticSystem,
    sphere_samples: usize,
    tolerance: f64,
) -> Result<SymbolConditionReport> {
    let n = system.n();
    let t = &system.tensor;
    let residuals_at = |xi: &[f64]| -> Result<(f64, Vec<CMat>)> {
        let s_mat = symbol(system, xi)?.inverse;
        let ds: Vec<CMat> = (0..n)
            .map(|k| {
                // d Symb / d xi_k = -(sum_s a_{ks} xi_s + sum_r a_{rk} xi_r)
                let mut d = CMat::zeros(t.m(), t.m());
                for (j, &x) in xi.iter().enumerate() {
                    d -= (t.block(k, j) + t.block(j, k)) * c(x);
                }
                -(&s_mat * d * &s_mat)
            })
            .collect();
        let y: Vec<CMat> = (0..n).map(|s| t.contract_first(xi, s)).collect();
        let mut worst: f64 = 0.0;
        for s in 0..n {
            for sp in 0..n {
                let r = &s_mat * (t.block(sp, s) - t.block(s, sp)) + &ds[sp] * &y[s] - &ds[s] * &y[sp];
                worst = worst.max(max_abs(&r));
            }
        }
        let circle_terms: Vec<CMat> = if n == 2 {
            (0..n * n)
                .map(|k| {
                    let (s, sp) = (k / n, k % n);
                    &s_mat * (&y[s] * c(xi[sp]) - &y[sp] * c(xi[s]))
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok((worst, circle_terms))
    };
    let mut pointwise: f64 = 0.0;
    for xi in sphere_points(n, sphere_samples.max(100), 0) {
        pointwise = pointwise.max(residuals_at(&xi)?.0);
    }
    let circle = if n == 2 {
        let nodes = sphere_samples.max(512);
        let w = 2.0 * std::f64::consts::PI / nodes as f64;
        let mut acc = vec![CMat::zeros(t.m(), t.m()); 4];
        for xi in sphere_points(2, nodes, 0) {
            for (a, term) in acc.iter_mut().zip(residuals_at(&xi)?.1) {
                *a += term * c(w);
            }
        }
        Some(acc.iter().map(max_abs).fold(0.0, f64::max))
    } else {
        None
    };
    let pass = pointwise <= tolerance && circle.is_none_or(|v| v <= tolerance);
    Ok(SymbolConditionReport { pointwise, circle, tolerance, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: usize, v: &[f64]) -> CMat {
        CMat::from_row_slice(rows, rows, &v.iter().map(|x| c(*x)).collect::<Vec<_>>())
    }

    #[test]
    fn laplacian_kappa_is_one() {
        let s = EllipticSystem::laplacian(3);
        assert_eq!(s.kappa_lower, 1.0);
        assert!(s.is_laplacian());
        assert!(s.block_split.is_some());
    }

    #[test]
    fn scalar_symmetrizes() {
        let s = make_scalar_system(&real(2, &[2.0, 1.0, 0.0, 2.0])).unwrap();
        assert_eq!(s.tensor.get(0, 1, 0, 0), c(0.5));
        assert_eq!(s.tensor.get(1, 0, 0, 0), c(0.5));
        assert_eq!(s.tensor.get(0, 0, 0, 0), c(2.0));
    }

    #[test]
    fn non_elliptic_scalar_rejected() {
        let e = make_scalar_system(&real(2, &[1.0, 3.0, 0.0, 1.0]));
        assert!(matches!(e, Err(Error::NotElliptic(_))));
    }

    #[test]
    fn lame_normal_block() {
        let s = make_lame_system(1.0, 1.0, 3).unwrap();
        let b = s.normal_block();
        let expect = real(3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 3.0]);
        assert!(max_abs(&(b - expect)) < 1e-15);
    }

    #[test]
    fn lame_degenerate_cross_terms_vanish() {
        let s = make_lame_system(1.0, -1.0, 2).unwrap();
        let t = CoefficientTensor::from_fn(2, 2, |r, s, a, b| c(if r == s && a == b { 1.0 } else { 0.0 }));
        assert_eq!(s.tensor, t);
    }

    #[test]
    fn bad_moduli() {
        assert!(matches!(make_lame_system(0.0, 1.0, 3), Err(Error::BadModuli { .. })));
        assert!(matches!(make_lame_system(1.0, -2.5, 3), Err(Error::BadModuli { .. })));
    }

    #[test]
    fn symbol_examples() {
        let lap = EllipticSystem::laplacian(2);
        let s = symbol(&lap, &[3.0, 4.0]).unwrap();
        assert_eq!(s.value[(0, 0)], c(-25.0));
        assert!((s.inverse[(0, 0)] - c(-0.04)).norm() < 1e-16);
        let lame = make_lame_system(1.0, 1.0, 2).unwrap();
        let s = symbol(&lame, &[1.0, 0.0]).unwrap();
        assert!(max_abs(&(s.value - real(2, &[-3.0, 0.0, 0.0, -1.0]))) < 1e-15);
        assert!(matches!(symbol(&lap, &[0.0, 0.0]), Err(Error::SingularSymbol(_))));
    }

    #[test]
    fn ellipticity_examples() {
        let lame = make_lame_system(1.0, 1.0, 3).unwrap();
        assert!((lame.kappa_lower - 1.0).abs() < 1e-12);
        let s = make_scalar_system(&real(2, &[1.0, 0.0, 0.0, 4.0])).unwrap();
        assert!((s.kappa_lower - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symbol_conditions() {
        for n in [2, 3] {
            let r = check_symbol_conditions(&EllipticSystem::laplacian(n), 400, 1e-12).unwrap();
            assert!(r.pass, "{r:?}");
            let r = check_symbol_conditions(&make_lame_system(1.0, 1.0, n).unwrap(), 400, 1e-8).unwrap();
            assert!(r.pass, "{r:?}");
        }
        let raw = make_scalar_system(&real(2, &[1.0, 1.0, 0.0, 1.0])).unwrap().with_raw_representative();
        let r = check_symbol_conditions(&raw, 400, 1e-8).unwrap();
        // in two dimensions the pointwise terms cancel; the circle condition catches it
        assert!(!r.pass && r.circle.unwrap() > 1e-3, "{r:?}");
        let a3 = [2.0, 0.7, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let raw3 = make_scalar_system(&real(3, &a3)).unwrap().with_raw_representative();
        let r = check_symbol_conditions(&raw3, 400, 1e-8).unwrap();
        assert!(!r.pass && r.pointwise > 1e-3, "{r:?}");
    }

    #[test]
    fn tensor_json_roundtrip() {
        let t = CoefficientTensor::lame(1.0, 0.5, 3);
        let back = CoefficientTensor::from_json(&t.to_json()).unwrap();
        assert_eq!(t, back);
        let bad = serde_json::json!({"n": 2, "M": 1, "a": [[1.0, 0.0]]});
        assert!(CoefficientTensor::from_json(&bad).is_err());
    }

    #[test]
    fn presets() {
        assert!(EllipticSystem::from_preset("laplacian", 3).unwrap().is_laplacian());
        assert_eq!(EllipticSystem::from_preset("laplacian:2", 3).unwrap().n(), 2);
        let s = EllipticSystem::from_preset("lame:1:1", 3).unwrap();
        assert_eq!(s.m(), 3);
        let s = EllipticSystem::from_preset("scalar:2,1,0,2", 3).unwrap();
        assert_eq!(s.n(), 2);
        assert!(EllipticSystem::from_preset("scalar:1,2,3", 3).is_err());
        assert!(EllipticSystem::from_preset("nonsense", 3).is_err());
    }
}
