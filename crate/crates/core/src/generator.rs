//! Poisson semigroup `T(t) f = P_t * f` and its generator, the
//! Dirichlet-to-Normal map `A`, by several independent routes.

use crate::elliptic::{EllipticSystem, SystemKind};
use crate::error::{Error, Result};
use crate::fields::{
    convolve, convolve_with, fourier_multiplier, gradient, pv_apply, BoundaryField, ConvolutionRoute, DecayClass,
    GradientRoute, GridSpec, PvKernel,
};
use crate::fundsol::FundamentalSolution;
use crate::linalg::{c, CMat, C64};
use crate::poisson::{build_conjugate, PoissonKernel};
use serde::Serialize;
use std::collections::HashMap;
use std::sync::Mutex;

/// Angular samples over a half turn for tabulated `d = 2` PV kernels.
const PV_ANGLES: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorRoute {
    Pv,
    Spectral,
    Quotient,
    ConjugatePv,
}

impl GeneratorRoute {
    pub const ALL: [GeneratorRoute; 4] = [Self::Pv, Self::Spectral, Self::Quotient, Self::ConjugatePv];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Pv => "pv",
            Self::Spectral => "spectral",
            Self::Quotient => "quotient",
            Self::ConjugatePv => "conjugate_pv",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GeneratorDiagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gradient_route: Option<GradientRoute>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub padding: Option<usize>,
    /// Convergence order of the raw quotients along the ladder.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed_order: Option<f64>,
    /// Convergence order after one Richardson step (ladders of four or more rungs).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extrapolated_order: Option<f64>,
    /// Relative size of the last extrapolation correction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct GeneratorResult {
    pub value: BoundaryField,
    pub route: GeneratorRoute,
    pub diagnostics: GeneratorDiagnostics,
}

/// System, Poisson kernel and grid shared by every semigroup operation.
#[derive(Debug, Clone)]
pub struct SemigroupContext {
    pub system: EllipticSystem,
    pub kernel: PoissonKernel,
    pub grid: GridSpec,
    /// `t` ladder for the quotient route, largest first; defaults to `32h, 16h, 8h, 4h`.
    pub quotient_ladder: Vec<f64>,
}

impl SemigroupContext {
    pub fn new(system: &EllipticSystem, grid: GridSpec) -> Result<Self> {
        Self::with_kernel(PoissonKernel::closed(system)?, grid)
    }

    pub fn with_kernel(kernel: PoissonKernel, grid: GridSpec) -> Result<Self> {
        grid.validate()?;
        if grid.d + 1 != kernel.n() {
            return Err(Error::Shape(format!("grid dimension {} does not match n = {}", grid.d, kernel.n())));
        }
        let t0 = 4.0 * grid.h();
        Ok(Self {
            system: kernel.system().clone(),
            quotient_ladder: vec![8.0 * t0, 4.0 * t0, 2.0 * t0, t0],
            kernel,
            grid,
        })
    }

    pub fn with_quotient_ladder(mut self, ladder: Vec<f64>) -> Self {
        self.quotient_ladder = ladder;
        self
    }

    fn check_field(&self, f: &BoundaryField) -> Result<()> {
        if *f.grid() != self.grid || f.m() != self.system.m() {
            return Err(Error::Shape(format!(
                "field with {} components on {:?} for an M = {} system on {:?}",
                f.m(),
                f.grid(),
                self.system.m(),
                self.grid
            )));
        }
        Ok(())
    }
}

/// `T(t) f`; `T(0) = I`.
pub fn semigroup_apply(ctx: &SemigroupContext, f: &BoundaryField, t: f64) -> Result<BoundaryField> {
    ctx.check_field(f)?;
    if t == 0.0 {
        return Ok(f.clone());
    }
    convolve(f, &ctx.kernel, t, ConvolutionRoute::Fft)
}

/// `||T(t1) T(t2) f - T(t1 + t2) f|| / ||f||` in discrete `L^2`.
pub fn check_semigroup(ctx: &SemigroupContext, f: &BoundaryField, t1: f64, t2: f64) -> Result<f64> {
    if t1 == 0.0 || t2 == 0.0 {
        ctx.check_field(f)?;
        return Ok(0.0);
    }
    let twice = semigroup_apply(ctx, &semigroup_apply(ctx, f, t2)?, t1)?;
    let once = semigroup_apply(ctx, f, t1 + t2)?;
    Ok(twice.sub(&once)?.l2() / f.l2())
}

/// Spectral derivatives when the field is safe for the DFT, fourth-order differences otherwise.
fn tangential_gradient(f: &BoundaryField) -> Result<(Vec<BoundaryField>, GradientRoute)> {
    match gradient(f, GradientRoute::Spectral) {
        Ok(g) => Ok((g, GradientRoute::Spectral)),
        Err(Error::BoundaryLeak(_) | Error::AliasingRisk(_)) => {
            Ok((gradient(f, GradientRoute::FiniteDifference)?, GradientRoute::FiniteDifference))
        }
        Err(e) => Err(e),
    }
}

/// `k^s_{ga}(x') = sum_{b,r} a^{ba}_{rs} (d_r E_{gb})(x', 0)`.
pub fn pv_kernels(system: &EllipticSystem) -> Result<Vec<PvKernel>> {
    let fs = FundamentalSolution::for_system(system)?;
    let n = system.n();
    let m = system.m();
    (0..n - 1)
        .map(|s| {
            PvKernel::from_profile(n - 1, m, m, PV_ANGLES, |u| {
                let mut x = u.to_vec();
                x.push(0.0);
                let grad = fs.grad(&x)?;
                Ok((0..n).fold(CMat::zeros(m, m), |acc, r| acc + &grad[r] * system.tensor.block(r, s)))
            })
        })
        .collect()
}

/// `-sum_s C_s d_s f - 2 sum_s PV(k^s, d_s f)` with `C_s = B^{-1} (a^{ba}_{ns})`.
pub fn dtn_pv(ctx: &SemigroupContext, f: &BoundaryField) -> Result<GeneratorResult> {
    ctx.check_field(f)?;
    let kernels = pv_kernels(&ctx.system)?;
    let (grads, gradient_route) = tangential_gradient(f)?;
    let mut acc = BoundaryField::zeros(ctx.grid, ctx.system.m(), DecayClass::Periodic);
    for (s, (k, g)) in kernels.iter().zip(&grads).enumerate() {
        let first = g.apply_matrix(&ctx.system.first_order_matrix(s)?)?;
        let pv = pv_apply(k, g)?;
        acc = acc.sub(&first)?.lin_comb(c(1.0), &pv, c(-2.0))?;
    }
    Ok(GeneratorResult {
        value: acc.with_decay(DecayClass::Periodic),
        route: GeneratorRoute::Pv,
        diagnostics: GeneratorDiagnostics { gradient_route: Some(gradient_route), ..Default::default() },
    })
}

/// `b(xi') = sum_{r,s<n} b_{rs} xi_r xi_s` for block systems with scalar tangential part.
fn scalar_tangential_symbol(system: &EllipticSystem) -> Result<impl Fn(&[f64]) -> C64 + Sync + '_> {
    let split = system
        .block_split
        .as_ref()
        .ok_or_else(|| Error::UnsupportedSystem("L is not of the form d_n^2 + L'".into()))?;
    split
        .scalar_coefficients()
        .ok_or_else(|| Error::UnsupportedSystem("tangential blocks are not multiples of the identity".into()))?;
    Ok(move |xi: &[f64]| split.scalar_symbol(xi).unwrap_or_default())
}

fn spectral_padding(d: usize) -> usize {
    if d == 1 {
        4
    } else {
        2
    }
}

/// Multiplier `(-sqrt b(xi'))^k` with the principal root.
fn spectral_power(ctx: &SemigroupContext, f: &BoundaryField, k: u32) -> Result<BoundaryField> {
    ctx.check_field(f)?;
    let b = scalar_tangential_symbol(&ctx.system)?;
    let pad = spectral_padding(ctx.grid.d);
    let dirs = if ctx.grid.d == 1 { vec![vec![1.0], vec![-1.0]] } else { crate::quadrature::sphere_points(2, 256, 1) };
    for u in &dirs {
        let v = b(u);
        if v.re <= 0.0 {
            return Err(Error::BranchAmbiguity(v.re));
        }
    }
    let m = ctx.system.m();
    fourier_multiplier(
        f,
        &|xi| {
            let root = -b(xi).sqrt();
            CMat::from_diagonal_element(m, m, root.powu(k))
        },
        pad,
    )
}

/// Multiplier `-sqrt b(xi')`.
pub fn dtn_spectral(ctx: &SemigroupContext, f: &BoundaryField) -> Result<GeneratorResult> {
    Ok(GeneratorResult {
        value: spectral_power(ctx, f, 1)?,
        route: GeneratorRoute::Spectral,
        diagnostics: GeneratorDiagnostics { padding: Some(spectral_padding(ctx.grid.d)), ..Default::default() },
    })
}

/// Neville extrapolation of `values[i] ~ V(taus[i])` to `tau = 0`.
fn extrapolate_to_zero(taus: &[f64], values: &[BoundaryField]) -> Result<BoundaryField> {
    let mut table: Vec<BoundaryField> = values.to_vec();
    for level in 1..taus.len() {
        for i in 0..taus.len() - level {
            let (ti, tj) = (taus[i], taus[i + level]);
            // p(0) = (tj p_i - ti p_{i+1}) / (tj - ti)
            table[i] = table[i].lin_comb(c(tj / (tj - ti)), &table[i + 1], c(-ti / (tj - ti)))?;
        }
    }
    Ok(table.swap_remove(0))
}

fn check_ladder(ctx: &SemigroupContext, ladder: &[f64]) -> Result<f64> {
    if ladder.len() < 2 {
        return Err(Error::Shape("ladder needs at least two rungs".into()));
    }
    let ratio = ladder[0] / ladder[1];
    if ratio.is_nan() || ratio <= 1.0 || ladder.windows(2).any(|w| ((w[0] / w[1]) / ratio - 1.0).abs() > 1e-9) {
        return Err(Error::Shape(format!("ladder {ladder:?} is not geometric and decreasing")));
    }
    let min = *ladder.last().unwrap_or(&0.0);
    if min < 4.0 * ctx.grid.h() {
        return Err(Error::GridTooCoarse { t: min, min: 4.0 * ctx.grid.h() });
    }
    Ok(ratio)
}

/// Richardson-extrapolated difference quotients `(T(tau) f - f) / tau`.
pub fn dtn_quotient(ctx: &SemigroupContext, f: &BoundaryField, ladder: &[f64]) -> Result<GeneratorResult> {
    ctx.check_field(f)?;
    let ratio = check_ladder(ctx, ladder)?;
    let quotients: Vec<BoundaryField> = ladder
        .iter()
        .map(|&tau| Ok(semigroup_apply(ctx, f, tau)?.sub(f)?.scale(c(1.0 / tau))))
        .collect::<Result<_>>()?;
    let gaps: Vec<f64> = quotients.windows(2).map(|w| Ok(w[0].sub(&w[1])?.l2())).collect::<Result<_>>()?;
    if gaps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::NoConvergence(format!("quotient gaps {gaps:?} do not contract")));
    }
    let order = |g: &[f64]| (g.len() >= 2).then(|| (g[g.len() - 2] / g[g.len() - 1]).ln() / ratio.ln());
    let observed_order = order(&gaps);
    let extrapolated_order = if ladder.len() >= 4 {
        let once: Vec<BoundaryField> = quotients
            .windows(2)
            .zip(ladder.windows(2))
            .map(|(q, t)| extrapolate_to_zero(t, q))
            .collect::<Result<_>>()?;
        let g: Vec<f64> = once.windows(2).map(|w| Ok(w[0].sub(&w[1])?.l2())).collect::<Result<_>>()?;
        order(&g)
    } else {
        None
    };
    let value = extrapolate_to_zero(ladder, &quotients)?;
    let last = &quotients[quotients.len() - 1];
    let error_estimate = value.sub(last)?.l2() / value.l2().max(f64::MIN_POSITIVE);
    Ok(GeneratorResult {
        value: value.with_decay(DecayClass::Periodic),
        route: GeneratorRoute::Quotient,
        diagnostics: GeneratorDiagnostics {
            observed_order,
            extrapolated_order,
            error_estimate: Some(error_estimate),
            ..Default::default()
        },
    })
}

/// `-sum_j [c_j d_j f + PV(K_j(., 0), d_j f)]` with closed conjugate kernels.
pub fn dtn_conjugate(ctx: &SemigroupContext, f: &BoundaryField) -> Result<GeneratorResult> {
    ctx.check_field(f)?;
    let n = ctx.system.n();
    let m = ctx.system.m();
    let (grads, gradient_route) = tangential_gradient(f)?;
    let mut acc = BoundaryField::zeros(ctx.grid, m, DecayClass::Periodic);
    for (j, g) in grads.iter().enumerate() {
        let kj = build_conjugate(&ctx.kernel, j)?;
        let pv_kernel = PvKernel::from_profile(n - 1, m, m, PV_ANGLES, |u| {
            let mut x = u.to_vec();
            x.push(0.0);
            kj.eval(&x)
        })?;
        let first = g.apply_matrix(&kj.first_order())?;
        acc = acc.sub(&first)?.sub(&pv_apply(&pv_kernel, g)?)?;
    }
    Ok(GeneratorResult {
        value: acc,
        route: GeneratorRoute::ConjugatePv,
        diagnostics: GeneratorDiagnostics { gradient_route: Some(gradient_route), ..Default::default() },
    })
}

/// `A f` by the named route; the quotient route uses the context ladder.
pub fn dtn(ctx: &SemigroupContext, f: &BoundaryField, route: GeneratorRoute) -> Result<GeneratorResult> {
    match route {
        GeneratorRoute::Pv => dtn_pv(ctx, f),
        GeneratorRoute::Spectral => dtn_spectral(ctx, f),
        GeneratorRoute::Quotient => dtn_quotient(ctx, f, &ctx.quotient_ladder),
        GeneratorRoute::ConjugatePv => dtn_conjugate(ctx, f),
    }
}

/// Closed form of `B^{-1} (a^{ba}_{ns})` for the Lame system:
/// `(mu + lambda) / (3 mu + lambda) [delta_{gn} delta_{sa} + delta_{na} delta_{gs}]`.
pub fn lame_first_order(mu: f64, lambda: f64, n: usize, s: usize) -> CMat {
    let k = (mu + lambda) / (3.0 * mu + lambda);
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    CMat::from_fn(n, n, |g, a| c(k * (d(g, n - 1) * d(s, a) + d(n - 1, a) * d(g, s))))
}

#[derive(Debug, Clone)]
pub struct PowerResult {
    pub k: u32,
    /// `A^k f` by repeated application of a first-order route.
    pub repeated: BoundaryField,
    /// `d_t^k u` at `t = 0` from the `t`-ladder of `u(t) = T(t) f`.
    pub trace: BoundaryField,
    /// Relative `L^2` gap between the two on the interior nodes.
    pub gap: f64,
    /// Base spacings of the trace-route ladder.
    pub ladder: Vec<f64>,
}

/// Central-half nodes on which route comparisons are made.
pub fn comparison_mask(grid: &GridSpec) -> Vec<bool> {
    grid.interior_mask(0.5)
}

/// `A^k f` by repeating `route` `k` times; the spectral route composes symbols.
pub fn repeated_power(
    ctx: &SemigroupContext,
    f: &BoundaryField,
    k: u32,
    route: GeneratorRoute,
) -> Result<BoundaryField> {
    if route == GeneratorRoute::Spectral {
        return spectral_power(ctx, f, k);
    }
    let mut v = f.clone();
    for _ in 0..k {
        v = dtn(ctx, &v, route)?.value;
    }
    Ok(v)
}

/// `A^k f = (d_t^k u)|_{t=0}` from `k`-th forward differences of `u(t) = T(t) f`
/// with base spacings `ladder`, extrapolated to zero spacing.
pub fn trace_power(ctx: &SemigroupContext, f: &BoundaryField, k: u32, ladder: &[f64]) -> Result<BoundaryField> {
    check_ladder(ctx, ladder)?;
    let cache: Mutex<HashMap<u64, BoundaryField>> = Mutex::new(HashMap::new());
    let u = |t: f64| -> Result<BoundaryField> {
        if let Some(v) = cache.lock().expect("cache lock").get(&t.to_bits()) {
            return Ok(v.clone());
        }
        let v = semigroup_apply(ctx, f, t)?;
        cache.lock().expect("cache lock").insert(t.to_bits(), v.clone());
        Ok(v)
    };
    let binom = |n: u32, j: u32| (0..j).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
    let diffs: Vec<BoundaryField> = ladder
        .iter()
        .map(|&tau| {
            let mut acc = BoundaryField::zeros(ctx.grid, f.m(), DecayClass::Periodic);
            for j in 0..=k {
                let sign = if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 };
                let w = sign * binom(k, j) / tau.powi(k as i32);
                acc = acc.lin_comb(c(1.0), &u(j as f64 * tau)?, c(w))?;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    extrapolate_to_zero(ladder, &diffs)
}

pub fn generator_power(
    ctx: &SemigroupContext,
    f: &BoundaryField,
    k: u32,
    route: GeneratorRoute,
    ladder: &[f64],
) -> Result<PowerResult> {
    if !(1..=4).contains(&k) {
        return Err(Error::Shape(format!("power {k} outside 1..=4")));
    }
    let repeated = repeated_power(ctx, f, k, route)?;
    let trace = trace_power(ctx, f, k, ladder)?;
    let mask = comparison_mask(&ctx.grid);
    let gap = crate::fields::rel_l2_gap(&trace, &repeated, Some(&mask))?;
    Ok(PowerResult { k, repeated, trace, gap, ladder: ladder.to_vec() })
}

/// `L' f` for a block system, by the multiplier `-sum_{r,s<n} B_{rs} xi_r xi_s`.
pub fn tangential_operator(ctx: &SemigroupContext, f: &BoundaryField) -> Result<BoundaryField> {
    ctx.check_field(f)?;
    let split = ctx
        .system
        .block_split
        .as_ref()
        .ok_or_else(|| Error::UnsupportedSystem("L is not of the form d_n^2 + L'".into()))?;
    let d = ctx.grid.d;
    let m = ctx.system.m();
    fourier_multiplier(
        f,
        &|xi| {
            let mut acc = CMat::zeros(m, m);
            for r in 0..d {
                for s in 0..d {
                    acc -= split.block(r, s) * c(xi[r] * xi[s]);
                }
            }
            acc
        },
        1,
    )
}

/// `||A(Af) + L'f|| / ||L'f||` on the interior nodes.
pub fn check_block_identity(ctx: &SemigroupContext, f: &BoundaryField, route: GeneratorRoute) -> Result<f64> {
    let lf = tangential_operator(ctx, f)?;
    let a2 = repeated_power(ctx, f, 2, route)?;
    let mask = comparison_mask(&ctx.grid);
    Ok(a2.add(&lf)?.l2_on(Some(&mask)) / lf.l2_on(Some(&mask)))
}

/// Power-iteration estimate of the discrete `L^2 -> L^2` norm of `T(t)`.
pub fn operator_norm_estimate(ctx: &SemigroupContext, t: f64, iterations: usize) -> Result<f64> {
    if t < 4.0 * ctx.grid.h() {
        return Err(Error::GridTooCoarse { t, min: 4.0 * ctx.grid.h() });
    }
    let m = ctx.system.m();
    let kernel = &ctx.kernel;
    let adjoint = |x: &[f64]| -> Result<CMat> {
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        Ok(kernel.eval_k(&neg, t)?.adjoint())
    };
    let mut v = BoundaryField::from_fn(ctx.grid, m, DecayClass::Periodic, |x| {
        (0..m).map(|k| c(1.0 + 0.1 * (k as f64 + 1.0) * x[0].sin())).collect()
    })?;
    let mut estimate = 0.0;
    for _ in 0..iterations {
        v = v.scale(c(1.0 / v.l2()));
        let tv = convolve(&v, kernel, t, ConvolutionRoute::Fft)?;
        estimate = tv.l2();
        v = convolve_with(&tv, m, &adjoint, ConvolutionRoute::Fft)?;
    }
    Ok(estimate)
}

/// `f(lambda x)` sampled on the grid shrunk by `lambda`: the same array as `f`.
pub fn dilated_grid(grid: &GridSpec, lambda: f64) -> Result<GridSpec> {
    grid.rescaled(1.0 / lambda)
}

/// Largest relative deviation of `(A f_lambda)(x) = lambda (A f)(lambda x)`.
pub fn scaling_defect(ctx: &SemigroupContext, f: &BoundaryField, lambda: f64, route: GeneratorRoute) -> Result<f64> {
    let base = dtn(ctx, f, route)?.value;
    let grid = dilated_grid(&ctx.grid, lambda)?;
    let scaled_ctx = SemigroupContext::with_kernel(ctx.kernel.clone(), grid)?;
    let f_lambda = BoundaryField::new(grid, f.m(), f.values().to_vec(), f.decay())?;
    let scaled = dtn(&scaled_ctx, &f_lambda, route)?.value;
    let expected = BoundaryField::new(grid, f.m(), base.scale(c(lambda)).values().to_vec(), DecayClass::Periodic)?;
    let mask = comparison_mask(&grid);
    crate::fields::rel_l2_gap(&scaled, &expected, Some(&mask))
}

/// `true` for systems with a spectral route.
pub fn has_spectral_route(system: &EllipticSystem) -> bool {
    scalar_tangential_symbol(system).is_ok()
}

/// `true` for systems with closed conjugate kernels.
pub fn has_conjugate_route(system: &EllipticSystem) -> bool {
    !matches!(system.kind, SystemKind::General)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{make_lame_system, make_scalar_system};
    use crate::fields::{rel_l2_gap, FieldPreset};
    use crate::linalg::max_abs;

    fn laplace_1d() -> (SemigroupContext, BoundaryField) {
        let grid = GridSpec::new(1, 12.8, 1024).unwrap();
        let ctx = SemigroupContext::new(&EllipticSystem::laplacian(2), grid).unwrap();
        let f = BoundaryField::scalar(grid, DecayClass::SchwartzLike, |x| (-x[0] * x[0]).exp()).unwrap();
        (ctx, f)
    }

    #[test]
    fn identity_and_constants() {
        let (ctx, f) = laplace_1d();
        assert_eq!(semigroup_apply(&ctx, &f, 0.0).unwrap(), f);
        assert_eq!(check_semigroup(&ctx, &f, 1.0, 0.0).unwrap(), 0.0);
        let one = BoundaryField::scalar(ctx.grid, DecayClass::Periodic, |_| 1.0).unwrap();
        assert!(dtn_pv(&ctx, &one).unwrap().value.sup() < 1e-12);
        assert!(dtn_conjugate(&ctx, &one).unwrap().value.sup() < 1e-12);
    }

    #[test]
    fn laplacian_routes_agree_1d() {
        let (ctx, f) = laplace_1d();
        let mask = comparison_mask(&ctx.grid);
        let pv = dtn_pv(&ctx, &f).unwrap().value;
        let spec = dtn_spectral(&ctx, &f).unwrap().value;
        let conj = dtn_conjugate(&ctx, &f).unwrap().value;
        let quot = dtn_quotient(&ctx, &f, &[0.4, 0.2, 0.1]).unwrap();
        assert!(rel_l2_gap(&pv, &spec, Some(&mask)).unwrap() < 1e-3);
        assert!(rel_l2_gap(&conj, &pv, Some(&mask)).unwrap() < 1e-12);
        let q = rel_l2_gap(&quot.value, &spec, Some(&mask)).unwrap();
        assert!(q < 1e-2, "{q} {:?}", quot.diagnostics);
    }

    #[test]
    fn lame_first_order_matches_closed_form() {
        for (mu, lambda, n) in [(1.0, 1.0, 3), (2.0, 0.5, 2), (0.7, -0.3, 3)] {
            let sys = make_lame_system(mu, lambda, n).unwrap();
            for s in 0..n - 1 {
                let lu = sys.first_order_matrix(s).unwrap();
                assert!(max_abs(&(lu - lame_first_order(mu, lambda, n, s))) < 1e-14);
            }
        }
        let half = lame_first_order(1.0, 1.0, 3, 0);
        assert_eq!(half[(2, 0)], c(0.5));
        assert_eq!(half[(0, 2)], c(0.5));
        assert_eq!(half[(0, 0)], c(0.0));
    }

    #[test]
    fn scalar_block_spectral() {
        let a = CMat::from_row_slice(2, 2, &[c(4.0), c(0.0), c(0.0), c(1.0)]);
        let sys = make_scalar_system(&a).unwrap();
        let grid = GridSpec::new(1, 12.8, 1024).unwrap();
        let ctx = SemigroupContext::new(&sys, grid).unwrap();
        let f = BoundaryField::scalar(grid, DecayClass::SchwartzLike, |x| (-x[0] * x[0]).exp()).unwrap();
        let spec = dtn_spectral(&ctx, &f).unwrap().value;
        let twice_lap = fourier_multiplier(&f, &|xi| CMat::from_element(1, 1, c(-2.0 * xi[0].abs())), 4).unwrap();
        assert!(rel_l2_gap(&spec, &twice_lap, None).unwrap() < 1e-13);
        assert!(check_block_identity(&ctx, &f, GeneratorRoute::Spectral).unwrap() < 1e-8);
        let mixed = make_scalar_system(&CMat::from_row_slice(2, 2, &[c(1.0), c(0.3), c(0.3), c(2.0)])).unwrap();
        let ctx2 = SemigroupContext::new(&mixed, grid).unwrap();
        assert!(matches!(dtn_spectral(&ctx2, &f), Err(Error::UnsupportedSystem(_))));
    }

    #[test]
    fn general_scalar_pv_matches_quadratic_root() {
        // the DtN symbol for A = [[1, c], [c, 1]] is -i c xi - sqrt(1 - c^2) |xi|
        let cc = 0.3;
        let sys = make_scalar_system(&CMat::from_row_slice(2, 2, &[c(1.0), c(cc), c(cc), c(1.0)])).unwrap();
        let grid = GridSpec::new(1, 12.8, 1024).unwrap();
        let ctx = SemigroupContext::new(&sys, grid).unwrap();
        let f = FieldPreset::Gaussian { sigma: 0.8 }.sample(grid, 1, 0).unwrap();
        let oracle = fourier_multiplier(
            &f,
            &|xi| CMat::from_element(1, 1, C64::new(-(1.0 - cc * cc).sqrt() * xi[0].abs(), -cc * xi[0])),
            4,
        )
        .unwrap();
        let mask = comparison_mask(&grid);
        for route in [GeneratorRoute::Pv, GeneratorRoute::ConjugatePv, GeneratorRoute::Quotient] {
            let v = dtn(&ctx, &f, route).unwrap().value;
            let gap = rel_l2_gap(&v, &oracle, Some(&mask)).unwrap();
            assert!(gap < 1e-2, "{route:?}: {gap}");
        }
    }

    #[test]
    fn quotient_is_linear_and_guarded() {
        let (ctx, f) = laplace_1d();
        let g = FieldPreset::Gaussian { sigma: 2.0 }.sample(ctx.grid, 1, 0).unwrap();
        let ladder = [0.4, 0.2, 0.1];
        let sum = dtn_quotient(&ctx, &f.add(&g).unwrap(), &ladder).unwrap().value;
        let parts = dtn_quotient(&ctx, &f, &ladder)
            .unwrap()
            .value
            .add(&dtn_quotient(&ctx, &g, &ladder).unwrap().value)
            .unwrap();
        assert!(sum.sub(&parts).unwrap().sup() < 1e-12);
        assert!(matches!(dtn_quotient(&ctx, &f, &[0.1, 0.05]), Err(Error::GridTooCoarse { .. })));
        assert!(dtn_quotient(&ctx, &f, &[0.4, 0.3, 0.1]).is_err());
    }
}
