//! Task execution: each task yields checks and writes its artifacts.

use crate::error::{CliError, CliResult};
use crate::inputs::create_dir;
use crate::report::{write_json, write_text, Check, Report, TaskFailure, TaskTiming, Timing};
use crate::scenario::{RouteName, Task, Validated};
use psg_core::elliptic::check_symbol_conditions;
use psg_core::elliptic::conormal_residual;
use psg_core::fields::{rel_l2_gap, write_field, BoundaryField, GridSpec};
use psg_core::fundsol::{FundamentalSolution, FundsolRoute};
use psg_core::generator::{
    check_block_identity, check_semigroup, comparison_mask, dtn, generator_power, semigroup_apply,
    GeneratorDiagnostics, GeneratorRoute, SemigroupContext,
};
use psg_core::linalg::max_abs;
use psg_core::poisson::{
    boundary_samples, decay_constant, from_fundsol, verify_annihilation, verify_normalization, KernelRoute,
    PoissonKernel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

pub mod defaults {
    pub const KERNEL_NORMALIZATION: f64 = 1e-3;
    pub const KERNEL_ANNIHILATION: f64 = 1e-6;
    pub const KERNEL_DECAY_CONSTANT: f64 = 1e-2;
    pub const KERNEL_ROUTE_AGREEMENT: f64 = 1e-5;
    pub const SEMIGROUP: f64 = 1e-5;
    pub const ROUTE_AGREEMENT_LAPLACIAN: f64 = 1e-2;
    pub const ROUTE_AGREEMENT: f64 = 2e-2;
    pub const POWER_TRACE: f64 = 5e-2;
    pub const BLOCK_IDENTITY: f64 = 2e-2;
    pub const BLOCK_IDENTITY_SPECTRAL: f64 = 1e-8;
    pub const CONORMAL_CLOSED: f64 = 1e-10;
    pub const CONORMAL_QUADRATURE: f64 = 1e-6;
    pub const SYMBOL_CONDITIONS: f64 = 1e-8;
}

#[derive(Default)]
struct TaskOutput {
    checks: Vec<Check>,
    artifacts: Vec<String>,
}

struct Runner<'a> {
    v: &'a Validated,
    dir: &'a Path,
    index: usize,
    task: &'static str,
    out: TaskOutput,
}

impl Runner<'_> {
    fn check(&mut self, name: &str, module: &str, measured: f64, default: f64) -> &mut Check {
        let tol = self.v.tolerance(name, default);
        self.out.checks.push(Check::at_most(name, self.task, module, measured, tol));
        self.out.checks.last_mut().expect("just pushed")
    }

    fn file_name(&self, stem: &str, ext: &str) -> String {
        format!("{:02}_{}_{stem}.{ext}", self.index, self.task)
    }

    fn write_field(&mut self, stem: &str, field: &BoundaryField) -> CliResult<()> {
        let name = self.file_name(stem, "csv");
        let mut buf = Vec::new();
        write_field(field, &mut buf)?;
        write_text(self.dir, &name, &String::from_utf8(buf).expect("csv is utf-8"))?;
        self.out.artifacts.push(name);
        Ok(())
    }

    fn write_json(&mut self, stem: &str, value: &impl Serialize) -> CliResult<()> {
        let name = self.file_name(stem, "json");
        write_json(self.dir, &name, value)?;
        self.out.artifacts.push(name);
        Ok(())
    }

    fn grid(&self, task: &Task) -> GridSpec {
        self.v.grid_for(task).expect("validated tasks have a grid")
    }

    fn core<T>(&self, r: psg_core::Result<T>) -> CliResult<T> {
        r.map_err(|source| CliError::Task { task: self.task.into(), source })
    }

    fn run(&mut self, task: &Task) -> CliResult<()> {
        match task {
            Task::KernelVerify {} => self.kernel_verify(),
            Task::Solve { t, .. } => self.solve(self.grid(task), t),
            Task::Dtn { routes, powers, ladder, .. } => self.dtn(self.grid(task), routes, powers, ladder.as_deref()),
            Task::SemigroupCheck { t1, t2, .. } => self.semigroup(self.grid(task), *t1, *t2),
            Task::ConormalAudit {} => self.conormal(),
            Task::SymbolAudit {} => self.symbol(),
        }
    }

    fn kernel_verify(&mut self) -> CliResult<()> {
        let v = self.v;
        let system = &v.system;
        let n = system.n();
        let kernel = self.core(PoissonKernel::closed(system))?;
        let (r_box, h) = if n == 2 { (200.0, 0.01) } else { (40.0, 0.05) };
        let norm = self.core(verify_normalization(&kernel, r_box, h))?;
        self.check("kernel_normalization", "poisson", norm.max_deviation, defaults::KERNEL_NORMALIZATION);

        let mut rng = ChaCha8Rng::seed_from_u64(self.v.scenario.seed);
        let points: Vec<Vec<f64>> = (0..16)
            .map(|_| {
                let mut x: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-2.0..2.0)).collect();
                x.push(rng.gen_range(0.5..2.0));
                x
            })
            .collect();
        let annihilation = self.core(verify_annihilation(&kernel, &points, 1e-3))?;
        self.check("kernel_annihilation", "poisson", annihilation, defaults::KERNEL_ANNIHILATION);

        let coarse = self.core(decay_constant(&kernel, 1e3, 200))?;
        let fine = self.core(decay_constant(&kernel, 1e3, 800))?;
        self.check("kernel_decay_constant", "poisson", (fine - coarse).abs() / fine, defaults::KERNEL_DECAY_CONSTANT)
            .detail = Some(format!("C = {fine:.6e}"));

        let agreement = if kernel.route() == KernelRoute::FromFundsol {
            None
        } else {
            let alt = self.core(FundamentalSolution::quadrature(system).and_then(from_fundsol))?;
            let mut worst: f64 = 0.0;
            for xp in boundary_samples(n - 1, 24).into_iter().chain(std::iter::once(vec![0.0; n - 1])) {
                let a = self.core(kernel.eval_p(&xp))?;
                let b = self.core(alt.eval_p(&xp))?;
                worst = worst.max(max_abs(&(&a - &b)) / max_abs(&a));
            }
            self.check("kernel_route_agreement", "poisson", worst, defaults::KERNEL_ROUTE_AGREEMENT).detail =
                Some(format!("{:?} vs quadrature", kernel.route()));
            Some(worst)
        };

        #[derive(Serialize)]
        struct KernelRecord<'a> {
            route: KernelRoute,
            normalization: &'a psg_core::poisson::NormalizationReport,
            normalization_box: [f64; 2],
            annihilation_points: &'a [Vec<f64>],
            annihilation: f64,
            decay_constant: [f64; 2],
            route_agreement: Option<f64>,
        }
        self.write_json(
            "kernel",
            &KernelRecord {
                route: kernel.route(),
                normalization: &norm,
                normalization_box: [r_box, h],
                annihilation_points: &points,
                annihilation,
                decay_constant: [coarse, fine],
                route_agreement: agreement,
            },
        )
    }

    fn context(&self, grid: GridSpec) -> CliResult<SemigroupContext> {
        self.core(SemigroupContext::new(&self.v.system, grid))
    }

    fn solve(&mut self, grid: GridSpec, times: &[f64]) -> CliResult<()> {
        let ctx = self.context(grid)?;
        let f = self.v.field_on(grid)?;
        self.write_field("boundary", &f)?;
        for &t in times {
            let u = self.core(semigroup_apply(&ctx, &f, t))?;
            self.write_field(&format!("t{t}"), &u)?;
        }
        Ok(())
    }

    fn semigroup(&mut self, grid: GridSpec, t1: f64, t2: f64) -> CliResult<()> {
        let ctx = self.context(grid)?;
        let f = self.v.field_on(grid)?;
        let gap = self.core(check_semigroup(&ctx, &f, t1, t2))?;
        self.check("semigroup", "generator", gap, defaults::SEMIGROUP).detail = Some(format!("t1 = {t1}, t2 = {t2}"));
        Ok(())
    }

    fn dtn(&mut self, grid: GridSpec, routes: &[RouteName], powers: &[u32], ladder: Option<&[f64]>) -> CliResult<()> {
        let mut ctx = self.context(grid)?;
        if let Some(ladder) = ladder {
            ctx = ctx.with_quotient_ladder(ladder.to_vec());
        }
        let f = self.v.field_on(grid)?;
        let mask = comparison_mask(&grid);
        let route_tol =
            if self.v.system.is_laplacian() { defaults::ROUTE_AGREEMENT_LAPLACIAN } else { defaults::ROUTE_AGREEMENT };

        let mut routes = routes.to_vec();
        routes.sort();
        routes.dedup();
        let mut values = Vec::new();
        let mut diagnostics = BTreeMap::new();
        for r in &routes {
            let result = self.core(dtn(&ctx, &f, r.route()))?;
            self.write_field(r.route().name(), &result.value)?;
            diagnostics.insert(r.route().name(), result.diagnostics);
            values.push(result.value);
        }

        let mut route_pairs = BTreeMap::new();
        for i in 0..routes.len() {
            for j in i + 1..routes.len() {
                let gap = self.core(rel_l2_gap(&values[i], &values[j], Some(&mask)))?;
                let pair = format!("{}/{}", routes[i].route().name(), routes[j].route().name());
                self.check("route_agreement", "generator", gap, route_tol).detail = Some(pair.clone());
                route_pairs.insert(pair, gap);
            }
        }

        let base =
            [RouteName::Spectral, RouteName::Pv].into_iter().find(|r| routes.contains(r)).unwrap_or(routes[0]).route();
        let mut power_gaps = BTreeMap::new();
        for &k in powers.iter().filter(|&&k| k >= 2) {
            let power = self.core(generator_power(&ctx, &f, k, base, &ctx.quotient_ladder))?;
            self.write_field(&format!("power{k}"), &power.repeated)?;
            self.check("power_trace", "generator", power.gap, defaults::POWER_TRACE).detail =
                Some(format!("k = {k} via {}", base.name()));
            power_gaps.insert(format!("k={k}"), power.gap);
        }

        let mut block = BTreeMap::new();
        if self.v.system.block_split.is_some() && powers.iter().any(|&k| k >= 2) {
            for r in &routes {
                let route = r.route();
                let gap = self.core(check_block_identity(&ctx, &f, route))?;
                let (name, tol) = if route == GeneratorRoute::Spectral {
                    ("block_identity_spectral", defaults::BLOCK_IDENTITY_SPECTRAL)
                } else {
                    ("block_identity", defaults::BLOCK_IDENTITY)
                };
                self.check(name, "generator", gap, tol).detail = Some(route.name().into());
                block.insert(route.name(), gap);
            }
        }

        #[derive(Serialize)]
        struct DtnRecord {
            route_pairs: BTreeMap<String, f64>,
            observed_orders: BTreeMap<&'static str, f64>,
            diagnostics: BTreeMap<&'static str, GeneratorDiagnostics>,
            power_gaps: BTreeMap<String, f64>,
            block_identity: BTreeMap<&'static str, f64>,
            ladder: Vec<f64>,
            tolerances: BTreeMap<&'static str, f64>,
            pass: bool,
        }
        let observed_orders = diagnostics.iter().filter_map(|(name, d)| d.observed_order.map(|o| (*name, o))).collect();
        let tolerances = [
            ("route_agreement", self.v.tolerance("route_agreement", route_tol)),
            ("power_trace", self.v.tolerance("power_trace", defaults::POWER_TRACE)),
            ("block_identity", self.v.tolerance("block_identity", defaults::BLOCK_IDENTITY)),
            ("block_identity_spectral", self.v.tolerance("block_identity_spectral", defaults::BLOCK_IDENTITY_SPECTRAL)),
        ]
        .into_iter()
        .collect();
        let record = DtnRecord {
            route_pairs,
            observed_orders,
            diagnostics,
            power_gaps,
            block_identity: block,
            ladder: ctx.quotient_ladder.clone(),
            tolerances,
            pass: self.out.checks.iter().all(|c| c.pass),
        };
        self.write_json("report", &record)
    }

    fn conormal(&mut self) -> CliResult<()> {
        let v = self.v;
        let system = &v.system;
        let fs = self.core(FundamentalSolution::for_system(system))?;
        let samples = boundary_samples(system.n() - 1, 24);
        let residual = self.core(conormal_residual(system, &fs, &samples))?;
        let default = match fs.route() {
            FundsolRoute::Quadrature => defaults::CONORMAL_QUADRATURE,
            _ => defaults::CONORMAL_CLOSED,
        };
        self.check("conormal", "elliptic", residual, default).detail = Some(format!("{:?}", fs.route()));
        Ok(())
    }

    fn symbol(&mut self) -> CliResult<()> {
        let tol = self.v.tolerance("symbol_conditions", defaults::SYMBOL_CONDITIONS);
        let report = self.core(check_symbol_conditions(&self.v.system, 1000, tol))?;
        let worst = report.pointwise.max(report.circle.unwrap_or(0.0));
        self.check("symbol_conditions", "elliptic", worst, defaults::SYMBOL_CONDITIONS);
        self.write_json("conditions", &report)
    }
}

/// Run every task in order; the report covers the tasks that completed, and
/// execution stops at the first task that fails.
pub fn run(v: &Validated, dir: &Path) -> CliResult<Report> {
    create_dir(dir)?;
    let s = &v.scenario;
    let mut report = Report::new(&s.name, s.seed, s.system.describe(), s.grid);
    let mut timing = Timing::default();
    let start = Instant::now();
    for (index, task) in s.tasks.iter().enumerate() {
        let task_start = Instant::now();
        let mut runner = Runner { v, dir, index, task: task.name(), out: TaskOutput::default() };
        let result = runner.run(task);
        report.checks.append(&mut runner.out.checks);
        report.artifacts.append(&mut runner.out.artifacts);
        timing.tasks.push(TaskTiming { task: task.name().into(), seconds: task_start.elapsed().as_secs_f64() });
        if let Err(e) = result {
            report.errors.push(TaskFailure { task: task.name().into(), index, message: e.to_string() });
            break;
        }
    }
    timing.total_seconds = start.elapsed().as_secs_f64();
    report.finish();
    write_text(dir, "report.json", &report.to_json())?;
    write_json(dir, "timing.json", &timing)?;
    Ok(report)
}
