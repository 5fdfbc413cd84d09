use clap::{Args, Parser, Subcommand};
use psg_cli::error::{CliError, CliResult};
use psg_cli::explain::explain;
use psg_cli::inputs::{create_dir, matrix_json, parse_grid, parse_list, FieldSource, SystemSpec};
use psg_cli::report::Report;
use psg_cli::scenario::{preset, RouteName, Scenario, Task, SCHEMA_VERSION};
use psg_cli::tasks::run;
use psg_core::fundsol::{quadrature_selfcheck, FundamentalSolution, FundsolRoute};
use psg_core::linalg::max_abs;
use psg_core::poisson::PoissonKernel;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "psg",
    version,
    about = "Poisson kernels, semigroups and Dirichlet-to-Normal maps in the upper half-space"
)]
struct Cli {
    /// Seed for sampled points; overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory; eval commands print to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SystemArg {
    /// `laplacian[:n]`, `lame:<mu>:<lambda>[:<n>]`, `scalar:<a11,a12,...>`, or a tensor JSON file.
    #[arg(long, default_value = "laplacian:2")]
    system: String,
}

impl SystemArg {
    fn spec(&self) -> SystemSpec {
        if Path::new(&self.system).is_file() {
            SystemSpec::File { tensor_file: PathBuf::from(&self.system) }
        } else {
            SystemSpec::Preset(self.system.clone())
        }
    }
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// `R,N`: half width and points per axis.
    #[arg(long, default_value = "12.8,1024")]
    grid: String,
    /// Boundary data per component: `gaussian:<sigma>`, `windowed_cos:<xi>:<width>`,
    /// `cauchy:<t0>`, `bump:<r>`, or a field CSV file.
    #[arg(long, default_value = "gaussian:1")]
    field: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Poisson kernel evaluation and verification.
    #[command(subcommand)]
    Kernel(KernelCommand),
    /// Fundamental solution evaluation and quadrature self-check.
    #[command(subcommand)]
    Fundsol(FundsolCommand),
    /// Poisson extension `T(t) f` at the given times.
    Solve {
        #[command(flatten)]
        system: SystemArg,
        #[command(flatten)]
        field: FieldArgs,
        /// Comma-separated times.
        #[arg(long, default_value = "1")]
        t: String,
    },
    /// Dirichlet-to-Normal map by one or all routes, with route agreement.
    Dtn {
        #[command(flatten)]
        system: SystemArg,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum, default_value = "all")]
        route: RouteArg,
        /// Highest power of the map to check against the trace route.
        #[arg(long, default_value_t = 1)]
        power: u32,
        /// Comma-separated quotient ladder, largest first.
        #[arg(long)]
        ladder: Option<String>,
    },
    /// Run a compiled-in scenario.
    Verify {
        #[arg(long, default_value = "laplacian-n2-quickstart")]
        preset: String,
        /// Print the preset scenario as JSON instead of running it.
        #[arg(long)]
        print: bool,
    },
    /// Run a scenario file.
    Run { scenario: PathBuf },
    /// Describe a named check and its tolerance.
    Explain { check: String },
}

#[derive(Subcommand)]
enum KernelCommand {
    /// CSV of `K(x', t)` on a grid: coordinates, then Re/Im of each entry.
    Eval {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, default_value = "8,64")]
        grid: String,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Normalization, annihilation, decay and route agreement checks.
    Verify {
        #[command(flatten)]
        system: SystemArg,
    },
}

#[derive(Subcommand)]
enum FundsolCommand {
    /// JSON record of `E(x)` and its gradient.
    Eval {
        #[command(flatten)]
        system: SystemArg,
        /// Comma-separated point in `R^n`.
        #[arg(long)]
        x: String,
        /// Use the plane-wave quadrature even when a closed form exists.
        #[arg(long)]
        quadrature: bool,
    },
    /// Compare the quadrature route with the closed forms.
    Selfcheck {
        #[command(flatten)]
        system: SystemArg,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum RouteArg {
    Pv,
    Spectral,
    Quotient,
    Conjugate,
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(cli: Cli) -> CliResult<ExitCode> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::invalid("threads", e.to_string()))?;
    }
    let out = cli.out.clone();
    match cli.command {
        Command::Kernel(KernelCommand::Eval { system, grid, t }) => {
            kernel_eval(&system.spec(), &grid, t, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Kernel(KernelCommand::Verify { system }) => {
            let s = adhoc("kernel-verify", system.spec(), None, Vec::new(), vec![Task::KernelVerify {}]);
            run_scenario(s, cli.seed, out)
        }
        Command::Fundsol(FundsolCommand::Eval { system, x, quadrature }) => {
            fundsol_eval(&system.spec(), &x, quadrature, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Fundsol(FundsolCommand::Selfcheck { system }) => {
            let sys = system.spec().resolve()?;
            let report = quadrature_selfcheck(&FundamentalSolution::quadrature(&sys)?)?;
            emit(out.as_deref(), "fundsol_selfcheck.json", &pretty(&report))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { system, field, t } => {
            let (grid, sources) = field_args(&system, &field)?;
            let task = Task::Solve { t: parse_list(&t, "t")?, grid: None };
            run_scenario(adhoc("solve", system.spec(), Some(grid), sources, vec![task]), cli.seed, out)
        }
        Command::Dtn { system, field, route, power, ladder } => {
            let (grid, sources) = field_args(&system, &field)?;
            let routes = match route {
                RouteArg::Pv => vec![RouteName::Pv],
                RouteArg::Spectral => vec![RouteName::Spectral],
                RouteArg::Quotient => vec![RouteName::Quotient],
                RouteArg::Conjugate => vec![RouteName::Conjugate],
                RouteArg::All => {
                    let sys = system.spec().resolve()?;
                    RouteName::ALL.into_iter().filter(|r| r.available(&sys)).collect()
                }
            };
            let task = Task::Dtn {
                routes,
                powers: (1..=power).collect(),
                ladder: ladder.as_deref().map(|l| parse_list(l, "ladder")).transpose()?,
                grid: None,
            };
            run_scenario(adhoc("dtn", system.spec(), Some(grid), sources, vec![task]), cli.seed, out)
        }
        Command::Verify { preset: name, print } => {
            let s = preset(&name)?;
            if print {
                println!("{}", s.to_json());
                return Ok(ExitCode::SUCCESS);
            }
            run_scenario(s, cli.seed, out)
        }
        Command::Run { scenario } => {
            let text = std::fs::read_to_string(&scenario)
                .map_err(|e| CliError::io(format!("reading {}", scenario.display()), e))?;
            run_scenario(Scenario::from_json(&text)?, cli.seed, out)
        }
        Command::Explain { check } => {
            print!("{}", explain(&check)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn adhoc(
    name: &str,
    system: SystemSpec,
    grid: Option<psg_core::fields::GridSpec>,
    field: Vec<FieldSource>,
    tasks: Vec<Task>,
) -> Scenario {
    Scenario {
        version: SCHEMA_VERSION,
        name: name.into(),
        seed: 0,
        system,
        grid,
        field: if field.is_empty() { vec![FieldSource::Gaussian { sigma: 1.0 }] } else { field },
        tasks,
        tolerances: BTreeMap::new(),
        output_dir: None,
    }
}

fn field_args(system: &SystemArg, field: &FieldArgs) -> CliResult<(psg_core::fields::GridSpec, Vec<FieldSource>)> {
    let n = system.spec().resolve()?.n();
    let grid = parse_grid(&field.grid, n)?;
    let sources = field.field.iter().map(|s| FieldSource::parse(s)).collect::<CliResult<_>>()?;
    Ok((grid, sources))
}

fn run_scenario(mut scenario: Scenario, seed: Option<u64>, out: Option<PathBuf>) -> CliResult<ExitCode> {
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    let dir =
        out.or_else(|| scenario.output_dir.clone()).unwrap_or_else(|| PathBuf::from("psg-out").join(&scenario.name));
    let validated = scenario.validate()?;
    let report: Report = run(&validated, &dir)?;
    print!("{}", report.summary());
    println!("report: {}", dir.join("report.json").display());
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else if report.errors.is_empty() {
        ExitCode::from(1)
    } else {
        ExitCode::from(3)
    })
}

fn pretty(value: &impl serde::Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    text
}

/// Write `text` to `<out>/<file>`, or to stdout without an output directory.
fn emit(out: Option<&Path>, file: &str, text: &str) -> CliResult<()> {
    match out {
        Some(dir) => {
            create_dir(dir)?;
            let path = dir.join(file);
            std::fs::write(&path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
        }
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::io("stdout", e)),
    }
}

fn kernel_eval(system: &SystemSpec, grid: &str, t: f64, out: Option<&Path>) -> CliResult<()> {
    let sys = system.resolve()?;
    let grid = parse_grid(grid, sys.n())?;
    if t.is_nan() || t <= 0.0 {
        return Err(CliError::invalid("t", format!("time {t} must be positive")));
    }
    let kernel = PoissonKernel::closed(&sys)?;
    let m = sys.m();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=grid.d).map(|a| format!("x{a}")).collect();
    for a in 0..m {
        for b in 0..m {
            header.push(format!("re{a}{b}"));
            header.push(format!("im{a}{b}"));
        }
    }
    let csv_err = |e: csv::Error| CliError::io("writing kernel csv", e.into());
    w.write_record(&header).map_err(csv_err)?;
    for x in grid.nodes() {
        let k = kernel.eval_k(&x, t)?;
        let mut row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        for a in 0..m {
            for b in 0..m {
                row.push(k[(a, b)].re.to_string());
                row.push(k[(a, b)].im.to_string());
            }
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::io("writing kernel csv", e.into_error()))?;
    emit(out, "kernel.csv", &String::from_utf8(bytes).expect("csv is utf-8"))
}

fn fundsol_eval(system: &SystemSpec, x: &str, quadrature: bool, out: Option<&Path>) -> CliResult<()> {
    let sys = system.resolve()?;
    let x = parse_list(x, "x")?;
    if x.len() != sys.n() {
        return Err(CliError::invalid("x", format!("{} coordinates for n = {}", x.len(), sys.n())));
    }
    let closed = FundamentalSolution::for_system(&sys)?;
    let fs = if quadrature { FundamentalSolution::quadrature(&sys)? } else { closed.clone() };
    let e = fs.eval(&x)?;
    let grad = fs.grad(&x)?;
    // gradient gap between the two routes; E itself differs by a constant when n = 2
    let mut errors = BTreeMap::new();
    if closed.route() != FundsolRoute::Quadrature {
        let other = if quadrature { closed } else { FundamentalSolution::quadrature(&sys)? };
        let other_grad = other.grad(&x)?;
        let scale = grad.iter().map(max_abs).fold(0.0, f64::max);
        let gap = grad.iter().zip(&other_grad).map(|(a, b)| max_abs(&(a - b))).fold(0.0, f64::max);
        errors.insert("grad_route_gap", gap / scale);
    }
    let record = serde_json::json!({
        "x": x,
        "E": matrix_json(&e),
        "gradE": grad.iter().map(matrix_json).collect::<Vec<_>>(),
        "route": fs.route(),
        "errors": errors,
    });
    emit(out, "fundsol.json", &pretty(&record))
}
