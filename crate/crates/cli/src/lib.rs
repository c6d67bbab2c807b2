//! Command-line front end: argument definitions, config handling and the subcommands.
//!
//! Exit codes: 0 success (or principle holds), 1 principle violated / scenario not
//! reproduced, 2 usage or input error, 3 numerical solver failure.

pub mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use plap_core::closed_forms::{
    admissible_m, barenblatt, barenblatt_support_radius, cauchy_solution, degenerate_subsolution,
    extinction_amplitude, extinction_solution, extinction_time, hopf_barrier, lambda1_interval,
    BarenblattParams, BarrierParams, ExtinctionParams, SubsolutionParams,
};
use plap_core::elliptic::{
    build_saddle_construction, lambda1_rayleigh, lambda1_shooting, shooting_eigenfunction, zeta,
};
use plap_core::grid::fmt_num;
use plap_core::parabolic::solve_parabolic;
use plap_core::principles::{
    check_hopf, check_scp, check_smp, check_strong_comparison, check_wcp, check_wmp,
    default_tolerance, PrincipleReport, Verdict,
};
use plap_core::problem::DEFAULT_NEWTON_TOL;
use plap_core::scenarios::{
    load_results, run_registry, run_scenario, table1_csv, table1_report, Overrides, REGISTRY,
};
use plap_core::{sample, Field, Grid, ProblemSpec, Reaction, Source, SpaceTimeField, TimeMesh};

pub use config::{Config, ConfigError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "plap", version, about = "Numerical laboratory for the evolution p-Laplacian")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the evolution problem described by a `key = value` config
    Solve(SolveArgs),
    /// First Dirichlet eigenvalue of the p-Laplacian and its eigenfunction
    Eigen(EigenArgs),
    /// Sample a closed-form solution or barrier onto a grid
    ClosedForm(ClosedFormArgs),
    /// Build the saddle construction (w0, z, h) and tabulate zeta(t)
    Saddle(SaddleArgs),
    /// Check a maximum or comparison principle on stored runs
    Check(CheckArgs),
    /// Run a named scenario (or `all`)
    Scenario(ScenarioArgs),
    /// Assemble the principle status table from stored scenario results
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Config file with `key = value` lines; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Exponent p > 1
    #[arg(long)]
    pub p: Option<String>,
    /// Reaction coefficient lambda
    #[arg(long)]
    pub lambda: Option<String>,
    /// `a b` for an interval, `radial R N` for a ball
    #[arg(long, allow_hyphen_values = true)]
    pub domain: Option<String>,
    /// Number of grid nodes
    #[arg(long)]
    pub n: Option<String>,
    /// Final time
    #[arg(long = "T")]
    pub t_final: Option<String>,
    /// Number of time steps
    #[arg(long = "mT")]
    pub mt: Option<String>,
    /// power | logistic
    #[arg(long)]
    pub reaction: Option<String>,
    /// Constant a(x) of the logistic reaction
    #[arg(long = "logistic-a")]
    pub logistic_a: Option<String>,
    /// zero | a constant
    #[arg(long, allow_hyphen_values = true)]
    pub source: Option<String>,
    /// zero | sine | bump | barenblatt | extinction | a constant
    #[arg(long, allow_hyphen_values = true)]
    pub initial: Option<String>,
    /// t0 of the extinction preset
    #[arg(long)]
    pub t0: Option<String>,
    /// Flux regularization (default h)
    #[arg(long = "eps-reg")]
    pub eps_reg: Option<String>,
    /// Newton residual tolerance
    #[arg(long = "newton-tol")]
    pub newton_tol: Option<String>,
    /// Write every stride-th time slice to the CSV
    #[arg(long)]
    pub stride: Option<String>,
    /// Artifact root (default $PLAP_OUT_DIR, else plap-out)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    #[arg(long)]
    pub p: f64,
    /// `a b` for an interval, `radial R N` for a ball
    #[arg(long, default_value = "-1 1", allow_hyphen_values = true)]
    pub domain: String,
    #[arg(long, default_value_t = 2049)]
    pub n: usize,
    /// rayleigh | shooting
    #[arg(long, default_value = "rayleigh")]
    pub method: String,
    /// Stopping tolerance of the Rayleigh iteration
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClosedFormArgs {
    /// barenblatt | extinction | cauchy | barrier | subsolution
    pub name: String,
    /// Parameter as key=value; repeatable
    #[arg(long = "param")]
    pub params: Vec<String>,
    /// Evaluation time
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    /// Number of sample points
    #[arg(long, default_value_t = 1201)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SaddleArgs {
    #[arg(long, default_value_t = 1.5)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.49)]
    pub eps1: f64,
    #[arg(long, default_value_t = 4097)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// wmp | smp | wcp | scp | hmp
    #[arg(long)]
    pub principle: String,
    /// Run CSV (`t,x,value`); the smaller solution u for comparisons
    #[arg(long)]
    pub run: PathBuf,
    /// Second run CSV, the larger solution v (wcp, scp)
    #[arg(long)]
    pub run2: Option<PathBuf>,
    /// Tolerance (default max(10 newton_tol, h^2))
    #[arg(long)]
    pub tol: Option<f64>,
    /// Slice index for hmp (default: last)
    #[arg(long)]
    pub slice: Option<usize>,
    /// Slices skipped after t = 0 by the restricted scp check
    #[arg(long = "burn-in", default_value_t = 1)]
    pub burn_in: usize,
    /// scp: require strictness at every later slice instead of only before v loses positivity
    #[arg(long)]
    pub unrestricted: bool,
    /// Read x as the radius of a ball in this dimension
    #[arg(long = "radial-dim")]
    pub radial_dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario name, or `all`
    pub name: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "mT")]
    pub mt: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance of the principle checks
    #[arg(long)]
    pub tol: Option<f64>,
    /// Artifact root (default $PLAP_OUT_DIR, else plap-out)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory holding `<scenario>/result.json`
    #[arg(long = "in")]
    pub input: PathBuf,
    /// CSV destination (default <in>/table1.csv)
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(ConfigError),
    Core(plap_core::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Config(e) => write!(f, "config: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<plap_core::Error> for CliError {
    fn from(e: plap_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_solver_failure() => EXIT_SOLVER,
            _ => EXIT_USAGE,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses argv, runs the subcommand, prints diagnostics to stderr and returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let mut stdout = std::io::stdout().lock();
    match run(cli.command, &mut stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("plap: {e}");
            e.exit_code()
        }
    }
}

/// Runs one subcommand, writing its report to `out`.
pub fn run(command: Command, out: &mut dyn std::io::Write) -> CliResult<i32> {
    match command {
        Command::Solve(a) => solve(a, out),
        Command::Eigen(a) => eigen(a, out),
        Command::ClosedForm(a) => closed_form(a, out),
        Command::Saddle(a) => saddle(a, out),
        Command::Check(a) => check(a, out),
        Command::Scenario(a) => scenario(a, out),
        Command::Report(a) => report(a, out),
    }
}

fn out_root(flag: Option<PathBuf>) -> PathBuf {
    Overrides { out: flag, ..Default::default() }.out_root()
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

/// `a b` or `radial R N`.
pub fn parse_domain(text: &str, n: usize) -> CliResult<Grid> {
    let words: Vec<&str> = text.split_whitespace().collect();
    let bad = || {
        CliError::Config(ConfigError::TypeMismatch {
            key: "domain".into(),
            expected: "`a b` or `radial R N`",
            value: text.to_string(),
        })
    };
    match words.as_slice() {
        ["radial", r, dim] => {
            let r: f64 = r.parse().map_err(|_| bad())?;
            let dim: usize = dim.parse().map_err(|_| bad())?;
            Ok(Grid::radial(r, dim, n)?)
        }
        [a, b] => {
            let a: f64 = a.parse().map_err(|_| bad())?;
            let b: f64 = b.parse().map_err(|_| bad())?;
            Ok(Grid::interval(a, b, n)?)
        }
        _ => Err(bad()),
    }
}

pub const SOLVE_KEYS: [&str; 14] = [
    "p", "lambda", "domain", "n", "T", "mT", "reaction", "logistic_a", "source", "initial", "t0",
    "eps_reg", "newton_tol", "stride",
];
pub const SOLVE_REQUIRED: [&str; 5] = ["p", "n", "T", "mT", "initial"];

/// Config of `plap solve`: the file (if any) with flags layered on top.
pub fn solve_config(a: &SolveArgs) -> CliResult<Config> {
    let mut cfg = match &a.config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    let flags = [
        ("p", &a.p),
        ("lambda", &a.lambda),
        ("domain", &a.domain),
        ("n", &a.n),
        ("T", &a.t_final),
        ("mT", &a.mt),
        ("reaction", &a.reaction),
        ("logistic_a", &a.logistic_a),
        ("source", &a.source),
        ("initial", &a.initial),
        ("t0", &a.t0),
        ("eps_reg", &a.eps_reg),
        ("newton_tol", &a.newton_tol),
        ("stride", &a.stride),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v.clone());
        }
    }
    cfg.validate(&SOLVE_KEYS, &SOLVE_REQUIRED)?;
    Ok(cfg)
}

fn required<T>(v: Option<T>) -> T {
    v.expect("presence checked by Config::validate")
}

/// Builds the problem and time mesh of a validated solve config.
pub fn build_problem(cfg: &Config) -> CliResult<(ProblemSpec, TimeMesh)> {
    let p = required(cfg.real("p")?);
    let lambda = cfg.real("lambda")?.unwrap_or(0.0);
    let n = required(cfg.integer("n")?);
    let grid = parse_domain(cfg.raw("domain").unwrap_or("-1 1"), n)?;
    let tmesh = TimeMesh::new(required(cfg.real("T")?), required(cfg.integer("mT")?))?;

    let initial = required(cfg.string("initial"));
    let u0 = match initial.as_str() {
        "zero" => Field::zeros(grid),
        "sine" => {
            // first Dirichlet mode of the interval, cos(pi r / 2R) on a ball
            let (a, b) = (grid.node(0), grid.node(n - 1));
            if grid.is_radial() {
                sample(&grid, |r| (std::f64::consts::FRAC_PI_2 * r / b).cos())?
            } else {
                sample(&grid, |x| (std::f64::consts::PI * (x - a) / (b - a)).sin())?
            }
        }
        "bump" => sample(&grid, |x| (0.25 - x * x).max(0.0))?,
        "barenblatt" => {
            let params = BarenblattParams::new(p, grid.dim(), 1.0, 1.0)?;
            let values = (0..n).map(|i| barenblatt(grid.radius_of(i), 0.0, &params)).collect();
            Field::new(grid, values)?
        }
        "extinction" => {
            let t0 = cfg.real("t0")?.unwrap_or(0.5);
            if grid.is_radial() || grid.node(0) != -1.0 || grid.node(n - 1) != 1.0 {
                return Err(CliError::Usage("initial = extinction needs domain = -1 1".into()));
            }
            let params = ExtinctionParams::new(p, t0, n)?;
            params.profile.scaled(extinction_amplitude(0.0, &params))
        }
        other => match other.parse::<f64>() {
            Ok(c) if c.is_finite() => sample(&grid, |_| c)?,
            _ => {
                return Err(ConfigError::TypeMismatch {
                    key: "initial".into(),
                    expected: "zero, sine, bump, barenblatt, extinction or a number",
                    value: other.to_string(),
                }
                .into())
            }
        },
    };

    let source = match cfg.raw("source").unwrap_or("zero") {
        "zero" => Source::Zero,
        other => match other.parse::<f64>() {
            Ok(c) if c.is_finite() => Source::Constant(c),
            _ => {
                return Err(ConfigError::TypeMismatch {
                    key: "source".into(),
                    expected: "zero or a number",
                    value: other.to_string(),
                }
                .into())
            }
        },
    };

    let mut spec = ProblemSpec::new(p, lambda, u0, source)?;
    if cfg.choice("reaction", &["power", "logistic"])? == Some("logistic") {
        let a = cfg.real("logistic_a")?.unwrap_or(1.0);
        spec = spec.with_reaction(Reaction::Logistic(sample(&grid, |_| a)?));
    }
    if let Some(e) = cfg.real("eps_reg")? {
        spec = spec.with_eps_reg(e);
    }
    if let Some(t) = cfg.real("newton_tol")? {
        spec = spec.with_newton_tol(t);
    }
    spec.validate()?;
    Ok((spec, tmesh))
}

fn solve(a: SolveArgs, out: &mut dyn std::io::Write) -> CliResult<i32> {
    let cfg = solve_config(&a)?;
    let (spec, tmesh) = build_problem(&cfg)?;
    let stride = cfg.integer("stride")?.unwrap_or(1).max(1);
    if tmesh.steps() % stride != 0 {
        return Err(CliError::Usage(format!("stride {stride} must divide mT = {}", tmesh.steps())));
    }
    let sol = solve_parabolic(&spec, &tmesh)?;
    let dir = out_root(a.out).join("solve");
    fs::create_dir_all(&dir)?;
    let csv = dir.join("solution.csv");
    let field = if stride > 1 { sol.field.subsample(stride)? } else { sol.field.clone() };
    field.write_csv(std::io::BufWriter::new(fs::File::create(&csv)?))?;

    let mut s = String::new();
    let _ = writeln!(s, "p={}", spec.p);
    let _ = writeln!(s, "lambda={}", spec.lambda);
    let _ = writeln!(s, "n={}", spec.grid.n());
    let _ = writeln!(s, "h={}", fmt_num(spec.grid.h()));
    let _ = writeln!(s, "T={}", tmesh.t_final());
    let _ = writeln!(s, "mT={}", tmesh.steps());
    let _ = writeln!(s, "dt={}", fmt_num(tmesh.dt()));
    let _ = writeln!(s, "eps_reg={}", fmt_num(spec.eps_reg));
    let _ = writeln!(s, "newton_tol={}", fmt_num(spec.newton_tol));
    let _ = writeln!(s, "steps={}", sol.reports.len());
    let _ = writeln!(s, "newton_iterations={}", sol.total_newton_iters());
    let _ = writeln!(s, "substep_retries={}", sol.reports.iter().filter(|r| r.substeps > 1).count());
    let _ = writeln!(s, "max_step_residual={}", fmt_num(sol.max_residual()));
    let _ = writeln!(s, "sup_initial={}", fmt_num(plap_core::sup_norm(sol.field.slice(0))));
    let _ = writeln!(s, "sup_final={}", fmt_num(plap_core::sup_norm(sol.field.last())));
    let _ = writeln!(s, "solution={}", csv.display());
    write_file(&dir.join("summary.txt"), &s)?;
    write!(out, "{s}")?;
    Ok(EXIT_OK)
}

fn eigen(a: EigenArgs, out: &mut dyn std::io::Write) -> CliResult<i32> {
    let grid = parse_domain(&a.domain, a.n)?;
    let (lambda, field) = match a.method.as_str() {
        "rayleigh" => lambda1_rayleigh(&grid, a.p, a.tol)?,
        "shooting" => {
            if grid.is_radial() {
                return Err(CliError::Usage("the shooting method covers intervals only".into()));
            }
            let (lo, hi) = (grid.node(0), grid.node(grid.n() - 1));
            let lambda = lambda1_shooting(a.p, hi - lo)?;
            let mid = 0.5 * (lo + hi);
            let xs: Vec<f64> = grid.nodes().iter().map(|x| (x - mid).abs()).collect();
            let mut vals = shooting_eigenfunction(a.p, lambda, &xs)?;
            for i in grid.boundary_nodes() {
                vals[i] = 0.0;
            }
            (lambda, Field::new(grid, vals)?)
        }
        other => return Err(CliError::Usage(format!("unknown method `{other}` (rayleigh | shooting)"))),
    };
    let dir = out_root(a.out).join("eigen");
    let path = dir.join(format!("eigenfunction_{}.csv", a.method));
    write_file(&path, &field.to_csv_string())?;
    writeln!(out, "method={}", a.method)?;
    writeln!(out, "p={}", a.p)?;
    writeln!(out, "n={}", a.n)?;
    writeln!(out, "lambda1={}", fmt_num(lambda))?;
    if !grid.is_radial() {
        writeln!(out, "reference={}", fmt_num(lambda1_interval(a.p, grid.length())))?;
    }
    writeln!(out, "eigenfunction={}", path.display())?;
    Ok(EXIT_OK)
}

fn param_config(params: &[String], allowed: &[&str]) -> CliResult<Config> {
    let mut cfg = Config::default();
    for p in params {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--param expects key=value, got `{p}`")))?;
        cfg.set(k.trim(), v.trim());
    }
    cfg.validate(allowed, &[])?;
    Ok(cfg)
}

fn closed_form(a: ClosedFormArgs, out: &mut dyn std::io::Write) -> CliResult<i32> {
    if a.n < 3 {
        return Err(CliError::Usage("--n must be at least 3".into()));
    }
    let mut summary: Vec<(String, f64)> = Vec::new();
    let csv = match a.name.as_str() {
        "barenblatt" => {
            let c = param_config(&a.params, &["p", "N", "C", "alpha", "L"])?;
            let params = BarenblattParams::new(
                c.real("p")?.unwrap_or(3.0),
                c.integer("N")?.unwrap_or(1),
                c.real("C")?.unwrap_or(1.0),
                c.real("alpha")?.unwrap_or(1.0),
            )?;
            let half = c.real("L")?.unwrap_or(6.0);
            let grid = Grid::interval(-half, half, a.n)?;
            summary.push(("support_radius".into(), barenblatt_support_radius(a.t, &params)));
            summary.push(("k".into(), params.k()));
            sample(&grid, |x| barenblatt(x.abs(), a.t, &params))?.to_csv_string()
        }
        "extinction" => {
            let c = param_config(&a.params, &["p", "t0"])?;
            let params = ExtinctionParams::new(c.real("p")?.unwrap_or(1.5), c.real("t0")?.unwrap_or(0.5), a.n)?;
            summary.push(("extinction_time".into(), extinction_time(&params)));
            summary.push(("amplitude".into(), extinction_amplitude(a.t, &params)));
            let grid = *params.profile.grid();
            sample(&grid, |x| extinction_solution(x, a.t, &params))?.to_csv_string()
        }
        "cauchy" => {
            let c = param_config(&a.params, &["p", "T"])?;
            let p = c.real("p")?.unwrap_or(1.5);
            let t_final = c.real("T")?.unwrap_or(2.0);
            let mut s = String::from("t,value\n");
            for k in 0..a.n {
                let t = t_final * k as f64 / (a.n - 1) as f64;
                let _ = writeln!(s, "{},{}", fmt_num(t), fmt_num(cauchy_solution(t, p)?));
            }
            summary.push(("value_at_T".into(), cauchy_solution(t_final, p)?));
            s
        }
        "barrier" => {
            let c = param_config(&a.params, &["eps", "alpha", "R", "x0", "t0", "L"])?;
            let params = BarrierParams {
                eps: c.real("eps")?.unwrap_or(1.0),
                alpha: c.real("alpha")?.unwrap_or(1.0),
                radius: c.real("R")?.unwrap_or(1.0),
                x0: vec![c.real("x0")?.unwrap_or(0.0)],
                t0: c.real("t0")?.unwrap_or(0.0),
            };
            if !(params.eps > 0.0 && params.alpha > 0.0 && params.radius > 0.0) {
                return Err(CliError::Usage("barrier needs eps, alpha, R > 0".into()));
            }
            let half = c.real("L")?.unwrap_or(params.radius);
            let grid = Grid::interval(params.x0[0] - half, params.x0[0] + half, a.n)?;
            summary.push(("peak".into(), hopf_barrier(&params.x0, params.t0, &params)));
            sample(&grid, |x| hopf_barrier(&[x], a.t, &params))?.to_csv_string()
        }
        "subsolution" => {
            let c = param_config(&a.params, &["p", "C", "m", "R", "T"])?;
            let p = c.real("p")?.unwrap_or(3.0);
            let m = match c.real("m")? {
                Some(m) => m,
                None => admissible_m(p)?,
            };
            let params = SubsolutionParams {
                c: c.real("C")?.unwrap_or(1.0),
                m,
                radius: c.real("R")?.unwrap_or(1.0),
                t_final: c.real("T")?.unwrap_or(1.0),
            };
            summary.push(("m".into(), m));
            let grid = Grid::interval(-params.radius, params.radius, a.n)?;
            sample(&grid, |x| degenerate_subsolution(x.abs(), a.t, &params))?.to_csv_string()
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown closed form `{other}` (barenblatt | extinction | cauchy | barrier | subsolution)"
            )))
        }
    };
    let path = out_root(a.out).join("closed-form").join(format!("{}.csv", a.name));
    write_file(&path, &csv)?;
    writeln!(out, "name={}", a.name)?;
    writeln!(out, "t={}", a.t)?;
    for (k, v) in summary {
        writeln!(out, "{k}={}", fmt_num(v))?;
    }
    writeln!(out, "csv={}", path.display())?;
    Ok(EXIT_OK)
}

fn saddle(a: SaddleArgs, out: &mut dyn std::io::Write) -> CliResult<i32> {
    let grid = Grid::interval(-1.0, 1.0, a.n)?;
    let c = build_saddle_construction(&grid, a.p, a.lambda, a.eps, a.eps1)?;
    let dir = out_root(a.out).join("saddle");
    write_file(&dir.join("w0.csv"), &c.w0.to_csv_string())?;
    write_file(&dir.join("z.csv"), &c.z.to_csv_string())?;
    write_file(&dir.join("h.csv"), &c.h_src.to_csv_string())?;
    // log grid 1e−6 … 1e−1, five points per decade
    let mut table = String::from("t,zeta\n");
    for j in 0..=25 {
        let t = 10f64.powf(-6.0 + j as f64 / 5.0);
        let _ = writeln!(table, "{},{}", fmt_num(t), fmt_num(zeta(t, &c, a.p, a.lambda)?));
    }
    write_file(&dir.join("zeta.csv"), &table)?;
    let hv = c.h_src.values();
    writeln!(out, "m={}", fmt_num(c.m))?;
    writeln!(out, "eps={}", a.eps)?;
    writeln!(out, "eps1={}", a.eps1)?;
    writeln!(out, "r_star={}", fmt_num(c.profile.r_star()))?;
    writeln!(out, "h_min={}", fmt_num(hv.iter().cloned().fold(f64::INFINITY, f64::min)))?;
    writeln!(out, "h_max={}", fmt_num(hv.iter().cloned().fold(f64::NEG_INFINITY, f64::max)))?;
    writeln!(out, "zeta_1e-3={}", fmt_num(zeta(1e-3, &c, a.p, a.lambda)?))?;
    writeln!(out, "dir={}", dir.display())?;
    Ok(EXIT_OK)
}

fn read_run(path: &Path, radial_dim: Option<usize>) -> CliResult<SpaceTimeField> {
    let f = fs::File::open(path)
        .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
    Ok(SpaceTimeField::read_csv(BufReader::new(f), radial_dim)?)
}

fn check(a: CheckArgs, out: &mut dyn std::io::Write) -> CliResult<i32> {
    let u = read_run(&a.run, a.radial_dim)?;
    let tol = a.tol.unwrap_or_else(|| default_tolerance(u.grid().h(), DEFAULT_NEWTON_TOL));
    let second = || -> CliResult<SpaceTimeField> {
        match &a.run2 {
            Some(p) => read_run(p, a.radial_dim),
            None => Err(CliError::Usage(format!("--principle {} needs --run2", a.principle))),
        }
    };
    let report: PrincipleReport = match a.principle.as_str() {
        "wmp" => check_wmp(&u, tol),
        "smp" => check_smp(&u, tol),
        "wcp" => check_wcp(&u, &second()?, tol)?,
        "scp" if a.unrestricted => check_strong_comparison(&u, &second()?, tol)?,
        "scp" => check_scp(&u, &second()?, tol, a.burn_in)?,
        "hmp" => {
            let k = a.slice.unwrap_or(u.tmesh().steps());
            if k > u.tmesh().steps() {
                return Err(CliError::Usage(format!("slice {k} beyond the last slice {}", u.tmesh().steps())));
            }
            check_hopf(&u, k, tol)?
        }
        other => {
            return Err(CliError::Usage(format!("unknown principle `{other}` (wmp | smp | wcp | scp | hmp)")))
        }
    };
    write!(out, "{}", report.to_text())?;
    Ok(if report.verdict == Verdict::Violated { EXIT_VIOLATED } else { EXIT_OK })
}

fn scenario(a: ScenarioArgs, out: &mut dyn std::io::Write) -> CliResult<i32> {
    let o = Overrides { n: a.n, mt: a.mt, seed: a.seed, tol: a.tol, out: a.out };
    let results = if a.name == "all" {
        run_registry(&o)
    } else if REGISTRY.contains(&a.name.as_str()) {
        vec![(a.name.clone(), run_scenario(&a.name, &o))]
    } else {
        return Err(CliError::Usage(format!(
            "unknown scenario `{}`; known: {}, all",
            a.name,
            REGISTRY.join(", ")
        )));
    };
    let mut code = EXIT_OK;
    for (name, r) in results {
        match r {
            Ok(r) => {
                write!(out, "{}", r.to_text())?;
                writeln!(out, "dir={}", o.out_root().join(&name).display())?;
                if !r.pass {
                    code = code.max(EXIT_VIOLATED);
                }
            }
            Err(e) => {
                eprintln!("plap: scenario {name}: {e}");
                let c = CliError::Core(e).exit_code();
                code = code.max(c);
            }
        }
    }
    Ok(code)
}

fn report(a: ReportArgs, out: &mut dyn std::io::Write) -> CliResult<i32> {
    if !a.input.is_dir() {
        return Err(CliError::Usage(format!("{} is not a directory", a.input.display())));
    }
    let results = load_results(&a.input)?;
    if results.is_empty() {
        return Err(CliError::Usage(format!("no scenario results under {}", a.input.display())));
    }
    let csv_path = a.csv.unwrap_or_else(|| a.input.join("table1.csv"));
    write_file(&csv_path, &table1_csv(&results))?;
    write!(out, "{}", table1_report(&results))?;
    writeln!(out, "csv={}", csv_path.display())?;
    Ok(EXIT_OK)
}
