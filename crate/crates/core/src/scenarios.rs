//! Named, reproducible experiments. Each one runs solves or certifications, applies the
//! principle checks and records which cell of the maximum/comparison status table it informs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_forms::{
    barenblatt, barenblatt_support_radius, cauchy_solution, extinction_time, lambda1_interval,
    BarenblattParams, ExtinctionParams,
};
use crate::elliptic::{
    build_saddle_construction, elliptic_residual, energy, lambda1_rayleigh, minimize_energy_with,
    solve_logistic, zeta, EnergySpec, MinimizeOptions,
};
use crate::error::{Error, Result};
use crate::grid::{sample, sup_diff, sup_norm, Field, Grid, SpaceTimeField, TimeMesh};
use crate::parabolic::{residual_slice, solve_parabolic};
use crate::principles::{
    check_hopf, check_scp, check_smp, check_strong_comparison, check_wcp, check_wmp,
    default_tolerance, extinction_time_estimate, positivity_index, positivity_time,
    support_radius, Principle, PrincipleReport, Verdict,
};
use crate::problem::{ProblemSpec, Source, DEFAULT_NEWTON_TOL};

pub const REGISTRY: [&str; 7] = [
    "barenblatt-smp-failure",
    "extinction",
    "smp-positivity",
    "saddle-nonuniqueness",
    "logistic-nonuniqueness",
    "wcp-regimes",
    "scp-slow-diffusion",
];

pub const DEFAULT_SEED: u64 = 20_240_917;
/// Saved space-time CSVs keep at most this many time intervals.
pub const MAX_CSV_INTERVALS: usize = 100;
pub const RESULT_FILE: &str = "result.json";

/// Mesh sizes, seed, tolerance and artifact directory; everything else is fixed per scenario.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub mt: Option<usize>,
    pub seed: Option<u64>,
    /// Replaces the tolerance of the principle checks.
    pub tol: Option<f64>,
    /// Root artifact directory; `PLAP_OUT_DIR` or `plap-out` when absent.
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn out_root(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os("PLAP_OUT_DIR").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("plap-out"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Regime {
    NonPositive,
    UpToFirst,
    AboveFirst,
    AnyLambda,
}

impl Regime {
    pub fn classify(lambda: f64, lambda1: f64) -> Regime {
        if lambda <= 0.0 {
            Regime::NonPositive
        } else if lambda <= lambda1 {
            Regime::UpToFirst
        } else {
            Regime::AboveFirst
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::NonPositive => "lambda<=0",
            Regime::UpToFirst => "0<lambda<=lambda1",
            Regime::AboveFirst => "lambda>lambda1",
            Regime::AnyLambda => "lambda real",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PClass {
    Fast,
    Slow,
    Linear,
}

impl PClass {
    pub fn classify(p: f64) -> PClass {
        if p < 2.0 {
            PClass::Fast
        } else if p > 2.0 {
            PClass::Slow
        } else {
            PClass::Linear
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PClass::Fast => "p<2",
            PClass::Slow => "p>2",
            PClass::Linear => "p=2",
        }
    }
}

/// Table symbol. `Conditional` is the "holds under additional assumptions" mark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Symbol {
    Holds,
    Fails,
    Conditional,
    Open,
}

impl Symbol {
    pub fn as_str(&self) -> &'static str {
        match self {
            Symbol::Holds => "+",
            Symbol::Fails => "−",
            Symbol::Conditional => "±",
            Symbol::Open => "?",
        }
    }

    fn parse_cell(text: &str) -> Vec<Symbol> {
        text.split('/')
            .map(|s| match s.trim() {
                "+" => Symbol::Holds,
                "−" => Symbol::Fails,
                "±" => Symbol::Conditional,
                _ => Symbol::Open,
            })
            .collect()
    }
}

/// One scenario's contribution to a table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellEvidence {
    pub regime: Regime,
    pub p_class: PClass,
    pub principle: Principle,
    pub symbol: Symbol,
}

/// A scalar acceptance condition of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub value: f64,
    /// `<`, `<=` or `>`.
    pub relation: String,
    pub bound: f64,
    pub ok: bool,
}

impl Criterion {
    fn below(name: &str, value: f64, bound: f64) -> Self {
        Criterion {
            name: name.into(),
            value,
            relation: "<".into(),
            bound,
            ok: value < bound,
        }
    }

    fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Criterion {
            name: name.into(),
            value,
            relation: "<=".into(),
            bound,
            ok: value <= bound,
        }
    }

    fn above(name: &str, value: f64, bound: f64) -> Self {
        Criterion {
            name: name.into(),
            value,
            relation: ">".into(),
            bound,
            ok: value > bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub name: String,
    pub claim: String,
    pub reports: Vec<PrincipleReport>,
    /// Expected verdict of each report, in the same order; `None` for purely empirical ones.
    pub expected: Vec<Option<Verdict>>,
    pub criteria: Vec<Criterion>,
    pub artifacts: Vec<PathBuf>,
    pub evidence: Vec<CellEvidence>,
    pub metrics: BTreeMap<String, f64>,
    pub n: usize,
    pub mt: usize,
    pub seed: Option<u64>,
    pub pass: bool,
}

impl ScenarioResult {
    fn new(name: &str, claim: &str, n: usize, mt: usize) -> Self {
        ScenarioResult {
            name: name.into(),
            claim: claim.into(),
            reports: Vec::new(),
            expected: Vec::new(),
            criteria: Vec::new(),
            artifacts: Vec::new(),
            evidence: Vec::new(),
            metrics: BTreeMap::new(),
            n,
            mt,
            seed: None,
            pass: false,
        }
    }

    fn report(&mut self, r: PrincipleReport, expected: Option<Verdict>) {
        self.reports.push(r);
        self.expected.push(expected);
    }

    fn cell(&mut self, regime: Regime, p_class: PClass, principle: Principle, symbol: Symbol) {
        self.evidence.push(CellEvidence {
            regime,
            p_class,
            principle,
            symbol,
        });
    }

    fn metric(&mut self, key: &str, value: f64) {
        // JSON has no infinities; an absent key means "not attained"
        if value.is_finite() {
            self.metrics.insert(key.into(), value);
        }
    }

    fn finish(&mut self) {
        let reports_ok = self
            .reports
            .iter()
            .zip(&self.expected)
            .all(|(r, e)| e.map_or(true, |e| r.verdict == e));
        self.pass = reports_ok && self.criteria.iter().all(|c| c.ok);
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "scenario={}\nclaim={}\npass={}\nn={}\nmT={}\n",
            self.name, self.claim, self.pass, self.n, self.mt
        );
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "seed={seed}");
        }
        for (r, e) in self.reports.iter().zip(&self.expected) {
            let exp = e.map_or("any".to_string(), |v| v.to_string());
            let _ = writeln!(
                s,
                "check {} verdict={} expected={} margin={:.6e} tol={:.3e} {}",
                r.principle, r.verdict, exp, r.margin, r.tolerance, r.note
            );
        }
        for c in &self.criteria {
            let _ = writeln!(
                s,
                "criterion {} = {:.6e} {} {:.6e} ok={}",
                c.name, c.value, c.relation, c.bound, c.ok
            );
        }
        for (k, v) in &self.metrics {
            let _ = writeln!(s, "metric {k} = {v:.12e}");
        }
        for a in &self.artifacts {
            let _ = writeln!(s, "artifact {}", a.display());
        }
        s
    }

    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(RESULT_FILE);
        fs::write(&path, serde_json::to_string_pretty(self)?)?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<ScenarioResult> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Smallest n at which the scenario's tolerances are meaningful.
pub fn min_n(name: &str) -> Option<usize> {
    Some(match name {
        "barenblatt-smp-failure" => 513,
        "extinction" => 257,
        "smp-positivity" => 129,
        "saddle-nonuniqueness" => 1025,
        "logistic-nonuniqueness" => 257,
        "wcp-regimes" => 33,
        "scp-slow-diffusion" => 129,
        _ => return None,
    })
}

fn default_n(name: &str) -> usize {
    match name {
        "saddle-nonuniqueness" => 4097,
        "wcp-regimes" => 201,
        _ => 2049,
    }
}

fn default_mt(name: &str) -> usize {
    match name {
        "wcp-regimes" => 100,
        _ => 2000,
    }
}

/// Runs one registry scenario, writes its artifacts under `<out>/<name>/` and returns the
/// result (also saved as `result.json` there).
pub fn run_scenario(name: &str, overrides: &Overrides) -> Result<ScenarioResult> {
    let min = min_n(name).ok_or_else(|| Error::UnknownScenario(name.into()))?;
    let n = overrides.n.unwrap_or_else(|| default_n(name));
    if n < min {
        return Err(Error::Preflight {
            scenario: name.into(),
            n,
            min_n: min,
        });
    }
    let mt = overrides.mt.unwrap_or_else(|| default_mt(name));
    if mt < 2 {
        return Err(Error::InvalidParameter(format!("mT = {mt} is too small")));
    }
    let dir = overrides.out_root().join(name);
    fs::create_dir_all(&dir)?;
    let ctx = Ctx {
        n,
        mt,
        tol: overrides.tol,
        seed: overrides.seed.unwrap_or(DEFAULT_SEED),
        dir: dir.clone(),
    };
    let start = Instant::now();
    let mut result = match name {
        "barenblatt-smp-failure" => barenblatt_smp_failure(&ctx)?,
        "extinction" => extinction(&ctx)?,
        "smp-positivity" => smp_positivity(&ctx)?,
        "saddle-nonuniqueness" => saddle_nonuniqueness(&ctx)?,
        "logistic-nonuniqueness" => logistic_nonuniqueness(&ctx)?,
        "wcp-regimes" => wcp_regimes(&ctx)?,
        "scp-slow-diffusion" => scp_slow_diffusion(&ctx)?,
        _ => unreachable!("checked by min_n"),
    };
    result.metric("runtime_seconds", start.elapsed().as_secs_f64());
    result.finish();
    result.save(&dir)?;
    Ok(result)
}

/// Runs the whole registry concurrently, each scenario in its own artifact directory.
pub fn run_registry(overrides: &Overrides) -> Vec<(String, Result<ScenarioResult>)> {
    REGISTRY
        .par_iter()
        .map(|name| (name.to_string(), run_scenario(name, overrides)))
        .collect()
}

/// Reads every `<dir>/*/result.json`, sorted by scenario name.
pub fn load_results(dir: &Path) -> Result<Vec<ScenarioResult>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path().join(RESULT_FILE);
        if path.is_file() {
            out.push(ScenarioResult::load(&path)?);
        }
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

struct Ctx {
    n: usize,
    mt: usize,
    tol: Option<f64>,
    seed: u64,
    dir: PathBuf,
}

impl Ctx {
    fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn write_field(&self, name: &str, f: &Field) -> Result<PathBuf> {
        let path = self.dir.join(name);
        f.write_csv(BufWriter::new(fs::File::create(&path)?))?;
        Ok(path)
    }

    /// Saves at most MAX_CSV_INTERVALS + 1 slices (the stride divides mT).
    fn write_run(&self, name: &str, stf: &SpaceTimeField) -> Result<PathBuf> {
        let steps = stf.tmesh().steps();
        let stride = (1..=steps)
            .find(|s| steps % s == 0 && steps / s <= MAX_CSV_INTERVALS)
            .unwrap_or(steps);
        let path = self.dir.join(name);
        stf.subsample(stride)?
            .write_csv(BufWriter::new(fs::File::create(&path)?))?;
        Ok(path)
    }
}

fn check_solver_tol(spec: &ProblemSpec, grid: &Grid) -> f64 {
    default_tolerance(grid.h(), spec.newton_tol)
}

/// Largest interior residual of u(x, t) = w(x)·v(t) over the time slices 1..mT−1, skipping
/// nodes flagged in `skip`.
pub fn separable_residual(
    spec: &ProblemSpec,
    tmesh: &TimeMesh,
    w: &Field,
    v: impl Fn(f64) -> f64,
    skip: Option<&[bool]>,
) -> Result<f64> {
    let dt = tmesh.dt();
    let at = |k: usize| w.scaled(v(tmesh.time(k)));
    let (mut prev, mut cur) = (at(0), at(1));
    let mut worst = 0.0f64;
    for k in 1..tmesh.steps() {
        let next = at(k + 1);
        let r = residual_slice(&prev, &cur, &next, tmesh.time(k), dt, spec)?;
        for (i, x) in r.values().iter().enumerate() {
            if skip.map_or(true, |s| !s[i]) {
                worst = worst.max(x.abs());
            }
        }
        prev = cur;
        cur = next;
    }
    Ok(worst)
}

/// Interior residual sup-norm of the closed-form Barenblatt solution on (−6, 6) × (0, T),
/// restricted to |x| < 0.9 × support radius.
pub fn barenblatt_residual(params: &BarenblattParams, n: usize, mt: usize, t_final: f64) -> Result<f64> {
    let grid = Grid::interval(-6.0, 6.0, n)?;
    let tmesh = TimeMesh::new(t_final, mt)?;
    let at = |k: usize| sample(&grid, |x| barenblatt(x.abs(), tmesh.time(k), params));
    let spec = ProblemSpec::new(params.p, 0.0, at(0)?, Source::Zero)?.with_eps_reg(0.0);
    let (mut prev, mut cur) = (at(0)?, at(1)?);
    let mut worst = 0.0f64;
    for k in 1..mt {
        let next = at(k + 1)?;
        let t = tmesh.time(k);
        let r = residual_slice(&prev, &cur, &next, t, tmesh.dt(), &spec)?;
        let reach = 0.9 * barenblatt_support_radius(t, params);
        for (i, x) in r.values().iter().enumerate() {
            if grid.node(i).abs() < reach {
                worst = worst.max(x.abs());
            }
        }
        prev = cur;
        cur = next;
    }
    Ok(worst)
}

fn barenblatt_smp_failure(ctx: &Ctx) -> Result<ScenarioResult> {
    let mut res = ScenarioResult::new(
        "barenblatt-smp-failure",
        "slow diffusion: the strong maximum principle fails through finite speed of propagation (shifted Barenblatt solution, p = 3)",
        ctx.n,
        ctx.mt,
    );
    let params = BarenblattParams::new(3.0, 1, 1.0, 1.0)?;
    let grid = Grid::interval(-6.0, 6.0, ctx.n)?;
    let tmesh = TimeMesh::new(1.0, ctx.mt)?;
    let u0 = sample(&grid, |x| barenblatt(x.abs(), 0.0, &params))?;
    let spec = ProblemSpec::new(3.0, 0.0, u0, Source::Zero)?.with_eps_reg(0.0);
    let sol = solve_parabolic(&spec, &tmesh)?;
    let u = &sol.field;
    // the front is resolved to ~h, far above rounding but below any visible amplitude
    let support_tol = 1e-8;
    let tol = ctx.tol_or(check_solver_tol(&spec, &grid));

    let mut worst = 0.0f64;
    let mut monotone = true;
    let mut last = 0.0;
    for k in 0..=ctx.mt {
        let r = support_radius(u.slice(k), support_tol);
        worst = worst.max((r - barenblatt_support_radius(tmesh.time(k), &params)).abs());
        monotone &= r >= last;
        last = r;
    }
    let (t_bar, t_star) = positivity_time(u, tol);
    res.metric("support_error_over_h", worst / grid.h());
    res.metric("support_monotone", if monotone { 1.0 } else { 0.0 });
    res.metric("t_bar", t_bar);
    res.metric("t_star", t_star);
    res.metric("max_step_residual", sol.max_residual());
    let hopf = check_hopf(u, ctx.mt, tol)?;
    let boundary_derivative = hopf.margin.abs();
    res.metric("boundary_derivative_abs", boundary_derivative);

    res.criteria.push(Criterion::at_most("support_error_over_h", worst / grid.h(), 2.0));
    res.criteria.push(Criterion::below("t_bar", t_bar, 3.0 * tmesh.dt()));
    res.criteria.push(Criterion::below("boundary_derivative_abs", boundary_derivative, tol));

    res.report(check_wmp(u, tol), Some(Verdict::Holds));
    res.report(check_smp(u, tol), Some(Verdict::Violated));
    let zero = SpaceTimeField::zeros(&grid, &tmesh);
    res.report(check_strong_comparison(&zero, u, tol)?, Some(Verdict::Violated));
    res.report(hopf, Some(Verdict::Inconclusive));

    res.cell(Regime::NonPositive, PClass::Slow, Principle::Wmp, Symbol::Holds);
    res.cell(Regime::NonPositive, PClass::Slow, Principle::Smp, Symbol::Fails);
    res.cell(Regime::NonPositive, PClass::Slow, Principle::Scp, Symbol::Fails);
    res.artifacts.push(ctx.write_run("solution.csv", u)?);
    Ok(res)
}

/// Threshold below which a slice counts as extinct for the extinction-time estimate.
pub const EXTINCTION_SUP_TOL: f64 = 1e-5;
/// Positivity threshold of the extinction run; see the tolerance discussion in the README.
pub const EXTINCTION_POSITIVITY_TOL: f64 = 1e-10;

fn extinction(ctx: &Ctx) -> Result<ScenarioResult> {
    let mut res = ScenarioResult::new(
        "extinction",
        "fast diffusion: the separable solution with t0 = 0.5, p = 1.5 vanishes identically at t0/(2−p) = 1",
        ctx.n,
        ctx.mt,
    );
    let params = ExtinctionParams::new(1.5, 0.5, ctx.n)?;
    let grid = *params.profile.grid();
    let t_ext = extinction_time(&params);
    let tmesh = TimeMesh::new(1.2 * t_ext, ctx.mt)?;
    let dt = tmesh.dt();
    let u0 = params.profile.scaled(crate::closed_forms::extinction_amplitude(0.0, &params));
    let spec = ProblemSpec::new(1.5, 0.0, u0, Source::Zero)?
        .with_eps_reg(1e-10)
        .with_newton_tol(1e-10);
    let sol = solve_parabolic(&spec, &tmesh)?;
    let u = &sol.field;
    let tol = ctx.tol_or(EXTINCTION_POSITIVITY_TOL);

    let sups: Vec<f64> = u.slices().iter().map(sup_norm).collect();
    let near_end = (0..=ctx.mt)
        .filter(|&k| (tmesh.time(k) - t_ext).abs() <= 2.0 * dt + 1e-12)
        .map(|k| sups[k])
        .fold(0.0f64, f64::max);
    let before = (0..=ctx.mt)
        .filter(|&k| tmesh.time(k) < 0.9 * t_ext)
        .map(|k| sups[k])
        .fold(f64::INFINITY, f64::min);
    let estimate = extinction_time_estimate(u, EXTINCTION_SUP_TOL);
    let kb = positivity_index(u, tol);
    let ks = crate::principles::nontrivial_index(u, tol).max(kb);
    let (t_bar, t_star) = positivity_time(u, tol);
    res.metric("exact_extinction_time", t_ext);
    res.metric("extinction_estimate", estimate);
    res.metric("sup_near_extinction", near_end);
    res.metric("min_sup_before_0.9", before);
    res.metric("t_bar", t_bar);
    res.metric("t_star", t_star);
    res.metric("dt", dt);
    res.metric("max_step_residual", sol.max_residual());

    res.criteria.push(Criterion::below("sup_within_2dt_of_extinction", near_end, 1e-3));
    res.criteria.push(Criterion::above("min_sup_before_0.9", before, 1e-2));
    res.criteria.push(Criterion::at_most(
        "extinction_estimate_error_over_dt",
        (estimate - t_ext).abs() / dt,
        2.0,
    ));
    res.criteria.push(Criterion::at_most(
        "t_star_minus_t_bar_slices",
        (ks - kb) as f64,
        1.0,
    ));

    res.report(check_wmp(u, tol), Some(Verdict::Holds));
    res.report(check_smp(u, tol), Some(Verdict::Violated));
    let zero = SpaceTimeField::zeros(&grid, &tmesh);
    res.report(check_strong_comparison(&zero, u, tol)?, Some(Verdict::Violated));
    res.report(check_hopf(u, tmesh.nearest(0.5 * t_ext), tol)?, Some(Verdict::Holds));

    res.cell(Regime::NonPositive, PClass::Fast, Principle::Wmp, Symbol::Holds);
    res.cell(Regime::NonPositive, PClass::Fast, Principle::Smp, Symbol::Fails);
    res.cell(Regime::NonPositive, PClass::Fast, Principle::Scp, Symbol::Fails);
    res.artifacts.push(ctx.write_run("solution.csv", u)?);
    Ok(res)
}

fn smp_positivity(ctx: &Ctx) -> Result<ScenarioResult> {
    let mut res = ScenarioResult::new(
        "smp-positivity",
        "fast diffusion with lambda = 0 and f = 1 from zero data: positivity and a strictly negative boundary flux",
        ctx.n,
        ctx.mt,
    );
    let grid = Grid::interval(-1.0, 1.0, ctx.n)?;
    let tmesh = TimeMesh::new(0.5, ctx.mt)?;
    let spec = ProblemSpec::new(1.5, 0.0, Field::zeros(grid), Source::Constant(1.0))?;
    let sol = solve_parabolic(&spec, &tmesh)?;
    let v = &sol.field;
    let tol = ctx.tol_or(check_solver_tol(&spec, &grid));
    let (t_bar, t_star) = positivity_time(v, tol);
    res.metric("t_bar", t_bar);
    res.metric("t_star", t_star);
    res.metric("max_step_residual", sol.max_residual());

    res.report(check_wmp(v, tol), Some(Verdict::Holds));
    res.report(check_smp(v, tol), Some(Verdict::Holds));
    res.report(check_hopf(v, ctx.mt, tol)?, Some(Verdict::Holds));
    // u solves the same problem with f = 0, so u ≡ 0; slice 0 is the common initial state
    let zero = SpaceTimeField::zeros(&grid, &tmesh);
    let scp = check_scp(&zero, v, tol, 1)?;
    let wcp = check_wcp(&zero, v, tol)?;
    res.report(scp, Some(Verdict::Holds));
    res.report(wcp, Some(Verdict::Holds));

    res.cell(Regime::NonPositive, PClass::Fast, Principle::Wmp, Symbol::Holds);
    res.cell(Regime::NonPositive, PClass::Fast, Principle::Smp, Symbol::Conditional);
    res.cell(Regime::NonPositive, PClass::Fast, Principle::Wcp, Symbol::Holds);
    res.cell(Regime::NonPositive, PClass::Fast, Principle::Scp, Symbol::Conditional);
    res.artifacts.push(ctx.write_run("solution.csv", v)?);
    Ok(res)
}

/// Saddle defaults on (−1, 1): inner radius, outer radius ε1 (the ball B_{2ε1} nearly fills
/// the interval) and the width of the nodes excluded around critical points of w0.
pub const SADDLE_EPS: f64 = 0.1;
pub const SADDLE_EPS1: f64 = 0.49;
pub const SADDLE_EXCLUDED_CELLS: usize = 32;

fn saddle_nonuniqueness(ctx: &Ctx) -> Result<ScenarioResult> {
    let mut res = ScenarioResult::new(
        "saddle-nonuniqueness",
        "p = 1.5, lambda = 1: the saddle point w0 and a global minimizer w1 of the energy give two solutions w·v(t) with the same parabolic boundary data, so the weak comparison principle fails",
        ctx.n,
        ctx.mt,
    );
    let (p, lambda) = (1.5, 1.0);
    let grid = Grid::interval(-1.0, 1.0, ctx.n)?;
    let tmesh = TimeMesh::new(1.0, ctx.mt)?;
    let c = build_saddle_construction(&grid, p, lambda, SADDLE_EPS, SADDLE_EPS1)?;
    let espec = EnergySpec::new(p, lambda, c.h_src.clone())?;

    let t_probe = 1e-3;
    let z1 = zeta(t_probe, &c, p, lambda)?;
    let pushed = Field::new(
        grid,
        c.w0.values().iter().zip(c.z.values()).map(|(w, z)| w + t_probe * z).collect(),
    )?;
    let e0 = energy(&c.w0, &espec)?;
    let de = energy(&pushed, &espec)? - e0;
    let h_min = c.h_src.values().iter().cloned().fold(f64::INFINITY, f64::min);
    let h_max = c.h_src.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    // multistart: the lowest converged energy is taken as w1
    let bump = sample(&grid, |x| 0.5 * (1.0 - x * x))?;
    let starts = vec![
        Field::zeros(grid),
        pushed.clone(),
        c.w0.scaled(2.0),
        c.w0.scaled(-1.0),
        bump.clone(),
        bump.scaled(-1.0),
    ];
    let runs: Vec<_> = starts
        .par_iter()
        .map(|s| minimize_energy_with(&espec, &grid, s, MinimizeOptions::default()))
        .collect();
    let converged = runs.iter().filter(|r| r.is_ok()).count();
    let w1 = runs
        .into_iter()
        .filter_map(|r| r.ok())
        .min_by(|a, b| a.energy.total_cmp(&b.energy))
        .ok_or(Error::ConvergenceFailure {
            what: "saddle multistart minimization",
            iterations: 0,
            residual: f64::NAN,
            last: None,
        })?;

    let v = |t: f64| cauchy_solution(t, p).unwrap_or(0.0);
    let spec = ProblemSpec::new(
        p,
        lambda,
        Field::zeros(grid),
        Source::Separable {
            space: c.h_src.clone(),
            time: std::sync::Arc::new(move |t| cauchy_solution(t, p).unwrap_or(0.0).powf(p - 1.0)),
        },
    )?
    .with_eps_reg(0.0);
    let r_star = c.profile.r_star();
    let band = SADDLE_EXCLUDED_CELLS as f64 * grid.h();
    let skip: Vec<bool> = (0..grid.n())
        .map(|i| {
            let r = grid.radius_of(i);
            r < band || (r - r_star).abs() < band
        })
        .collect();
    let res0 = separable_residual(&spec, &tmesh, &c.w0, v, Some(&skip))?;
    let res1 = separable_residual(&spec, &tmesh, &w1.field, v, None)?;
    let v_end = v(tmesh.t_final());
    let separation = sup_diff(&c.w0, &w1.field)? * v_end;

    res.metric("zeta_at_1e-3", z1);
    res.metric("energy_change_along_z", de);
    res.metric("energy_w0", e0);
    res.metric("energy_w1", w1.energy);
    res.metric("h_min", h_min);
    res.metric("h_max", h_max);
    res.metric("m", c.m);
    res.metric("r_star", r_star);
    res.metric("excluded_cells", SADDLE_EXCLUDED_CELLS as f64);
    res.metric("multistart_converged", converged as f64);
    res.metric("residual_w0v", res0);
    res.metric("residual_w1v", res1);
    res.metric("separation_at_T", separation);
    res.metric("w1_elliptic_residual", sup_norm(&elliptic_residual(&w1.field, &espec)?));

    res.criteria.push(Criterion::below("residual_w0v", res0, 1e-3));
    res.criteria.push(Criterion::below("residual_w1v", res1, 1e-3));
    res.criteria.push(Criterion::above("separation_at_T", separation, 0.01));
    res.criteria.push(Criterion::below("zeta_at_1e-3", z1, 0.0));
    res.criteria.push(Criterion::below("energy_change_along_z", de, 0.0));
    res.criteria.push(Criterion::below("h_min", h_min, 0.0));
    res.criteria.push(Criterion::above("h_max", h_max, 0.0));

    // both candidates have zero data; WCP asserts each lies below the other
    let coarse = coarse_tmesh(&tmesh);
    let build = |w: &Field| -> Result<SpaceTimeField> {
        let slices = (0..=coarse.steps()).map(|k| w.scaled(v(coarse.time(k)))).collect();
        SpaceTimeField::new(grid, coarse, slices)
    };
    let a = build(&c.w0)?;
    let b = build(&w1.field)?;
    let tol = ctx.tol_or(default_tolerance(grid.h(), DEFAULT_NEWTON_TOL));
    let ab = check_wcp(&a, &b, tol)?;
    let ba = check_wcp(&b, &a, tol)?;
    let (first, second) = if ab.margin <= ba.margin { (&a, &b) } else { (&b, &a) };
    res.report(check_wcp(first, second, tol)?, Some(Verdict::Violated));
    res.report(check_strong_comparison(first, second, tol)?, Some(Verdict::Violated));

    res.cell(Regime::UpToFirst, PClass::Fast, Principle::Wcp, Symbol::Fails);
    res.cell(Regime::UpToFirst, PClass::Fast, Principle::Scp, Symbol::Fails);
    res.artifacts.push(ctx.write_field("w0.csv", &c.w0)?);
    res.artifacts.push(ctx.write_field("z.csv", &c.z)?);
    res.artifacts.push(ctx.write_field("h.csv", &c.h_src)?);
    res.artifacts.push(ctx.write_field("w1.csv", &w1.field)?);
    res.artifacts.push(ctx.write_run("u0.csv", &a)?);
    res.artifacts.push(ctx.write_run("u1.csv", &b)?);
    Ok(res)
}

/// The same final time with at most MAX_CSV_INTERVALS steps, for checks on separable fields
/// whose time dependence is known exactly.
fn coarse_tmesh(tmesh: &TimeMesh) -> TimeMesh {
    let steps = tmesh.steps();
    let stride = (1..=steps)
        .find(|s| steps % s == 0 && steps / s <= MAX_CSV_INTERVALS)
        .unwrap_or(steps);
    TimeMesh::new(tmesh.t_final(), steps / stride).expect("valid coarse mesh")
}

fn logistic_nonuniqueness(ctx: &Ctx) -> Result<ScenarioResult> {
    let mut res = ScenarioResult::new(
        "logistic-nonuniqueness",
        "p = 1.5, lambda = 2·lambda1: zero data admit the solutions 0, w·v(t) and −w·v(t), so the weak and strong principles fail",
        ctx.n,
        ctx.mt,
    );
    let p = 1.5;
    let grid = Grid::interval(-1.0, 1.0, ctx.n)?;
    let tmesh = TimeMesh::new(1.0, ctx.mt)?;
    let (lambda1, _) = lambda1_rayleigh(&grid, p, 1e-12)?;
    let lambda = 2.0 * lambda1;
    let w = solve_logistic(&grid, p, lambda)?;
    let espec = EnergySpec::new(p, lambda, Field::zeros(grid))?;
    let spec = ProblemSpec::new(p, lambda, Field::zeros(grid), Source::Zero)?.with_eps_reg(0.0);
    let v = |t: f64| cauchy_solution(t, p).unwrap_or(0.0);
    let r_zero = separable_residual(&spec, &tmesh, &Field::zeros(grid), v, None)?;
    let r_pos = separable_residual(&spec, &tmesh, &w, v, None)?;
    let r_neg = separable_residual(&spec, &tmesh, &w.scaled(-1.0), v, None)?;
    res.metric("lambda1", lambda1);
    res.metric("lambda", lambda);
    res.metric("w_sup", sup_norm(&w));
    res.metric("w_elliptic_residual", sup_norm(&elliptic_residual(&w, &espec)?));
    res.metric("residual_zero", r_zero);
    res.metric("residual_positive", r_pos);
    res.metric("residual_negative", r_neg);
    res.criteria.push(Criterion::below("residual_zero", r_zero, 1e-3));
    res.criteria.push(Criterion::below("residual_positive", r_pos, 1e-3));
    res.criteria.push(Criterion::below("residual_negative", r_neg, 1e-3));

    let coarse = coarse_tmesh(&tmesh);
    let build = |w: &Field| -> Result<SpaceTimeField> {
        let slices = (0..=coarse.steps()).map(|k| w.scaled(v(coarse.time(k)))).collect();
        SpaceTimeField::new(grid, coarse, slices)
    };
    let pos = build(&w)?;
    let neg = build(&w.scaled(-1.0))?;
    let zero = SpaceTimeField::zeros(&grid, &coarse);
    let tol = ctx.tol_or(default_tolerance(grid.h(), DEFAULT_NEWTON_TOL));
    res.report(check_wmp(&neg, tol), Some(Verdict::Violated));
    res.report(check_smp(&neg, tol), Some(Verdict::Violated));
    res.report(check_wcp(&pos, &zero, tol)?, Some(Verdict::Violated));
    res.report(check_strong_comparison(&pos, &zero, tol)?, Some(Verdict::Violated));

    for principle in [Principle::Wmp, Principle::Smp, Principle::Wcp, Principle::Scp] {
        res.cell(Regime::AboveFirst, PClass::Fast, principle, Symbol::Fails);
    }
    res.artifacts.push(ctx.write_field("w.csv", &w)?);
    res.artifacts.push(ctx.write_run("positive.csv", &pos)?);
    res.artifacts.push(ctx.write_run("negative.csv", &neg)?);
    Ok(res)
}

/// One cell of the comparison sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepCell {
    pub p: f64,
    pub lambda: f64,
    pub label: &'static str,
}

pub const SWEEP_PAIRS: usize = 50;
pub const SWEEP_T: f64 = 0.5;

/// (p, λ) grid of the sweep: λ ∈ {−1, 0, λ1/2, 2λ1} for p ∈ {1.5, 3}, plus p = 3, λ = 1.
pub fn sweep_cells() -> Vec<SweepCell> {
    let mut out = Vec::new();
    for p in [1.5, 3.0] {
        let l1 = lambda1_interval(p, 2.0);
        out.push(SweepCell { p, lambda: -1.0, label: "-1" });
        out.push(SweepCell { p, lambda: 0.0, label: "0" });
        out.push(SweepCell { p, lambda: 0.5 * l1, label: "lambda1/2" });
        out.push(SweepCell { p, lambda: 2.0 * l1, label: "2lambda1" });
    }
    out.push(SweepCell { p: 3.0, lambda: 1.0, label: "1" });
    out
}

/// Ordered random data: smooth u0 ≤ v0 with |u0|, |v0| ≤ 1 and f ≤ g.
struct PairData {
    u0: Vec<f64>,
    v0: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
}

fn random_pair(grid: &Grid, rng: &mut ChaCha8Rng) -> PairData {
    let xs = grid.nodes();
    let modes: Vec<f64> = (1..=4).map(|j| rng.gen_range(-1.0..1.0) / j as f64).collect();
    let gap_amp: f64 = rng.gen_range(0.0..0.5);
    let gap_pow: f64 = rng.gen_range(0.5..2.0);
    let (f0, f1): (f64, f64) = (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
    let g_gap: f64 = rng.gen_range(0.0..0.5);
    let shape = |x: f64| -> f64 {
        modes
            .iter()
            .enumerate()
            .map(|(j, a)| a * ((j + 1) as f64 * std::f64::consts::FRAC_PI_2 * (x + 1.0)).sin())
            .sum()
    };
    let raw: Vec<f64> = xs.iter().map(|&x| shape(x)).collect();
    let peak = raw.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-12);
    // u0 ∈ [−0.5, 0.5] and the gap ≤ 0.5 keep both within [−1, 1]
    let u0: Vec<f64> = raw.iter().map(|v| 0.5 * v / peak).collect();
    let v0: Vec<f64> = xs
        .iter()
        .zip(&u0)
        .map(|(&x, u)| u + gap_amp * (1.0 - x * x).max(0.0).powf(gap_pow))
        .collect();
    let f: Vec<f64> = xs
        .iter()
        .map(|&x| f0 + f1 * (std::f64::consts::FRAC_PI_2 * x).cos())
        .collect();
    let g: Vec<f64> = f.iter().map(|v| v + g_gap).collect();
    PairData { u0, v0, f, g }
}

fn sweep_solve(grid: &Grid, tmesh: &TimeMesh, cell: &SweepCell, init: &[f64], src: &[f64]) -> Result<SpaceTimeField> {
    let spec = ProblemSpec::new(
        cell.p,
        cell.lambda,
        Field::new(*grid, init.to_vec())?,
        Source::Separable {
            space: Field::new(*grid, src.to_vec())?,
            time: std::sync::Arc::new(|_| 1.0),
        },
    )?;
    Ok(solve_parabolic(&spec, tmesh)?.field)
}

/// Sweep outcome of one cell: worst WCP margin among the pairs that both solved.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub cell: SweepCell,
    pub report: PrincipleReport,
    pub solved: usize,
    pub failed: usize,
}

pub fn run_sweep(n: usize, mt: usize, seed: u64, tol: f64) -> Result<Vec<SweepOutcome>> {
    let grid = Grid::interval(-1.0, 1.0, n)?;
    let tmesh = TimeMesh::new(SWEEP_T, mt)?;
    let cells = sweep_cells();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jobs: Vec<(usize, usize, PairData)> = cells
        .iter()
        .enumerate()
        .flat_map(|(c, _)| (0..SWEEP_PAIRS).map(move |j| (c, j)))
        .map(|(c, j)| (c, j, random_pair(&grid, &mut rng)))
        .collect();
    let margins: Vec<(usize, usize, Option<PrincipleReport>)> = jobs
        .par_iter()
        .map(|(c, j, d)| {
            let cell = &cells[*c];
            let u = sweep_solve(&grid, &tmesh, cell, &d.u0, &d.f);
            let v = sweep_solve(&grid, &tmesh, cell, &d.v0, &d.g);
            let rep = match (u, v) {
                (Ok(u), Ok(v)) => check_wcp(&u, &v, tol).ok(),
                _ => None,
            };
            (*c, *j, rep)
        })
        .collect();
    let mut out = Vec::new();
    for (c, cell) in cells.iter().enumerate() {
        let mine: Vec<_> = margins.iter().filter(|(k, _, _)| *k == c).collect();
        let failed = mine.iter().filter(|(_, _, r)| r.is_none()).count();
        let worst = mine
            .iter()
            .filter_map(|(_, j, r)| r.as_ref().map(|r| (*j, r)))
            .min_by(|a, b| a.1.margin.total_cmp(&b.1.margin));
        let report = match worst {
            Some((j, r)) => {
                let mut r = r.clone();
                r.note = format!(
                    "p={} lambda={} ({}): worst of {} pairs is pair {j}; {failed} pairs did not solve",
                    cell.p,
                    cell.lambda,
                    cell.label,
                    SWEEP_PAIRS - failed
                );
                r
            }
            None => PrincipleReport {
                principle: Principle::Wcp,
                verdict: Verdict::Inconclusive,
                margin: 0.0,
                witness: None,
                tolerance: tol,
                sub_margins: Vec::new(),
                note: format!("p={} lambda={}: no pair solved", cell.p, cell.lambda),
            },
        };
        out.push(SweepOutcome {
            cell: *cell,
            report,
            solved: SWEEP_PAIRS - failed,
            failed,
        });
    }
    Ok(out)
}

fn wcp_regimes(ctx: &Ctx) -> Result<ScenarioResult> {
    let mut res = ScenarioResult::new(
        "wcp-regimes",
        "weak comparison for ordered data u0 <= v0, f <= g across the lambda regimes, p = 1.5 and p = 3",
        ctx.n,
        ctx.mt,
    );
    res.seed = Some(ctx.seed);
    let tol = ctx.tol_or(10.0 * DEFAULT_NEWTON_TOL);
    let outcomes = run_sweep(ctx.n, ctx.mt, ctx.seed, tol)?;
    let mut csv = String::from("p,lambda,label,regime,verdict,margin,solved,failed\n");
    for o in outcomes {
        let l1 = lambda1_interval(o.cell.p, 2.0);
        let regime = Regime::classify(o.cell.lambda, l1);
        let pc = PClass::classify(o.cell.p);
        let theory = theory_cell(regime, pc, Principle::Wcp);
        // soundness: cells the table marks '+' must not show a violation
        let expected = (theory == "+").then_some(Verdict::Holds);
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{:.12e},{},{}",
            o.cell.p,
            o.cell.lambda,
            o.cell.label,
            regime.label(),
            o.report.verdict,
            o.report.margin,
            o.solved,
            o.failed
        );
        match o.report.verdict {
            Verdict::Holds => res.cell(regime, pc, Principle::Wcp, Symbol::Holds),
            Verdict::Violated => res.cell(regime, pc, Principle::Wcp, Symbol::Fails),
            Verdict::Inconclusive => {}
        }
        res.metric(&format!("margin_p{}_{}", o.cell.p, o.cell.label), o.report.margin);
        res.report(o.report, expected);
    }
    let path = ctx.dir.join("sweep.csv");
    fs::write(&path, csv)?;
    res.artifacts.push(path);
    Ok(res)
}

fn scp_slow_diffusion(ctx: &Ctx) -> Result<ScenarioResult> {
    let mut res = ScenarioResult::new(
        "scp-slow-diffusion",
        "slow diffusion, p = 3, lambda = 0: strict comparison holds when the larger solution has a strictly negative boundary flux, and cannot be asserted past an interior free boundary",
        ctx.n,
        ctx.mt,
    );
    let grid = Grid::interval(-1.0, 1.0, ctx.n)?;
    let tmesh = TimeMesh::new(1.0, ctx.mt)?;
    let profile = sample(&grid, |x| (std::f64::consts::FRAC_PI_2 * x).cos())?;
    let solve = |init: Field| -> Result<SpaceTimeField> {
        let spec = ProblemSpec::new(3.0, 0.0, init, Source::Zero)?.with_eps_reg(0.0);
        Ok(solve_parabolic(&spec, &tmesh)?.field)
    };
    let tol = ctx.tol_or(default_tolerance(grid.h(), DEFAULT_NEWTON_TOL));
    let v = solve(profile.clone())?;
    let u = solve(profile.scaled(0.5))?;
    let flux_v = crate::principles::boundary_normal_derivatives(v.last())
        .iter()
        .map(|(_, d)| *d)
        .fold(f64::NEG_INFINITY, f64::max);
    res.metric("max_boundary_derivative_v_at_T", flux_v);
    res.criteria.push(Criterion::below("max_boundary_derivative_v_at_T", flux_v, -tol));
    res.report(check_scp(&u, &v, tol, 0)?, Some(Verdict::Holds));
    res.report(check_wcp(&u, &v, tol)?, Some(Verdict::Holds));

    // compactly supported v: no slice is positive inside, so nothing can be asserted
    let bump = sample(&grid, |x| (0.25 - x * x).max(0.0))?;
    let vb = solve(bump)?;
    let zero = SpaceTimeField::zeros(&grid, &tmesh);
    res.report(check_scp(&zero, &vb, tol, 0)?, Some(Verdict::Inconclusive));

    res.cell(Regime::NonPositive, PClass::Slow, Principle::Scp, Symbol::Conditional);
    res.cell(Regime::NonPositive, PClass::Slow, Principle::Wcp, Symbol::Holds);
    res.artifacts.push(ctx.write_run("v.csv", &v)?);
    res.artifacts.push(ctx.write_run("u.csv", &u)?);
    res.artifacts.push(ctx.write_run("v_compact.csv", &vb)?);
    Ok(res)
}

const TABLE_ROWS: [(Regime, PClass); 7] = [
    (Regime::NonPositive, PClass::Fast),
    (Regime::NonPositive, PClass::Slow),
    (Regime::UpToFirst, PClass::Fast),
    (Regime::UpToFirst, PClass::Slow),
    (Regime::AboveFirst, PClass::Fast),
    (Regime::AboveFirst, PClass::Slow),
    (Regime::AnyLambda, PClass::Linear),
];

const TABLE_COLUMNS: [Principle; 4] = [Principle::Wmp, Principle::Smp, Principle::Wcp, Principle::Scp];

/// The published status symbols, verbatim.
pub fn theory_cell(regime: Regime, p_class: PClass, principle: Principle) -> &'static str {
    use Principle::*;
    match (regime, p_class, principle) {
        (Regime::NonPositive, PClass::Fast, Wmp) => "+",
        (Regime::NonPositive, PClass::Fast, Smp) => "− / ±",
        (Regime::NonPositive, PClass::Fast, Wcp) => "+",
        (Regime::NonPositive, PClass::Fast, Scp) => "− / ± / ?",
        (Regime::NonPositive, PClass::Slow, Wmp) => "+",
        (Regime::NonPositive, PClass::Slow, Smp) => "− / ±",
        (Regime::NonPositive, PClass::Slow, Wcp) => "+",
        (Regime::NonPositive, PClass::Slow, Scp) => "− / ±",
        (Regime::UpToFirst, PClass::Fast, Wmp) => "+",
        (Regime::UpToFirst, PClass::Fast, Smp) => "− / ±",
        (Regime::UpToFirst, PClass::Fast, Wcp) => "− / ?",
        (Regime::UpToFirst, PClass::Fast, Scp) => "− / ?",
        (Regime::UpToFirst, PClass::Slow, Wmp) => "+",
        (Regime::UpToFirst, PClass::Slow, Smp) => "− / ±",
        (Regime::UpToFirst, PClass::Slow, Wcp) => "+",
        (Regime::UpToFirst, PClass::Slow, Scp) => "− / ±",
        (Regime::AboveFirst, PClass::Fast, _) => "−",
        (Regime::AboveFirst, PClass::Slow, Wmp) => "+",
        (Regime::AboveFirst, PClass::Slow, Smp) => "− / ±",
        (Regime::AboveFirst, PClass::Slow, Wcp) => "+",
        (Regime::AboveFirst, PClass::Slow, Scp) => "− / ±",
        (Regime::AnyLambda, PClass::Linear, _) => "+",
        _ => "n/a",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub regime: Regime,
    pub p_class: PClass,
    pub principle: Principle,
    /// Observed symbols with the table's open mark appended, or `n/a` when untested.
    pub empirical: String,
    pub theory: String,
    pub tested: bool,
    /// Every observed symbol appears in the published cell.
    pub matches: bool,
    /// The published cell is (partly) open, so the observation has no theorem behind it.
    pub empirical_only: bool,
}

/// Combines the evidence of all results. A counterexample settles a cell, so an observed
/// '−' drops any '+' coming from runs that merely found no violation.
pub fn table1_cells(results: &[ScenarioResult]) -> Vec<TableCell> {
    let mut cells = Vec::new();
    for (regime, p_class) in TABLE_ROWS {
        for principle in TABLE_COLUMNS {
            let theory = theory_cell(regime, p_class, principle);
            let theory_syms = Symbol::parse_cell(theory);
            let mut seen: Vec<Symbol> = results
                .iter()
                .flat_map(|r| &r.evidence)
                .filter(|e| e.regime == regime && e.p_class == p_class && e.principle == principle)
                .map(|e| e.symbol)
                .collect();
            seen.sort();
            seen.dedup();
            if seen.contains(&Symbol::Fails) {
                seen.retain(|s| *s != Symbol::Holds);
            }
            let open = theory_syms.contains(&Symbol::Open);
            let tested = !seen.is_empty();
            let empirical = if tested {
                let mut parts: Vec<&str> = seen.iter().map(Symbol::as_str).collect();
                if open {
                    parts.push("?");
                }
                parts.join(" / ")
            } else {
                "n/a".to_string()
            };
            cells.push(TableCell {
                regime,
                p_class,
                principle,
                empirical,
                theory: theory.to_string(),
                tested,
                matches: seen.iter().all(|s| theory_syms.contains(s)),
                empirical_only: open,
            });
        }
    }
    cells
}

/// Text matrix: one row per (λ regime, p class), each principle as `empirical [theory]`.
pub fn table1_report(results: &[ScenarioResult]) -> String {
    let cells = table1_cells(results);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<20} {:<5} | {:<22} | {:<22} | {:<22} | {:<22}",
        "regime", "p", "WMP", "SMP", "WCP", "SCP"
    );
    let _ = writeln!(s, "{}", "-".repeat(125));
    for row in cells.chunks(TABLE_COLUMNS.len()) {
        let _ = write!(s, "{:<20} {:<5}", row[0].regime.label(), row[0].p_class.label());
        for c in row {
            let mark = if !c.tested {
                ""
            } else if c.matches {
                ""
            } else {
                " !"
            };
            let text = format!("{} [{}]{}", c.empirical, c.theory, mark);
            let _ = write!(s, " | {:<22}", text);
        }
        s.push('\n');
    }
    let tested = cells.iter().filter(|c| c.tested).count();
    let mismatched = cells.iter().filter(|c| c.tested && !c.matches).count();
    let _ = writeln!(
        s,
        "\nempirical [published]; '!' marks a disagreement. tested cells: {tested}, disagreements: {mismatched}"
    );
    let open: Vec<String> = cells
        .iter()
        .filter(|c| c.tested && c.empirical_only)
        .map(|c| format!("({}, {}, {})", c.regime.label(), c.p_class.label(), c.principle))
        .collect();
    if !open.is_empty() {
        let _ = writeln!(s, "empirical-only (published cell open): {}", open.join(", "));
    }
    for r in results {
        if let Some(seed) = r.seed {
            let _ = writeln!(s, "{} seed: {seed}", r.name);
        }
    }
    s
}

/// `regime,p,principle,empirical,paper`
pub fn table1_csv(results: &[ScenarioResult]) -> String {
    let mut s = String::from("regime,p,principle,empirical,paper\n");
    for c in table1_cells(results) {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            c.regime.label(),
            c.p_class.label(),
            c.principle,
            c.empirical,
            c.theory
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(Regime::classify(-1.0, 2.0), Regime::NonPositive);
        assert_eq!(Regime::classify(0.0, 2.0), Regime::NonPositive);
        assert_eq!(Regime::classify(2.0, 2.0), Regime::UpToFirst);
        assert_eq!(Regime::classify(2.5, 2.0), Regime::AboveFirst);
        assert_eq!(PClass::classify(1.5), PClass::Fast);
        assert_eq!(PClass::classify(2.0), PClass::Linear);
    }

    #[test]
    fn unknown_and_coarse() {
        let o = Overrides::default();
        assert!(matches!(run_scenario("no-such", &o), Err(Error::UnknownScenario(_))));
        let o = Overrides {
            n: Some(65),
            ..Overrides::default()
        };
        match run_scenario("saddle-nonuniqueness", &o) {
            Err(Error::Preflight { min_n, .. }) => assert_eq!(min_n, 1025),
            other => panic!("expected preflight error, got {other:?}"),
        }
    }

    #[test]
    fn counterexample_supersedes_sweep() {
        let mut a = ScenarioResult::new("a", "", 1, 1);
        a.cell(Regime::UpToFirst, PClass::Fast, Principle::Wcp, Symbol::Holds);
        let mut b = ScenarioResult::new("b", "", 1, 1);
        b.cell(Regime::UpToFirst, PClass::Fast, Principle::Wcp, Symbol::Fails);
        let cells = table1_cells(&[a.clone()]);
        let c = cells
            .iter()
            .find(|c| c.regime == Regime::UpToFirst && c.p_class == PClass::Fast && c.principle == Principle::Wcp)
            .unwrap();
        assert_eq!(c.empirical, "+ / ?");
        assert!(!c.matches);
        let cells = table1_cells(&[a, b]);
        let c = cells
            .iter()
            .find(|c| c.regime == Regime::UpToFirst && c.p_class == PClass::Fast && c.principle == Principle::Wcp)
            .unwrap();
        assert_eq!(c.empirical, "− / ?");
        assert!(c.matches && c.empirical_only);
    }

    #[test]
    fn untested_cells_are_marked() {
        let cells = table1_cells(&[]);
        assert_eq!(cells.len(), 28);
        assert!(cells.iter().all(|c| c.empirical == "n/a" && !c.tested));
        let csv = table1_csv(&[]);
        assert_eq!(csv.lines().count(), 29);
        assert!(csv.contains("lambda<=0,p<2,SCP,n/a,− / ± / ?"));
    }

    #[test]
    fn random_pairs_are_ordered_and_bounded() {
        let g = Grid::interval(-1.0, 1.0, 65).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let d = random_pair(&g, &mut rng);
            for i in 0..g.n() {
                assert!(d.u0[i] <= d.v0[i] && d.f[i] <= d.g[i]);
                assert!(d.u0[i].abs() <= 1.0 && d.v0[i].abs() <= 1.0);
            }
        }
    }
}
