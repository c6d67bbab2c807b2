//! Python bindings: grids, closed forms, eigenvalues, the time stepper, principle checks and
//! scenarios. Fields cross the boundary as lists of floats.

use std::path::PathBuf;

use plap_core::closed_forms as cf;
use plap_core::elliptic;
use plap_core::parabolic;
use plap_core::principles::{self, PrincipleReport};
use plap_core::scenarios::{self, Overrides};
use plap_core::{Field, Grid, ProblemSpec, Source, SpaceTimeField, TimeMesh};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: plap_core::Error) -> PyErr {
    if e.is_solver_failure() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

/// Uniform grid on an interval or on the radius [0, R] of a ball.
#[pyclass(name = "Grid", frozen)]
#[derive(Clone)]
struct PyGrid {
    inner: Grid,
}

#[pymethods]
impl PyGrid {
    #[staticmethod]
    fn interval(a: f64, b: f64, n: usize) -> PyResult<Self> {
        Ok(PyGrid { inner: Grid::interval(a, b, n).map_err(err)? })
    }

    #[staticmethod]
    fn radial(radius: f64, dim: usize, n: usize) -> PyResult<Self> {
        Ok(PyGrid { inner: Grid::radial(radius, dim, n).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.h()
    }

    #[getter]
    fn is_radial(&self) -> bool {
        self.inner.is_radial()
    }

    fn nodes(&self) -> Vec<f64> {
        self.inner.nodes()
    }

    fn __repr__(&self) -> String {
        format!("Grid(n={}, h={:e}, radial={})", self.inner.n(), self.inner.h(), self.inner.is_radial())
    }
}

/// Nodal trace of a run: `values[k][i]` at time `times[k]` and node `nodes[i]`.
#[pyclass(name = "Run", frozen)]
#[derive(Clone)]
struct PyRun {
    inner: SpaceTimeField,
    max_residual: f64,
}

#[pymethods]
impl PyRun {
    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid { inner: *self.inner.grid() }
    }

    fn times(&self) -> Vec<f64> {
        (0..=self.inner.tmesh().steps()).map(|k| self.inner.tmesh().time(k)).collect()
    }

    fn nodes(&self) -> Vec<f64> {
        self.inner.grid().nodes()
    }

    fn values(&self) -> Vec<Vec<f64>> {
        self.inner.slices().iter().map(|s| s.values().to_vec()).collect()
    }

    fn slice(&self, k: usize) -> PyResult<Vec<f64>> {
        if k > self.inner.tmesh().steps() {
            return Err(PyValueError::new_err(format!("slice {k} out of range")));
        }
        Ok(self.inner.slice(k).values().to_vec())
    }

    /// Largest Newton residual over the steps; NaN for runs read from CSV.
    #[getter]
    fn max_residual(&self) -> f64 {
        self.max_residual
    }

    fn write_csv(&self, path: PathBuf) -> PyResult<()> {
        let f = std::fs::File::create(&path).map_err(|e| PyValueError::new_err(e.to_string()))?;
        self.inner.write_csv(std::io::BufWriter::new(f)).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (path, radial_dim=None))]
    fn read_csv(path: PathBuf, radial_dim: Option<usize>) -> PyResult<Self> {
        let f = std::fs::File::open(&path).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let inner = SpaceTimeField::read_csv(std::io::BufReader::new(f), radial_dim).map_err(err)?;
        Ok(PyRun { inner, max_residual: f64::NAN })
    }
}

/// Verdict of one principle check.
#[pyclass(name = "Report", frozen, get_all)]
struct PyReport {
    principle: String,
    verdict: String,
    margin: f64,
    witness: Option<(usize, usize)>,
    tolerance: f64,
    sub_margins: Vec<(String, f64)>,
    note: String,
}

#[pymethods]
impl PyReport {
    fn __repr__(&self) -> String {
        format!("Report({} {} margin={:e})", self.principle, self.verdict, self.margin)
    }
}

impl From<PrincipleReport> for PyReport {
    fn from(r: PrincipleReport) -> Self {
        PyReport {
            principle: r.principle.to_string(),
            verdict: r.verdict.to_string(),
            margin: r.margin,
            witness: r.witness,
            tolerance: r.tolerance,
            sub_margins: r.sub_margins,
            note: r.note,
        }
    }
}

fn field(grid: &PyGrid, values: Vec<f64>) -> PyResult<Field> {
    Field::new(grid.inner, values).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (r, t, p=3.0, dim=1, c=1.0, alpha=1.0))]
fn barenblatt(r: f64, t: f64, p: f64, dim: usize, c: f64, alpha: f64) -> PyResult<f64> {
    let params = cf::BarenblattParams::new(p, dim, c, alpha).map_err(err)?;
    Ok(cf::barenblatt(r, t, &params))
}

#[pyfunction]
#[pyo3(signature = (t, p=3.0, dim=1, c=1.0, alpha=1.0))]
fn barenblatt_support_radius(t: f64, p: f64, dim: usize, c: f64, alpha: f64) -> PyResult<f64> {
    let params = cf::BarenblattParams::new(p, dim, c, alpha).map_err(err)?;
    Ok(cf::barenblatt_support_radius(t, &params))
}

/// Separable extinction solution on [−1, 1] sampled at `n` nodes and time t.
#[pyfunction]
#[pyo3(signature = (t, p=1.5, t0=0.5, n=1025))]
fn extinction_solution(t: f64, p: f64, t0: f64, n: usize) -> PyResult<(Vec<f64>, Vec<f64>, f64)> {
    let params = cf::ExtinctionParams::new(p, t0, n).map_err(err)?;
    let g = *params.profile.grid();
    let xs = g.nodes();
    let vals = xs.iter().map(|&x| cf::extinction_solution(x, t, &params)).collect();
    Ok((xs, vals, cf::extinction_time(&params)))
}

#[pyfunction]
fn cauchy_solution(t: f64, p: f64) -> PyResult<f64> {
    cf::cauchy_solution(t, p).map_err(err)
}

#[pyfunction]
fn lambda1_interval(p: f64, length: f64) -> f64 {
    cf::lambda1_interval(p, length)
}

#[pyfunction]
#[pyo3(signature = (grid, p, tol=1e-12))]
fn lambda1_rayleigh(grid: &PyGrid, p: f64, tol: f64) -> PyResult<(f64, Vec<f64>)> {
    let (l, f) = elliptic::lambda1_rayleigh(&grid.inner, p, tol).map_err(err)?;
    Ok((l, f.into_values()))
}

#[pyfunction]
fn lambda1_shooting(p: f64, length: f64) -> PyResult<f64> {
    elliptic::lambda1_shooting(p, length).map_err(err)
}

#[pyfunction]
fn discrete_p_laplacian(grid: &PyGrid, values: Vec<f64>, p: f64, eps_reg: f64) -> PyResult<Vec<f64>> {
    let u = field(grid, values)?;
    Ok(elliptic::discrete_p_laplacian(&u, p, eps_reg).map_err(err)?.into_values())
}

#[pyfunction]
fn linearization_matrix(a: Vec<f64>, p: f64) -> PyResult<Vec<Vec<f64>>> {
    Ok(parabolic::linearization_matrix(&a, p).map_err(err)?.entries)
}

/// Backward-Euler solve of ∂t u − Δp u = λ|u|^{p−2}u + f with constant f and zero
/// boundary data.
#[pyfunction]
#[pyo3(signature = (grid, p, initial, t_final, steps, lam=0.0, source=0.0, eps_reg=None, newton_tol=None))]
#[allow(clippy::too_many_arguments)]
fn solve(
    grid: &PyGrid,
    p: f64,
    initial: Vec<f64>,
    t_final: f64,
    steps: usize,
    lam: f64,
    source: f64,
    eps_reg: Option<f64>,
    newton_tol: Option<f64>,
) -> PyResult<PyRun> {
    let u0 = field(grid, initial)?;
    let src = if source == 0.0 { Source::Zero } else { Source::Constant(source) };
    let mut spec = ProblemSpec::new(p, lam, u0, src).map_err(err)?;
    if let Some(e) = eps_reg {
        spec = spec.with_eps_reg(e);
    }
    if let Some(t) = newton_tol {
        spec = spec.with_newton_tol(t);
    }
    let tm = TimeMesh::new(t_final, steps).map_err(err)?;
    let sol = parabolic::solve_parabolic(&spec, &tm).map_err(err)?;
    Ok(PyRun { max_residual: sol.max_residual(), inner: sol.field })
}

fn tol_for(run: &PyRun, tol: Option<f64>) -> f64 {
    tol.unwrap_or_else(|| {
        principles::default_tolerance(run.inner.grid().h(), plap_core::problem::DEFAULT_NEWTON_TOL)
    })
}

#[pyfunction]
#[pyo3(signature = (run, tol=None))]
fn check_wmp(run: &PyRun, tol: Option<f64>) -> PyReport {
    principles::check_wmp(&run.inner, tol_for(run, tol)).into()
}

#[pyfunction]
#[pyo3(signature = (run, tol=None))]
fn check_smp(run: &PyRun, tol: Option<f64>) -> PyReport {
    principles::check_smp(&run.inner, tol_for(run, tol)).into()
}

#[pyfunction]
#[pyo3(signature = (u, v, tol=None))]
fn check_wcp(u: &PyRun, v: &PyRun, tol: Option<f64>) -> PyResult<PyReport> {
    Ok(principles::check_wcp(&u.inner, &v.inner, tol_for(u, tol)).map_err(err)?.into())
}

#[pyfunction]
#[pyo3(signature = (u, v, tol=None, burn_in=1))]
fn check_scp(u: &PyRun, v: &PyRun, tol: Option<f64>, burn_in: usize) -> PyResult<PyReport> {
    Ok(principles::check_scp(&u.inner, &v.inner, tol_for(u, tol), burn_in).map_err(err)?.into())
}

#[pyfunction]
#[pyo3(signature = (run, k, tol=None))]
fn check_hopf(run: &PyRun, k: usize, tol: Option<f64>) -> PyResult<PyReport> {
    Ok(principles::check_hopf(&run.inner, k, tol_for(run, tol)).map_err(err)?.into())
}

#[pyfunction]
#[pyo3(signature = (run, tol=None))]
fn positivity_time(run: &PyRun, tol: Option<f64>) -> (f64, f64) {
    principles::positivity_time(&run.inner, tol_for(run, tol))
}

/// Runs a registry scenario; returns (pass, text summary, result.json path).
#[pyfunction]
#[pyo3(signature = (name, out, n=None, mt=None, seed=None, tol=None))]
fn run_scenario(
    name: &str,
    out: PathBuf,
    n: Option<usize>,
    mt: Option<usize>,
    seed: Option<u64>,
    tol: Option<f64>,
) -> PyResult<(bool, String, PathBuf)> {
    let o = Overrides { n, mt, seed, tol, out: Some(out.clone()) };
    let r = scenarios::run_scenario(name, &o).map_err(err)?;
    Ok((r.pass, r.to_text(), out.join(name).join(scenarios::RESULT_FILE)))
}

#[pyfunction]
fn scenario_names() -> Vec<&'static str> {
    scenarios::REGISTRY.to_vec()
}

/// Text matrix and CSV of the status table from stored results.
#[pyfunction]
fn table1_report(dir: PathBuf) -> PyResult<(String, String)> {
    let results = scenarios::load_results(&dir).map_err(err)?;
    Ok((scenarios::table1_report(&results), scenarios::table1_csv(&results)))
}

#[pymodule]
fn plap(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyRun>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(barenblatt, m)?)?;
    m.add_function(wrap_pyfunction!(barenblatt_support_radius, m)?)?;
    m.add_function(wrap_pyfunction!(extinction_solution, m)?)?;
    m.add_function(wrap_pyfunction!(cauchy_solution, m)?)?;
    m.add_function(wrap_pyfunction!(lambda1_interval, m)?)?;
    m.add_function(wrap_pyfunction!(lambda1_rayleigh, m)?)?;
    m.add_function(wrap_pyfunction!(lambda1_shooting, m)?)?;
    m.add_function(wrap_pyfunction!(discrete_p_laplacian, m)?)?;
    m.add_function(wrap_pyfunction!(linearization_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(check_wmp, m)?)?;
    m.add_function(wrap_pyfunction!(check_smp, m)?)?;
    m.add_function(wrap_pyfunction!(check_wcp, m)?)?;
    m.add_function(wrap_pyfunction!(check_scp, m)?)?;
    m.add_function(wrap_pyfunction!(check_hopf, m)?)?;
    m.add_function(wrap_pyfunction!(positivity_time, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(scenario_names, m)?)?;
    m.add_function(wrap_pyfunction!(table1_report, m)?)?;
    Ok(())
}
