//! Backward Euler with damped Newton on the tridiagonal Jacobian.

use serde::{Deserialize, Serialize};

use crate::elliptic::operator::{flux, flux_derivative, Stencil};
use crate::error::{Error, Result};
use crate::grid::{Field, SpaceTimeField, TimeMesh};
use crate::numerics::solve_tridiagonal;
use crate::parabolic::reaction::{reaction_derivative, reaction_eval};
use crate::problem::ProblemSpec;

const MAX_HALVINGS: usize = 30;
/// A failed step is retried with 2, 4, … substeps up to this many.
pub const MAX_SUBSTEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    /// Residual evaluations, so an already-converged state reports 1.
    pub newton_iters: usize,
    /// Sup-norm of u − u_prev − dt·(Δp u + reaction + f) at interior nodes.
    pub final_residual: f64,
    /// Some Newton update was shortened.
    pub damped: bool,
    /// Substeps used for the interval (1 unless a retry was needed).
    pub substeps: usize,
}

#[derive(Debug, Clone)]
pub struct ParabolicSolution {
    pub field: SpaceTimeField,
    pub reports: Vec<StepReport>,
}

impl ParabolicSolution {
    pub fn max_residual(&self) -> f64 {
        self.reports.iter().fold(0.0, |m, r| m.max(r.final_residual))
    }

    pub fn total_newton_iters(&self) -> usize {
        self.reports.iter().map(|r| r.newton_iters).sum()
    }
}

struct Workspace {
    st: Stencil,
    res: Vec<f64>,
    trial: Vec<f64>,
    trial_res: Vec<f64>,
}

fn impose_boundary(spec: &ProblemSpec, u: &mut [f64], t: f64) {
    for b in spec.grid.boundary_nodes() {
        u[b] = spec.boundary.eval(spec.grid.node(b), t);
    }
}

/// Residual of the update form u − u_prev − dt·(Δp u + reaction + f) at interior nodes, 0 on
/// the boundary; returns its sup-norm. Multiplying through by dt keeps the rounding floor
/// below the tolerance: for p < 2 the flux is nearly non-Lipschitz where the gradient
/// vanishes, and (u − u_prev)/dt − Δp u cannot be evaluated to 1e−10 there.
fn residual(
    st: &Stencil,
    spec: &ProblemSpec,
    u: &[f64],
    prev: &[f64],
    t: f64,
    dt: f64,
    out: &mut [f64],
) -> f64 {
    let n = u.len();
    let h = st.h;
    let mut left = 0.0;
    let mut worst = 0.0f64;
    for i in 0..n {
        let right = if i + 1 < n {
            st.face[i] * flux((u[i + 1] - u[i]) / h, spec.p, spec.eps_reg)
        } else {
            0.0
        };
        out[i] = if spec.grid.is_boundary(i) {
            0.0
        } else {
            let lap = (right - left) / st.vol[i];
            (u[i] - prev[i])
                - dt * (lap + reaction_eval(u[i], i, spec) + spec.source.eval(&spec.grid, i, t))
        };
        worst = worst.max(out[i].abs());
        left = right;
    }
    if worst.is_nan() {
        f64::INFINITY
    } else {
        worst
    }
}

fn jacobian(
    st: &Stencil,
    spec: &ProblemSpec,
    u: &[f64],
    dt: f64,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let n = u.len();
    let h = st.h;
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    // k[i] = A_{i+1/2} q'(D_{i+1/2}) / h
    let mut k = vec![0.0; n - 1];
    for i in 0..n - 1 {
        let d = flux_derivative((u[i + 1] - u[i]) / h, spec.p, spec.eps_reg);
        if !d.is_finite() {
            return Err(Error::SingularFlux { cell: i });
        }
        k[i] = st.face[i] * d / h;
    }
    for i in 0..n {
        if spec.grid.is_boundary(i) {
            diag[i] = 1.0;
            continue;
        }
        let v = st.vol[i] / dt;
        let kl = if i > 0 { k[i - 1] } else { 0.0 };
        let kr = if i + 1 < n { k[i] } else { 0.0 };
        diag[i] = 1.0 + (kl + kr) / v - dt * reaction_derivative(u[i], i, spec, spec.eps_reg);
        if i > 0 {
            sub[i] = -kl / v;
        }
        if i + 1 < n {
            sup[i] = -kr / v;
        }
    }
    Ok((sub, diag, sup))
}

fn newton(
    ws: &mut Workspace,
    spec: &ProblemSpec,
    u: &mut Vec<f64>,
    prev: &[f64],
    t: f64,
    dt: f64,
) -> Result<(StepReport, bool)> {
    impose_boundary(spec, u, t);
    let mut r = residual(&ws.st, spec, u, prev, t, dt, &mut ws.res);
    let mut evals = 1;
    let mut damped = false;
    for _ in 0..spec.newton_max_iters {
        if r <= spec.newton_tol {
            return Ok((
                StepReport {
                    newton_iters: evals,
                    final_residual: r,
                    damped,
                    substeps: 1,
                },
                true,
            ));
        }
        let (sub, diag, sup) = jacobian(&ws.st, spec, u, dt)?;
        let rhs: Vec<f64> = ws.res.iter().map(|x| -x).collect();
        let Some(delta) = solve_tridiagonal(&sub, &diag, &sup, &rhs) else {
            break;
        };
        let mut alpha = 1.0;
        let mut accepted = false;
        for halving in 0..=MAX_HALVINGS {
            for i in 0..u.len() {
                ws.trial[i] = u[i] + alpha * delta[i];
            }
            let rt = residual(&ws.st, spec, &ws.trial, prev, t, dt, &mut ws.trial_res);
            evals += 1;
            if rt < r {
                damped |= halving > 0;
                std::mem::swap(u, &mut ws.trial);
                std::mem::swap(&mut ws.res, &mut ws.trial_res);
                r = rt;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let ok = r <= spec.newton_tol;
    Ok((
        StepReport {
            newton_iters: evals,
            final_residual: r,
            damped,
            substeps: 1,
        },
        ok,
    ))
}

/// One backward Euler step from `u_prev` to time `t_next`. The Newton iteration starts from
/// `u_prev`; success means the residual sup-norm is at most `spec.newton_tol`.
pub fn step_implicit_euler(
    u_prev: &Field,
    t_next: f64,
    dt: f64,
    spec: &ProblemSpec,
) -> Result<(Field, StepReport)> {
    spec.validate()?;
    if u_prev.grid() != &spec.grid {
        return Err(Error::IncompatibleFields(
            "previous slice lives on another grid".into(),
        ));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
    }
    let mut ws = workspace(spec);
    let mut u = u_prev.values().to_vec();
    let (report, ok) = newton(&mut ws, spec, &mut u, u_prev.values(), t_next, dt)?;
    if !ok {
        return Err(Error::StepFailure {
            time_index: 1,
            iterations: report.newton_iters,
            residual: report.final_residual,
        });
    }
    Ok((Field::new(spec.grid, u)?, report))
}

fn workspace(spec: &ProblemSpec) -> Workspace {
    let n = spec.grid.n();
    Workspace {
        st: Stencil::new(&spec.grid),
        res: vec![0.0; n],
        trial: vec![0.0; n],
        trial_res: vec![0.0; n],
    }
}

/// Advances one interval of the time mesh, splitting it into 2, 4, … equal substeps when a
/// single step fails.
fn advance(
    ws: &mut Workspace,
    spec: &ProblemSpec,
    prev: &[f64],
    t0: f64,
    dt: f64,
    index: usize,
) -> Result<(Vec<f64>, StepReport)> {
    let mut substeps = 1;
    let mut last = None;
    while substeps <= MAX_SUBSTEPS {
        let sub_dt = dt / substeps as f64;
        let mut u = prev.to_vec();
        let mut start = prev.to_vec();
        let mut total = StepReport {
            newton_iters: 0,
            final_residual: 0.0,
            damped: false,
            substeps,
        };
        let mut ok = true;
        for s in 1..=substeps {
            let t = if s == substeps {
                t0 + dt
            } else {
                t0 + s as f64 * sub_dt
            };
            let (rep, good) = newton(ws, spec, &mut u, &start, t, sub_dt)?;
            total.newton_iters += rep.newton_iters;
            total.final_residual = total.final_residual.max(rep.final_residual);
            total.damped |= rep.damped;
            if !good {
                ok = false;
                break;
            }
            start.copy_from_slice(&u);
        }
        if ok {
            return Ok((u, total));
        }
        last = Some(total);
        substeps *= 2;
    }
    let last = last.expect("at least one attempt");
    Err(Error::StepFailure {
        time_index: index,
        iterations: last.newton_iters,
        residual: last.final_residual,
    })
}

/// Marches the problem over the time mesh. Slice 0 is `spec.initial` with the boundary data
/// at t = 0 imposed.
pub fn solve_parabolic(spec: &ProblemSpec, tmesh: &TimeMesh) -> Result<ParabolicSolution> {
    spec.validate()?;
    let mut ws = workspace(spec);
    let mut u0 = spec.initial.values().to_vec();
    impose_boundary(spec, &mut u0, 0.0);
    let mut slices = Vec::with_capacity(tmesh.steps() + 1);
    let mut reports = Vec::with_capacity(tmesh.steps());
    slices.push(Field::new(spec.grid, u0)?);
    for k in 1..=tmesh.steps() {
        let prev = slices[k - 1].values();
        let dt = tmesh.time(k) - tmesh.time(k - 1);
        let (u, rep) = advance(&mut ws, spec, prev, tmesh.time(k - 1), dt, k)?;
        slices.push(Field::new(spec.grid, u)?);
        reports.push(rep);
    }
    Ok(ParabolicSolution {
        field: SpaceTimeField::new(spec.grid, *tmesh, slices)?,
        reports,
    })
}
