//! Newton descent on the discrete energy, and the positive logistic solution built on it.

use crate::elliptic::eigen::lambda1_rayleigh;
use crate::elliptic::energy::{energy_raw, gradient_raw, hessian_raw, EnergySpec};
use crate::elliptic::operator::Stencil;
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::numerics::{is_positive_definite, solve_tridiagonal};
use crate::problem::DEFAULT_NEWTON_TOL;

const STAGNATION_ITERS: usize = 100;

#[derive(Debug, Clone, Copy)]
pub struct MinimizeOptions {
    /// Stop once the sup-norm of the energy gradient falls below this.
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Regularization of the singular second-derivative coefficients.
    pub hessian_delta: f64,
    /// Give up early (returning the iterate) once its sup-norm drops below this.
    pub collapse_below: Option<f64>,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            grad_tol: DEFAULT_NEWTON_TOL,
            max_iters: 2000,
            hessian_delta: 1e-10,
            collapse_below: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimized {
    pub field: Field,
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    /// True when the run stopped on `collapse_below`.
    pub collapsed: bool,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Minimizes the energy from `init` and returns the minimizer candidate.
pub fn minimize_energy(spec: &EnergySpec, grid: &Grid, init: &Field) -> Result<Field> {
    Ok(minimize_energy_with(spec, grid, init, MinimizeOptions::default())?.field)
}

/// Newton iteration on the tridiagonal second derivative with an Armijo backtracking search.
/// Where the full second derivative is indefinite the concave −λ|w|^p/p part is left out,
/// which keeps every step a descent direction. Close to the minimum the energy decrease
/// drops below rounding; a step is then accepted if it lowers the gradient instead.
pub fn minimize_energy_with(
    spec: &EnergySpec,
    grid: &Grid,
    init: &Field,
    opts: MinimizeOptions,
) -> Result<Minimized> {
    if init.grid() != grid || spec.h_src.grid() != grid {
        return Err(Error::IncompatibleFields(
            "initial field, source and grid disagree".into(),
        ));
    }
    let st = Stencil::new(grid);
    let n = grid.n();
    let mut w = init.values().to_vec();
    for b in grid.boundary_nodes() {
        w[b] = 0.0;
    }
    let mut g = vec![0.0; n];
    let mut g_trial = vec![0.0; n];
    let mut e = energy_raw(&st, &w, spec);
    gradient_raw(&st, &w, spec, &mut g);
    let mut gnorm = sup(&g);
    let failure = |w: Vec<f64>, iterations: usize, residual: f64| -> Error {
        Error::ConvergenceFailure {
            what: "energy minimization",
            iterations,
            residual,
            last: Field::new(*grid, w).ok().map(Box::new),
        }
    };
    // faces whose difference changed sign on the last accepted step
    let mut flipped = vec![false; n - 1];
    // rounding floor: give up once the gradient has not improved for a while
    let (mut best, mut best_iter) = (gnorm, 0usize);
    for iter in 0..opts.max_iters {
        if gnorm < best {
            best = gnorm;
            best_iter = iter;
        } else if iter - best_iter > STAGNATION_ITERS {
            return Err(failure(w, iter, gnorm));
        }
        if let Some(floor) = opts.collapse_below {
            if sup(&w) < floor {
                return Ok(Minimized {
                    field: Field::new(*grid, w)?,
                    energy: e,
                    grad_norm: gnorm,
                    iterations: iter,
                    collapsed: true,
                });
            }
        }
        if gnorm < opts.grad_tol {
            return Ok(Minimized {
                field: Field::new(*grid, w)?,
                energy: e,
                grad_norm: gnorm,
                iterations: iter,
                collapsed: false,
            });
        }
        let (mut diag, mut off, concave) = hessian_raw(&st, &w, spec, opts.hessian_delta, Some(&flipped));
        let full: Vec<f64> = diag.iter().zip(&concave).map(|(d, c)| d + c).collect();
        let use_full = is_positive_definite(&full, &off[..n - 1]);
        if use_full {
            diag = full;
        }
        for b in grid.boundary_nodes() {
            diag[b] = 1.0;
            if b > 0 {
                off[b - 1] = 0.0;
            }
            if b + 1 < n {
                off[b] = 0.0;
            }
        }
        let rhs: Vec<f64> = g.iter().map(|x| -x).collect();
        let mut sub = vec![0.0; n];
        sub[1..].copy_from_slice(&off[..n - 1]);
        let mut dir = solve_tridiagonal(&sub, &diag, &off, &rhs)
            .ok_or_else(|| failure(w.clone(), iter, gnorm))?;
        let mut slope: f64 = dir.iter().zip(&g).map(|(d, gi)| d * gi).sum();
        if !(slope < 0.0) && use_full {
            let (mut convex, _, _) = hessian_raw(&st, &w, spec, opts.hessian_delta, Some(&flipped));
            for b in grid.boundary_nodes() {
                convex[b] = 1.0;
            }
            dir = solve_tridiagonal(&sub, &convex, &off, &rhs)
                .ok_or_else(|| failure(w.clone(), iter, gnorm))?;
            slope = dir.iter().zip(&g).map(|(d, gi)| d * gi).sum();
        }
        if !(slope < 0.0) {
            dir = rhs.clone();
            slope = -g.iter().map(|x| x * x).sum::<f64>();
        }
        let scale = st
            .vol
            .iter()
            .zip(&w)
            .map(|(v, x)| v * (x * x + x.abs()))
            .sum::<f64>()
            .max(e.abs());
        let mut alpha = 1.0;
        let mut trial = vec![0.0; n];
        loop {
            for i in 0..n {
                trial[i] = w[i] + alpha * dir[i];
            }
            let e_trial = energy_raw(&st, &trial, spec);
            let armijo = e_trial <= e + 1e-4 * alpha * slope;
            let mut accept = armijo;
            if !accept && e_trial - e <= 1e-13 * scale {
                gradient_raw(&st, &trial, spec, &mut g_trial);
                accept = sup(&g_trial) < gnorm;
            } else if accept {
                gradient_raw(&st, &trial, spec, &mut g_trial);
            }
            if accept && e_trial.is_finite() {
                for (i, f) in flipped.iter_mut().enumerate() {
                    *f = (trial[i + 1] - trial[i]) * (w[i + 1] - w[i]) < 0.0;
                }
                std::mem::swap(&mut w, &mut trial);
                std::mem::swap(&mut g, &mut g_trial);
                e = e_trial;
                gnorm = sup(&g);
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-14 {
                return Err(failure(w, iter, gnorm));
            }
        }
    }
    Err(failure(w, opts.max_iters, gnorm))
}

/// Positive solution of −Δp w = λ|w|^{p−2}w − w, w = 0 on the boundary, as the minimizer of
/// the energy with h ≡ 0 started from the first eigenfield.
pub fn solve_logistic(grid: &Grid, p: f64, lambda: f64) -> Result<Field> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "the logistic problem needs p in (1, 2), got {p}"
        )));
    }
    let (_, eig) = lambda1_rayleigh(grid, p, 1e-12)?;
    let peak = eig.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let init = eig.scaled(1.0 / peak);
    let spec = EnergySpec::new(p, lambda, Field::zeros(*grid))?;
    let opts = MinimizeOptions {
        collapse_below: Some(1e-8),
        ..MinimizeOptions::default()
    };
    let first = minimize_energy_with(&spec, grid, &init, opts)?;
    let size = first.field.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if first.collapsed || size < 1e-8 {
        return Err(Error::TrivialSolution { sup: size });
    }
    // the energy is even; a negative minimizer is reflected and polished
    let w = minimize_energy_with(&spec, grid, &first.field.map(f64::abs)?, opts)?;
    if w.collapsed {
        return Err(Error::TrivialSolution { sup: 0.0 });
    }
    Ok(w.field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::energy::energy_gradient;
    use crate::grid::sample;

    #[test]
    fn quadratic_case_hits_linear_solution() {
        // p = 2, λ = 0: −w'' + w = 1 with zero ends
        let g = Grid::interval(-1.0, 1.0, 101).unwrap();
        let spec = EnergySpec::new(2.0, 0.0, sample(&g, |_| 1.0).unwrap()).unwrap();
        let w = minimize_energy(&spec, &g, &Field::zeros(g)).unwrap();
        let grad = energy_gradient(&w, &spec).unwrap();
        assert!(grad.values().iter().all(|v| v.abs() < 1e-10));
        let exact = |x: f64| 1.0 - x.cosh() / 1f64.cosh();
        assert!((w.values()[50] - exact(0.0)).abs() < 1e-4);
    }

    #[test]
    fn logistic_below_threshold_is_trivial() {
        let g = Grid::interval(-1.0, 1.0, 129).unwrap();
        let (l1, _) = lambda1_rayleigh(&g, 1.5, 1e-12).unwrap();
        match solve_logistic(&g, 1.5, 0.5 * l1) {
            Err(Error::TrivialSolution { .. }) => {}
            other => panic!("expected trivial solution, got {other:?}"),
        }
    }

    #[test]
    fn logistic_above_threshold_is_positive() {
        let g = Grid::interval(-1.0, 1.0, 129).unwrap();
        let (l1, _) = lambda1_rayleigh(&g, 1.5, 1e-12).unwrap();
        let w = solve_logistic(&g, 1.5, 2.0 * l1).unwrap();
        assert!(g.interior().all(|i| w.values()[i] > 0.0));
    }
}
