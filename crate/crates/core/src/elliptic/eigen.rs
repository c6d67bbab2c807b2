//! First Dirichlet eigenvalue of the p-Laplacian: discrete Rayleigh quotient and shooting.

use std::f64::consts::PI;

use crate::elliptic::operator::{flux_inverse, solve_dirichlet, Stencil};
use crate::error::{Error, Result};
use crate::grid::{Field, Geometry, Grid};
use crate::ode::{integrate, OdeOptions, Outcome};

const MAX_INVERSE_ITERS: usize = 20_000;

/// ∫|∇u|^p / ∫|u|^p with the same quadrature as the energy.
pub fn rayleigh_quotient(st: &Stencil, u: &[f64], p: f64) -> f64 {
    let h = st.h;
    let num: f64 = (0..u.len() - 1)
        .map(|i| st.face[i] * h * ((u[i + 1] - u[i]) / h).abs().powf(p))
        .sum();
    let den: f64 = u.iter().zip(&st.vol).map(|(v, w)| w * v.abs().powf(p)).sum();
    num / den
}

fn lp_normalize(st: &Stencil, u: &mut [f64], p: f64) {
    let norm: f64 = u
        .iter()
        .zip(&st.vol)
        .map(|(v, w)| w * v.abs().powf(p))
        .sum::<f64>()
        .powf(1.0 / p);
    for v in u.iter_mut() {
        *v /= norm;
    }
}

/// First eigenfunction of the Laplacian on the grid's domain (positive, zero on the boundary).
fn linear_eigenfunction(grid: &Grid) -> Vec<f64> {
    match grid.geometry() {
        Geometry::Interval { a, b } => grid
            .nodes()
            .iter()
            .map(|x| (PI * (x - a) / (b - a)).sin())
            .collect(),
        Geometry::Radial { radius, dim } => grid
            .nodes()
            .iter()
            .map(|&r| {
                let s = r / radius;
                match dim {
                    // sin(πs)/(πs) for N = 3; the cosine is exact for N = 1 and a positive
                    // stand-in otherwise
                    3 if s > 0.0 => (PI * s).sin() / (PI * s),
                    3 => 1.0,
                    _ => (0.5 * PI * s).cos(),
                }
            })
            .collect(),
    }
}

/// Minimizes the discrete Rayleigh quotient ∫|∇u|^p / ∫|u|^p over fields vanishing on the
/// boundary. Returns λ1 and the minimizer normalized by ∫|u|^p = 1.
///
/// The minimum is reached by nonlinear inverse iteration u ← (−Δp)^{-1}(|u|^{p−2}u), each
/// application solved exactly, starting from the p = 2 eigenfunction. Stops when λ changes
/// by less than `tol` relative and the iterates by less than √tol in sup-norm.
pub fn lambda1_rayleigh(grid: &Grid, p: f64, tol: f64) -> Result<(f64, Field)> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must exceed 1")));
    }
    let st = Stencil::new(grid);
    let mut u = linear_eigenfunction(grid);
    for b in grid.boundary_nodes() {
        u[b] = 0.0;
    }
    lp_normalize(&st, &mut u, p);
    let mut lambda = rayleigh_quotient(&st, &u, p);
    let mut g = vec![0.0; u.len()];
    for iter in 0..MAX_INVERSE_ITERS {
        for (gi, &ui) in g.iter_mut().zip(&u) {
            *gi = if ui == 0.0 {
                0.0
            } else {
                ui.abs().powf(p - 1.0).copysign(ui)
            };
        }
        let mut next = solve_dirichlet(&st, p, &g)?;
        lp_normalize(&st, &mut next, p);
        let next_lambda = rayleigh_quotient(&st, &next, p);
        let change = next
            .iter()
            .zip(&u)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let dl = (next_lambda - lambda).abs();
        u = next;
        lambda = next_lambda;
        if iter > 0 && dl <= tol * lambda && change <= tol.sqrt() {
            return Ok((lambda, Field::new(*grid, u)?));
        }
    }
    Err(Error::ConvergenceFailure {
        what: "lambda1 inverse iteration",
        iterations: MAX_INVERSE_ITERS,
        residual: lambda,
        last: Some(Box::new(Field::new(*grid, u)?)),
    })
}

/// First zero of the eigenfunction started at the midpoint with v = 1, v' = 0.
fn first_zero(p: f64, lambda: f64, x_max: f64) -> Result<Option<f64>> {
    // series start: F ≈ −λx, v ≈ 1 − ((p−1)/p) λ^{1/(p−1)} x^{p/(p−1)}
    let x0 = 1e-7 * x_max;
    let v0 = 1.0 - (p - 1.0) / p * lambda.powf(1.0 / (p - 1.0)) * x0.powf(p / (p - 1.0));
    let f0 = -lambda * x0;
    let rhs = |_: f64, y: &[f64; 2]| {
        let v = y[0];
        let pow = if v == 0.0 {
            0.0
        } else {
            v.abs().powf(p - 1.0).copysign(v)
        };
        [flux_inverse(y[1], p), -lambda * pow]
    };
    let out = integrate(
        rhs,
        x0,
        [v0, f0],
        x_max,
        OdeOptions {
            rtol: 1e-13,
            atol: 1e-15,
            ..OdeOptions::default()
        },
        Some(&|y: &[f64; 2]| y[0]),
    )?;
    Ok(match out {
        Outcome::Event { x, .. } => Some(x),
        Outcome::Reached(_) => None,
    })
}

/// λ1 on an interval of length L by shooting from the midpoint and bisecting λ until the
/// first zero lands on the boundary (tolerance 1e−10 in λ, tighter when λ is small).
pub fn lambda1_shooting(p: f64, length: f64) -> Result<f64> {
    if !(p > 1.0) || !(length > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need p > 1 and L > 0, got p = {p}, L = {length}"
        )));
    }
    let half = 0.5 * length;
    // zero position minus half-length; decreasing in λ, +∞ when no zero before 4·half
    let miss = |lambda: f64| -> Result<f64> {
        Ok(match first_zero(p, lambda, 4.0 * half)? {
            Some(x) => x - half,
            None => f64::INFINITY,
        })
    };
    let (mut lo, mut hi) = (1.0, 1.0);
    let m1 = miss(1.0)?;
    if m1 > 0.0 {
        for _ in 0..200 {
            hi *= 2.0;
            if miss(hi)? <= 0.0 {
                break;
            }
            lo = hi;
        }
    } else {
        for _ in 0..200 {
            lo *= 0.5;
            if miss(lo)? > 0.0 {
                break;
            }
            hi = lo;
        }
    }
    if !(miss(lo)? > 0.0 && miss(hi)? <= 0.0) {
        return Err(Error::BracketingFailure(format!(
            "no eigenvalue bracket found for p = {p}, L = {length}"
        )));
    }
    let tol = 1e-10f64.min(1e-13 * hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if miss(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Eigenfunction from the shooting ODE sampled at `xs` (distances from the midpoint), v(0) = 1.
pub fn shooting_eigenfunction(p: f64, lambda: f64, xs: &[f64]) -> Result<Vec<f64>> {
    let x0: f64 = 1e-9;
    let v0 = 1.0 - (p - 1.0) / p * lambda.powf(1.0 / (p - 1.0)) * x0.powf(p / (p - 1.0));
    let rhs = |_: f64, y: &[f64; 2]| {
        let v = y[0];
        let pow = if v == 0.0 {
            0.0
        } else {
            v.abs().powf(p - 1.0).copysign(v)
        };
        [flux_inverse(y[1], p), -lambda * pow]
    };
    let mut out = Vec::with_capacity(xs.len());
    let mut x = x0;
    let mut y = [v0, -lambda * x0];
    for &target in xs {
        if target <= x0 {
            out.push(1.0);
            continue;
        }
        if let Outcome::Reached(yn) = integrate(rhs, x, y, target, OdeOptions::default(), None)? {
            y = yn;
        }
        x = target;
        out.push(y[0]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::lambda1_interval;

    #[test]
    fn shooting_linear_case() {
        let l = lambda1_shooting(2.0, 1.0).unwrap();
        assert!((l - PI * PI).abs() < 1e-8, "{l}");
    }

    #[test]
    fn rayleigh_linear_case_coarse() {
        let g = Grid::interval(0.0, 1.0, 257).unwrap();
        let (l, u) = lambda1_rayleigh(&g, 2.0, 1e-12).unwrap();
        // discrete value (4/h²) sin²(πh/2)
        let h = g.h();
        let exact = 4.0 / (h * h) * (0.5 * PI * h).sin().powi(2);
        assert!((l - exact).abs() < 1e-9 * exact, "{l} vs {exact}");
        assert!(g.interior().all(|i| u.values()[i] > 0.0));
    }

    #[test]
    fn shooting_matches_reference_p3() {
        let l = lambda1_shooting(3.0, 2.0).unwrap();
        let r = lambda1_interval(3.0, 2.0);
        assert!(((l - r) / r).abs() < 1e-6, "{l} vs {r}");
    }
}
