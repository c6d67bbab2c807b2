//! Exact solutions and barrier functions, evaluable pointwise.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};

/// Shifted Barenblatt profile for p > 2 in dimension N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarenblattParams {
    pub p: f64,
    pub dim: usize,
    pub c: f64,
    pub alpha: f64,
}

impl BarenblattParams {
    pub fn new(p: f64, dim: usize, c: f64, alpha: f64) -> Result<Self> {
        if !(p > 2.0) {
            return Err(Error::InvalidParameter(format!(
                "the Barenblatt solution needs p > 2, got {p}"
            )));
        }
        if dim == 0 || !(c > 0.0) || !(alpha > 0.0) {
            return Err(Error::InvalidParameter(
                "the Barenblatt solution needs N >= 1, C > 0, alpha > 0".into(),
            ));
        }
        Ok(BarenblattParams { p, dim, c, alpha })
    }

    /// k = (p − 2 + p/N)^{-1}
    pub fn k(&self) -> f64 {
        1.0 / (self.p - 2.0 + self.p / self.dim as f64)
    }

    /// Coefficient in front of the similarity variable inside the bracket.
    fn q(&self) -> f64 {
        let p = self.p;
        (p - 2.0) / p * (self.k() / self.dim as f64).powf(1.0 / (p - 1.0))
    }
}

/// Barenblatt value at distance `r = |x|` from the center.
pub fn barenblatt(r: f64, t: f64, params: &BarenblattParams) -> f64 {
    let p = params.p;
    let k = params.k();
    let n = params.dim as f64;
    let s = t + params.alpha;
    let xi = r.abs() / s.powf(k / n);
    let bracket = params.c - params.q() * xi.powf(p / (p - 1.0));
    if bracket <= 0.0 {
        return 0.0;
    }
    s.powf(-k) * bracket.powf((p - 1.0) / (p - 2.0))
}

/// Radius of the support of the Barenblatt profile at time t.
pub fn barenblatt_support_radius(t: f64, params: &BarenblattParams) -> f64 {
    let p = params.p;
    let s = t + params.alpha;
    (params.c / params.q()).powf((p - 1.0) / p) * s.powf(params.k() / params.dim as f64)
}

/// Separable extinction solution (t0 − (2−p)t)_+^{1/(2−p)} v(x) on (−1, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ExtinctionParams {
    pub p: f64,
    pub t0: f64,
    /// Profile v with −(|v'|^{p−2}v')' = v and v(±1) = 0, sampled on a grid over [−1, 1].
    pub profile: Field,
}

impl ExtinctionParams {
    /// Computes the profile on n nodes with the shooting solver.
    pub fn new(p: f64, t0: f64, n: usize) -> Result<Self> {
        let profile = crate::elliptic::solve_profile_bvp(p, n)?;
        Self::with_profile(p, t0, profile)
    }

    pub fn with_profile(p: f64, t0: f64, profile: Field) -> Result<Self> {
        if !(p > 1.0 && p < 2.0) {
            return Err(Error::InvalidParameter(format!(
                "the extinction solution needs p in (1, 2), got {p}"
            )));
        }
        if !(t0 > 0.0) {
            return Err(Error::InvalidParameter("t0 must be positive".into()));
        }
        match profile.grid().geometry() {
            crate::grid::Geometry::Interval { a, b } if a == -1.0 && b == 1.0 => {}
            _ => {
                return Err(Error::InvalidParameter(
                    "the extinction profile lives on [-1, 1]".into(),
                ))
            }
        }
        Ok(ExtinctionParams { p, t0, profile })
    }

    /// v(x) by linear interpolation between profile nodes (exact at nodes).
    pub fn profile_at(&self, x: f64) -> f64 {
        if !(-1.0..=1.0).contains(&x) {
            return 0.0;
        }
        let g = self.profile.grid();
        let v = self.profile.values();
        let s = (x + 1.0) / g.h();
        let i = (s.floor() as usize).min(g.n() - 2);
        let frac = s - i as f64;
        if frac.abs() < 1e-9 {
            return v[i];
        }
        if (1.0 - frac).abs() < 1e-9 {
            return v[i + 1];
        }
        v[i] * (1.0 - frac) + v[i + 1] * frac
    }
}

pub fn extinction_time(params: &ExtinctionParams) -> f64 {
    params.t0 / (2.0 - params.p)
}

pub fn extinction_amplitude(t: f64, params: &ExtinctionParams) -> f64 {
    let base = params.t0 - (2.0 - params.p) * t;
    if base <= 0.0 {
        0.0
    } else {
        base.powf(1.0 / (2.0 - params.p))
    }
}

pub fn extinction_solution(x: f64, t: f64, params: &ExtinctionParams) -> f64 {
    extinction_amplitude(t, params) * params.profile_at(x)
}

/// Positive solution of v' = v^{p−1}, v(0) = 0, for p ∈ (1, 2).
pub fn cauchy_solution(t: f64, p: f64) -> Result<f64> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "v' = |v|^(p-2)v has only the trivial solution from 0 unless p in (1, 2); got {p}"
        )));
    }
    if t <= 0.0 {
        return Ok(0.0);
    }
    Ok(((2.0 - p) * t).powf(1.0 / (2.0 - p)))
}

/// Parameters of ε(e^{−α d²} − e^{−α R²}), d² = |x − x0|² + |t − t0|.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierParams {
    pub eps: f64,
    pub alpha: f64,
    pub radius: f64,
    pub x0: Vec<f64>,
    pub t0: f64,
}

fn barrier_d2(x: &[f64], t: f64, params: &BarrierParams) -> f64 {
    let dx: f64 = x
        .iter()
        .zip(&params.x0)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    dx + (t - params.t0).abs()
}

pub fn hopf_barrier(x: &[f64], t: f64, params: &BarrierParams) -> f64 {
    let d2 = barrier_d2(x, t, params);
    params.eps * ((-params.alpha * d2).exp() - (-params.alpha * params.radius.powi(2)).exp())
}

/// Spatial gradient of the barrier.
pub fn hopf_barrier_gradient(x: &[f64], t: f64, params: &BarrierParams) -> Vec<f64> {
    let d2 = barrier_d2(x, t, params);
    let coef = -2.0 * params.alpha * params.eps * (-params.alpha * d2).exp();
    x.iter().zip(&params.x0).map(|(a, b)| coef * (a - b)).collect()
}

/// Parameters of C(R² − |x|²)^m (T − t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsolutionParams {
    pub c: f64,
    pub m: f64,
    pub radius: f64,
    pub t_final: f64,
}

/// Value at distance r = |x|; zero outside the ball.
pub fn degenerate_subsolution(r: f64, t: f64, params: &SubsolutionParams) -> f64 {
    let base = params.radius * params.radius - r * r;
    if base <= 0.0 {
        return 0.0;
    }
    params.c * base.powf(params.m) * (params.t_final - t)
}

/// Smallest exponent m making the subsolution work for p > 2: p/(p − 2).
pub fn admissible_m(p: f64) -> Result<f64> {
    if !(p > 2.0) {
        return Err(Error::InvalidParameter(format!(
            "the degenerate subsolution needs p > 2, got {p}"
        )));
    }
    Ok(p / (p - 2.0))
}

/// π_p = 2π / (p sin(π/p)).
pub fn pi_p(p: f64) -> f64 {
    2.0 * PI / (p * (PI / p).sin())
}

/// First Dirichlet eigenvalue of the 1-D p-Laplacian on an interval of length L.
pub fn lambda1_interval(p: f64, length: f64) -> f64 {
    (p - 1.0) * (pi_p(p) / length).powf(p)
}

/// Samples a radial closed form u(|x − center|, t) onto a grid.
pub fn sample_radial(grid: &Grid, t: f64, u: impl Fn(f64, f64) -> f64) -> Result<Field> {
    let values = (0..grid.n()).map(|i| u(grid.radius_of(i), t)).collect();
    Field::new(*grid, values)
}
