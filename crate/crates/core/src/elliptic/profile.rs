//! Extinction profile: −(|v'|^{p−2}v')' = v on (−1, 1), v(±1) = 0, v > 0.

use crate::elliptic::operator::flux_inverse;
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::numerics::brent;
use crate::ode::{integrate, OdeOptions, Outcome};

fn rhs(p: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    move |_, y| [flux_inverse(y[1], p), -y[0]]
}

fn opts() -> OdeOptions {
    OdeOptions {
        rtol: 1e-13,
        atol: 1e-16,
        ..OdeOptions::default()
    }
}

/// First zero of the solution with v(0) = s, v'(0) = 0, or None if it stays positive on [0, 1].
fn first_zero(p: f64, s: f64) -> Result<Option<f64>> {
    let out = integrate(rhs(p), 0.0, [s, 0.0], 1.0, opts(), Some(&|y: &[f64; 2]| y[0]))?;
    Ok(match out {
        Outcome::Event { x, .. } => Some(x),
        Outcome::Reached(_) => None,
    })
}

/// Amplitude s* = v(0) of the profile. The equation is not scale invariant, so the amplitude
/// is pinned by the boundary condition; larger amplitudes reach zero sooner.
pub fn profile_amplitude(p: f64) -> Result<f64> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "the extinction profile needs p in (1, 2), got {p}"
        )));
    }
    // signed miss of the first zero, as a function of log s
    let miss = |ls: f64| -> f64 {
        match first_zero(p, ls.exp()) {
            Ok(Some(x)) => x - 1.0,
            Ok(None) => {
                // positive at x = 1: report v(1) scaled to stay comparable
                match integrate(rhs(p), 0.0, [ls.exp(), 0.0], 1.0, opts(), None) {
                    Ok(Outcome::Reached(y)) => y[0] / ls.exp(),
                    _ => f64::NAN,
                }
            }
            Err(_) => f64::NAN,
        }
    };
    let (lo, hi) = ((1e-6f64).ln(), (1e12f64).ln());
    let ls = brent(miss, lo, hi, 1e-15)?;
    Ok(ls.exp())
}

/// Positive even profile sampled on n nodes of [−1, 1]; boundary nodes are exactly 0.
pub fn solve_profile_bvp(p: f64, n: usize) -> Result<Field> {
    let s = profile_amplitude(p)?;
    let grid = Grid::interval(-1.0, 1.0, n)?;
    let mut values = vec![0.0; n];
    // right half walked outward from the center; the left half mirrors it exactly
    let first = n / 2;
    let mut x = 0.0;
    let mut y = [s, 0.0];
    for i in first..n {
        let target = grid.node(i).abs();
        if target > x {
            match integrate(rhs(p), x, y, target, opts(), None)? {
                Outcome::Reached(yn) => y = yn,
                Outcome::Event { .. } => unreachable!("no event requested"),
            }
            x = target;
        }
        values[i] = y[0];
    }
    for i in 0..first {
        values[i] = values[n - 1 - i];
    }
    values[0] = 0.0;
    values[n - 1] = 0.0;
    Field::new(grid, values)
}

/// v(1) for the shooting solution with the computed amplitude (boundary miss).
pub fn profile_boundary_miss(p: f64) -> Result<f64> {
    let s = profile_amplitude(p)?;
    match integrate(rhs(p), 0.0, [s, 0.0], 1.0, opts(), None)? {
        Outcome::Reached(y) => Ok(y[0]),
        Outcome::Event { .. } => unreachable!("no event requested"),
    }
}
