//! Adaptive Dormand-Prince 5(4) integration with zero-crossing events.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome<const D: usize> {
    /// Reached the requested end point without an event.
    Reached([f64; D]),
    /// The event function crossed zero at `x`.
    Event { x: f64, y: [f64; D] },
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand-Prince step; returns (5th-order value, error estimate).
fn step<const D: usize>(
    f: &impl Fn(f64, &[f64; D]) -> [f64; D],
    x: f64,
    y: &[f64; D],
    h: f64,
) -> ([f64; D], [f64; D]) {
    let mut k = [[0.0; D]; 7];
    for s in 0..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for d in 0..D {
                ys[d] += h * A[s][j] * kj[d];
            }
        }
        k[s] = f(x + C[s] * h, &ys);
    }
    let mut y5 = *y;
    let mut err = [0.0; D];
    for d in 0..D {
        let mut s5 = 0.0;
        let mut s4 = 0.0;
        for s in 0..7 {
            s5 += B5[s] * k[s][d];
            s4 += B4[s] * k[s][d];
        }
        y5[d] += h * s5;
        err[d] = h * (s5 - s4);
    }
    (y5, err)
}

/// Integrates y' = f(x, y) from x0 to x_end. If `event` is given, stops at the first zero
/// crossing of event(y) and locates it to near machine precision.
pub fn integrate<const D: usize>(
    f: impl Fn(f64, &[f64; D]) -> [f64; D],
    x0: f64,
    y0: [f64; D],
    x_end: f64,
    opts: OdeOptions,
    event: Option<&dyn Fn(&[f64; D]) -> f64>,
) -> Result<Outcome<D>> {
    let span = x_end - x0;
    if span == 0.0 {
        return Ok(Outcome::Reached(y0));
    }
    let dir = span.signum();
    let mut x = x0;
    let mut y = y0;
    let mut h = dir * span.abs().min(1e-3 * span.abs().max(1e-3));
    let mut g_prev = event.map(|g| g(&y));
    for _ in 0..opts.max_steps {
        if (x_end - x) * dir <= 0.0 {
            return Ok(Outcome::Reached(y));
        }
        if (x + h - x_end) * dir > 0.0 {
            h = x_end - x;
        }
        let (y_new, err) = step(&f, x, &y, h);
        let mut e = 0.0f64;
        for d in 0..D {
            let sc = opts.atol + opts.rtol * y[d].abs().max(y_new[d].abs());
            e = e.max((err[d] / sc).abs());
        }
        if !e.is_finite() {
            h *= 0.25;
            continue;
        }
        if e <= 1.0 {
            if let (Some(g), Some(gp)) = (event, g_prev) {
                let gn = g(&y_new);
                if gn == 0.0 || gn.signum() != gp.signum() {
                    let hs = crate::numerics::brent(
                        |s| g(&step(&f, x, &y, s).0),
                        0.0,
                        h,
                        1e-15 * (x.abs() + h.abs()).max(1e-300),
                    )?;
                    let ys = step(&f, x, &y, hs).0;
                    return Ok(Outcome::Event { x: x + hs, y: ys });
                }
                g_prev = Some(gn);
            }
            x += h;
            y = y_new;
        }
        let factor = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h.abs() < 1e-15 * x.abs().max(1.0) {
            return Err(Error::ConvergenceFailure {
                what: "ODE integration",
                iterations: 0,
                residual: e,
                last: None,
            });
        }
    }
    Err(Error::ConvergenceFailure {
        what: "ODE integration",
        iterations: opts.max_steps,
        residual: f64::NAN,
        last: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        // y'' = −y from (1, 0): first zero of y at π/2
        let out = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            10.0,
            OdeOptions::default(),
            Some(&|y: &[f64; 2]| y[0]),
        )
        .unwrap();
        match out {
            Outcome::Event { x, y } => {
                assert!((x - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
                assert!((y[1] + 1.0).abs() < 1e-12);
            }
            _ => panic!("expected event"),
        }
    }

    #[test]
    fn exponential_to_end() {
        let out = integrate(
            |_, y: &[f64; 1]| [y[0]],
            0.0,
            [1.0],
            1.0,
            OdeOptions::default(),
            None,
        )
        .unwrap();
        match out {
            Outcome::Reached(y) => assert!((y[0] - std::f64::consts::E).abs() < 1e-11),
            _ => panic!("no event expected"),
        }
    }
}
