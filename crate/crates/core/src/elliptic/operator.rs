//! Conservative finite-volume p-Laplacian and the exact discrete Dirichlet solve.

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::numerics::brent;

/// Face areas and control volumes of a grid, cached for repeated operator applications.
#[derive(Debug, Clone)]
pub struct Stencil {
    pub h: f64,
    /// face[i] sits between nodes i and i+1
    pub face: Vec<f64>,
    pub vol: Vec<f64>,
    pub grid: Grid,
}

impl Stencil {
    pub fn new(grid: &Grid) -> Self {
        Stencil {
            h: grid.h(),
            face: (0..grid.n() - 1).map(|i| grid.face_area(i)).collect(),
            vol: grid.volumes(),
            grid: *grid,
        }
    }
}

/// Regularized flux φ(D)·D with φ(s) = (s² + ε²)^{(p−2)/2}; ε = 0 gives sign(D)|D|^{p−1}.
#[inline]
pub fn flux(d: f64, p: f64, eps: f64) -> f64 {
    if eps == 0.0 {
        if d == 0.0 {
            0.0
        } else {
            d.abs().powf(p - 1.0).copysign(d)
        }
    } else {
        (d * d + eps * eps).powf(0.5 * (p - 2.0)) * d
    }
}

/// d(flux)/dD; infinite at D = 0 when ε = 0 and p < 2.
#[inline]
pub fn flux_derivative(d: f64, p: f64, eps: f64) -> f64 {
    if eps == 0.0 {
        if d == 0.0 {
            return if p < 2.0 {
                f64::INFINITY
            } else if p == 2.0 {
                1.0
            } else {
                0.0
            };
        }
        (p - 1.0) * d.abs().powf(p - 2.0)
    } else {
        let s = d * d + eps * eps;
        s.powf(0.5 * (p - 4.0)) * ((p - 1.0) * d * d + eps * eps)
    }
}

/// Inverse of the unregularized flux: D with sign(D)|D|^{p−1} = q.
#[inline]
pub fn flux_inverse(q: f64, p: f64) -> f64 {
    if q == 0.0 {
        0.0
    } else {
        q.abs().powf(1.0 / (p - 1.0)).copysign(q)
    }
}

/// Writes Δp u into `out` at interior nodes and 0 at boundary nodes.
pub fn apply_p_laplacian(st: &Stencil, u: &[f64], p: f64, eps: f64, out: &mut [f64]) {
    let n = u.len();
    let h = st.h;
    let mut left = 0.0; // A·q on the face below the current node
    for i in 0..n {
        let right = if i + 1 < n {
            st.face[i] * flux((u[i + 1] - u[i]) / h, p, eps)
        } else {
            0.0
        };
        out[i] = if st.grid.is_boundary(i) {
            0.0
        } else {
            (right - left) / st.vol[i]
        };
        left = right;
    }
}

/// Conservative discrete p-Laplacian; boundary nodes carry 0.
pub fn discrete_p_laplacian(u: &Field, p: f64, eps_reg: f64) -> Result<Field> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must exceed 1")));
    }
    if !(eps_reg >= 0.0) {
        return Err(Error::InvalidParameter("eps_reg must be nonnegative".into()));
    }
    let st = Stencil::new(u.grid());
    let mut out = vec![0.0; u.grid().n()];
    apply_p_laplacian(&st, u.values(), p, eps_reg, &mut out);
    Field::new(*u.grid(), out)
}

/// Solves −Δp w = g at the interior nodes with w = 0 on the boundary, using the unregularized
/// flux. In one dimension (and for radial symmetry) the flux is fixed by the data up to one
/// constant, so the solve is a scalar root-find (interval) or a direct sweep (ball).
pub fn solve_dirichlet(st: &Stencil, p: f64, g: &[f64]) -> Result<Vec<f64>> {
    let n = g.len();
    let h = st.h;
    let mut w = vec![0.0; n];
    if st.grid.is_radial() {
        // A_{i+1/2} q_{i+1/2} = A_{i−1/2} q_{i−1/2} − V_i g_i, starting from the center
        let mut aq = 0.0;
        let mut d = vec![0.0; n - 1];
        for i in 0..n - 1 {
            aq -= st.vol[i] * g[i];
            d[i] = flux_inverse(aq / st.face[i], p);
        }
        for i in (0..n - 1).rev() {
            w[i] = w[i + 1] - h * d[i];
        }
        return Ok(w);
    }
    // interval: q_{i+1/2} = c − S_i with S_i = h Σ_{1≤j≤i} g_j
    let mut s = vec![0.0; n - 1];
    for i in 1..n - 1 {
        s[i] = s[i - 1] + h * g[i];
    }
    let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let total = |c: f64| s.iter().map(|si| flux_inverse(c - si, p)).sum::<f64>();
    let c = if lo == hi {
        lo
    } else {
        let scale = lo.abs().max(hi.abs());
        brent(total, lo, hi, 1e-17 * scale)?
    };
    for i in 0..n - 1 {
        w[i + 1] = w[i] + h * flux_inverse(c - s[i], p);
    }
    // closing error of the root-find lands on the last node; Dirichlet overwrites it
    w[n - 1] = 0.0;
    Ok(w)
}
